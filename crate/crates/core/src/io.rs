//! File formats and the textual syntax of functions and spaces.
//!
//! Function specs: `geom(c)` or `geom(re,im)` for `a_n = c^n`; `poly(a0,a1,...)`;
//! `expz` for `a_n = 1/n!`; `powerlaw(s)` or `powerlaw(s,D)` for
//! `a_n = (n+1)^{-s}` up to degree `D` (default 64); anything else is read as
//! a PowerSeries JSON file.
//!
//! Space specs: `h2`, `hp:p`, `h1`, `diskalg`, `dirichlet`, `bergman:alpha`,
//! `table:file` where the file holds a JSON array or whitespace-separated numbers.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::analysis::WeightSequence;
use crate::engine::ConvergenceReport;
use crate::error::{Error, Result};
use crate::series::{PowerSeries, SpaceSpec};

/// Target for the certified tail of preset series.
pub const PRESET_TAIL: f64 = 1e-17;
const POWERLAW_DEGREE: usize = 64;

fn args_of<'a>(spec: &'a str, name: &str) -> Option<&'a str> {
    spec.strip_prefix(name)?
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn numbers(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("not a number: {x:?}")))
        })
        .collect()
}

/// Parses a function spec (preset or PowerSeries JSON file).
pub fn parse_function(spec: &str) -> Result<PowerSeries> {
    let spec = spec.trim();
    if let Some(args) = args_of(spec, "geom") {
        let v = numbers(args)?;
        let c = match v.as_slice() {
            [re] => Complex64::new(*re, 0.0),
            [re, im] => Complex64::new(*re, *im),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "geom takes one or two numbers: {spec}"
                )))
            }
        };
        return PowerSeries::geometric(c, PRESET_TAIL);
    }
    if let Some(args) = args_of(spec, "poly") {
        let v = numbers(args)?;
        return PowerSeries::new(v.into_iter().map(|x| Complex64::new(x, 0.0)).collect());
    }
    if spec == "expz" {
        return Ok(expz());
    }
    if let Some(args) = args_of(spec, "powerlaw") {
        let v = numbers(args)?;
        let (s, degree) = match v.as_slice() {
            [s] => (*s, POWERLAW_DEGREE),
            [s, d] if *d >= 0.0 && d.fract() == 0.0 => (*s, *d as usize),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "powerlaw takes (s) or (s, degree): {spec}"
                )))
            }
        };
        return Ok(powerlaw(s, degree));
    }
    if spec.contains('(') {
        return Err(Error::InvalidArgument(format!(
            "unknown function preset {spec:?}"
        )));
    }
    read_json(Path::new(spec))
}

/// `a_n = 1/n!` with the tail below [`PRESET_TAIL`].
pub fn expz() -> PowerSeries {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut a = 1.0f64;
    let mut n = 0usize;
    // tail sum_{m > n} 1/m! <= 2/(n+1)!
    while 2.0 * a / (n + 1) as f64 > PRESET_TAIL {
        n += 1;
        a /= n as f64;
        coeffs.push(Complex64::new(a, 0.0));
    }
    let tail = 2.0 * a / (n + 1) as f64;
    PowerSeries::with_tail(coeffs, tail).expect("finite coefficients")
}

/// The polynomial `sum_{n <= degree} (n+1)^{-s} z^n`.
pub fn powerlaw(s: f64, degree: usize) -> PowerSeries {
    PowerSeries::from_real_fn(degree, |n| (n as f64 + 1.0).powf(-s))
}

/// Parses a space spec.
pub fn parse_space(spec: &str) -> Result<SpaceSpec> {
    let spec = spec.trim();
    match spec {
        "h2" => return Ok(SpaceSpec::h2()),
        "h1" => return Ok(SpaceSpec::HardyP { p: 1.0 }),
        "diskalg" => return Ok(SpaceSpec::DiskAlgebra),
        "dirichlet" => return SpaceSpec::weighted(WeightSequence::Dirichlet),
        "hardy" => return SpaceSpec::weighted(WeightSequence::Hardy),
        _ => {}
    }
    if let Some(p) = spec.strip_prefix("hp:") {
        let p = p
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad exponent in {spec:?}")))?;
        return SpaceSpec::hardy(p);
    }
    if let Some(a) = spec.strip_prefix("bergman:") {
        let alpha = a
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad alpha in {spec:?}")))?;
        return SpaceSpec::weighted(WeightSequence::bergman(alpha)?);
    }
    if let Some(file) = spec.strip_prefix("table:") {
        return SpaceSpec::weighted(WeightSequence::table(read_table(Path::new(file))?)?);
    }
    Err(Error::InvalidArgument(format!(
        "unknown space {spec:?}; expected h2, hp:p, h1, diskalg, dirichlet, bergman:alpha or table:file"
    )))
}

fn read_table(path: &Path) -> Result<Vec<f64>> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    trimmed
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Format(format!("bad weight value {t:?}")))
        })
        .collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// `# generated <ISO-8601 UTC>`; `SOURCE_DATE_EPOCH` pins the time for reproducible output.
pub fn timestamp_line() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    format!(
        "# generated {}",
        now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    )
}

/// CSV text: timestamp comment, header, rows.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", timestamp_line());
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    fs::write(path, csv(header, rows)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Number formatting shared by the CSV writers (shortest round-trip form).
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub const REPORT_COLUMNS: [&str; 11] = [
    "layer",
    "k_selected",
    "delta",
    "ratio",
    "bound",
    "prefix_max",
    "discretization",
    "dilation_error",
    "residual_norm",
    "degree",
    "status",
];

/// Rows of the convergence-report CSV, one per attempted step.
pub fn report_rows(report: &ConvergenceReport) -> Vec<Vec<String>> {
    report
        .steps
        .iter()
        .map(|s| {
            vec![
                s.step.to_string(),
                s.layer.to_string(),
                num(s.delta),
                num(s.ratio),
                num(s.bound),
                num(s.prefix_max),
                num(s.discretization),
                num(s.dilation_error),
                num(s.residual_norm),
                s.degree.to_string(),
                if s.accepted {
                    "accepted".into()
                } else {
                    "rejected".into()
                },
            ]
        })
        .collect()
}

pub fn write_report_csv(path: &Path, report: &ConvergenceReport) -> Result<()> {
    write_csv(path, &REPORT_COLUMNS, &report_rows(report))
}

/// Reads the data rows of a CSV written by [`write_csv`], skipping comments and the header.
pub fn read_csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
