//! Command-line front end: `lattice`, `decompose` and `verify`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 mathematical failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use num_complex::Complex64;

use crate::engine::{
    self, interior_grid, layer_bound, prefix_sweep, reconstruct_partial, reconstruction_error,
    ConvergenceReport, DecomposeOptions, Decomposition, RunStatus, M2,
};
use crate::error::{Error, Result};
use crate::io::{
    num, parse_function, parse_space, read_json, write_csv, write_json, write_report_csv,
};
use crate::lattice::{
    build_h1_schedule, build_hp_schedule, build_weighted_schedule, default_radii, density_upper,
    dyadic_grid, point_counts, LatticeSchedule, LayerKind, LayerOptions,
};
use crate::series::SpaceSpec;

/// Amplification above which the prefix sweep flags a step.
pub const AMPLIFICATION_WARN: f64 = 10.0;

#[derive(Parser, Debug)]
#[command(
    name = "kernelrepr",
    version,
    about = "Representing series over reproducing kernels"
)]
struct Cli {
    /// Worker threads for the per-layer sums (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a node schedule and its density report.
    Lattice(LatticeArgs),
    /// Expand a function over a schedule.
    Decompose(DecomposeArgs),
    /// Recheck a stored decomposition against its function.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Hp,
    H1,
    Weighted,
}

#[derive(Args, Debug, Clone)]
struct ScheduleArgs {
    /// Density parameter M (hp and h1 schedules).
    #[arg(long = "M", default_value_t = 6.0)]
    m: f64,
    /// Number of layers; radii are 1 - 2^-k.
    #[arg(long)]
    layers: Option<usize>,
    /// Points multiplier for h1 layers.
    #[arg(long, default_value_t = 2.0)]
    c_mult: f64,
    /// Safety factor for weighted layer sizes.
    #[arg(long, default_value_t = 2.0)]
    safety: f64,
    /// Random phases from this seed instead of centered nodes.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Hp)]
    kind: KindArg,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Weighted space for `--kind weighted` (dirichlet, bergman:a, hardy, table:file).
    #[arg(long)]
    space: Option<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    /// Preset (geom(c), poly(a0,a1,..), expz, powerlaw(s[,D])) or series JSON file.
    #[arg(long)]
    function: String,
    /// h2, hp:p, h1, diskalg, dirichlet, hardy, bergman:alpha or table:file.
    #[arg(long, default_value = "h2")]
    space: String,
    /// Schedule JSON; overrides the generator flags.
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[command(flatten)]
    gen: ScheduleArgs,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Allowed dilation error per step (default 0.05 for H^p, 0.25 otherwise).
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 10)]
    max_layers: usize,
    #[arg(long, default_value_t = 1 << 22)]
    max_degree: usize,
    /// Cut points per layer for the prefix sweep; 0 skips it.
    #[arg(long, default_value_t = 32)]
    prefix_samples: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    decomposition: PathBuf,
    #[arg(long)]
    function: String,
    /// Expected space; a different tag in the file is a failure.
    #[arg(long)]
    space: Option<String>,
    /// Probe points fill the disk of this radius.
    #[arg(long, default_value_t = 0.9)]
    grid: f64,
    #[arg(long, default_value_t = 32)]
    prefix_samples: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(
        env_logger::Env::default().filter_or("KERNELREPR_LOG", "warn"),
    )
    .format_timestamp(None)
    .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}"))),
        },
        None => dispatch(cli.command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ContractionFailure { .. }
        | Error::ScheduleExhausted { .. }
        | Error::DegreeLimit { .. }
        | Error::Nonconvergent { .. } => 2,
        _ => 1,
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Lattice(a) => cmd_lattice(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

fn layer_options(seed: Option<u64>) -> LayerOptions {
    seed.map_or_else(LayerOptions::default, LayerOptions::random)
}

fn default_layers(kind: LayerKind) -> usize {
    match kind {
        LayerKind::Hp => 20,
        LayerKind::H1 => 12,
        LayerKind::Weighted => 10,
    }
}

fn build_schedule(
    kind: LayerKind,
    a: &ScheduleArgs,
    space: Option<&SpaceSpec>,
) -> Result<LatticeSchedule> {
    let radii = default_radii(a.layers.unwrap_or_else(|| default_layers(kind)));
    let opts = layer_options(a.seed);
    if kind != LayerKind::Weighted && a.m < M2 / 2.0 {
        warn!(
            "M = {} is below M2/2 = {:.4}; the one-step bound no longer guarantees contraction",
            a.m,
            M2 / 2.0
        );
    }
    match kind {
        LayerKind::Hp => build_hp_schedule(a.m, &radii, &opts),
        LayerKind::H1 => build_h1_schedule(a.m, a.c_mult, &radii, &opts),
        LayerKind::Weighted => match space {
            Some(SpaceSpec::WeightedH2 { weight }) => build_weighted_schedule(weight, &radii, a.safety, &opts),
            _ => Err(Error::InvalidArgument(
                "weighted schedules need a weighted --space (dirichlet, bergman:a, hardy, table:file)".into(),
            )),
        },
    }
}

// Weighted and H^1 layers are far denser than H^p ones, so a deep layer is
// expensive; a looser dilation keeps the chosen layers shallow.
fn default_delta(kind: LayerKind) -> f64 {
    match kind {
        LayerKind::Hp => 0.05,
        LayerKind::H1 | LayerKind::Weighted => 0.25,
    }
}

fn kind_for(space: &SpaceSpec) -> LayerKind {
    match space {
        SpaceSpec::WeightedH2 { .. } => LayerKind::Weighted,
        s if s.needs_multiplicity() => LayerKind::H1,
        _ => LayerKind::Hp,
    }
}

fn cmd_lattice(a: LatticeArgs) -> Result<i32> {
    let kind = match a.kind {
        KindArg::Hp => LayerKind::Hp,
        KindArg::H1 => LayerKind::H1,
        KindArg::Weighted => LayerKind::Weighted,
    };
    let space = a.space.as_deref().map(parse_space).transpose()?;
    let schedule = build_schedule(kind, &a.schedule, space.as_ref())?;
    out_dir(&a.out_dir)?;
    write_json(&a.out_dir.join("schedule.json"), &schedule)?;

    let octaves = schedule.len() + 2;
    let grid = dyadic_grid(octaves, 16);
    let counts = point_counts(&schedule, &grid);
    let rows: Vec<Vec<String>> = grid
        .iter()
        .zip(&counts)
        .map(|(r, c)| vec![num(*r), c.to_string(), num((1.0 - r) * *c as f64)])
        .collect();
    write_csv(
        &a.out_dir.join("density.csv"),
        &["r", "count", "density"],
        &rows,
    )?;
    let peak = density_upper(&schedule, &grid)?;
    println!(
        "{} layers, {} points, density proxy {:.4}",
        schedule.len(),
        schedule.total_points(),
        peak
    );
    Ok(0)
}

fn cmd_decompose(a: DecomposeArgs) -> Result<i32> {
    let f = parse_function(&a.function)?;
    let space = parse_space(&a.space)?;
    let schedule = match &a.schedule {
        Some(path) => read_json::<LatticeSchedule>(path)?,
        None => build_schedule(kind_for(&space), &a.gen, Some(&space))?,
    };
    let opts = DecomposeOptions {
        tol: a.tol,
        delta: a.delta.unwrap_or_else(|| default_delta(kind_for(&space))),
        max_layers: a.max_layers,
        max_degree: a.max_degree,
        prefix_samples: a.prefix_samples,
        ..Default::default()
    };
    let run = engine::run(&f, &space, &schedule, &opts)?;
    out_dir(&a.out_dir)?;
    write_json(&a.out_dir.join("decomposition.json"), &run.decomposition)?;
    write_json(&a.out_dir.join("report.json"), &run.report)?;
    write_report_csv(&a.out_dir.join("report.csv"), &run.report)?;

    let r = &run.report;
    println!(
        "{}: {} steps, {} atoms, residual {:.3e} of input, reconstruction error {:.3e}",
        r.space,
        r.accepted().count(),
        run.decomposition.len(),
        r.final_ratio(),
        r.reconstruction_error
    );
    match &r.status {
        RunStatus::Converged => Ok(0),
        RunStatus::MaxLayers => {
            eprintln!(
                "stopped after {} layers without reaching tol = {}",
                a.max_layers, a.tol
            );
            Ok(2)
        }
        other => {
            if let Some(e) = other.clone().into_error() {
                eprintln!("error: {e}");
            }
            Ok(2)
        }
    }
}

const VERIFY_COLUMNS: [&str; 6] = ["check", "step", "layer", "measured", "bound", "status"];

fn verify_row(
    check: &str,
    step: Option<usize>,
    layer: Option<usize>,
    measured: f64,
    bound: Option<f64>,
    ok: bool,
) -> Vec<String> {
    vec![
        check.to_string(),
        step.map_or(String::new(), |s| s.to_string()),
        layer.map_or(String::new(), |l| l.to_string()),
        num(measured),
        bound.map_or(String::new(), num),
        if ok { "ok".into() } else { "warn".into() },
    ]
}

/// Everything `verify` measures, as CSV rows.
pub fn verify_rows(
    d: &Decomposition,
    f: &crate::series::PowerSeries,
    grid: f64,
    samples: usize,
) -> Result<Vec<Vec<String>>> {
    if !(grid > 0.0 && grid < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "grid radius must lie in (0, 1), got {grid}"
        )));
    }
    let mut rows = Vec::new();
    let scale = grid / 0.9;
    let points: Vec<Complex64> = interior_grid().into_iter().map(|z| z * scale).collect();
    let recon = reconstruction_error(d, f, &points)?;
    rows.push(verify_row(
        "reconstruction_error",
        None,
        None,
        recon,
        None,
        recon.is_finite(),
    ));

    if samples > 0 {
        for p in prefix_sweep(d, samples)? {
            let ok = p.amplification.is_finite() && p.amplification <= AMPLIFICATION_WARN;
            if !ok {
                warn!(
                    "step {} (layer {}): prefix amplification {:.3e}",
                    p.step, p.layer, p.amplification
                );
            }
            rows.push(verify_row(
                "prefix_amplification",
                Some(p.step),
                Some(p.layer),
                p.amplification,
                Some(AMPLIFICATION_WARN),
                ok,
            ));
        }
    }

    // residual chain rebuilt from the stored atoms
    let degree = d.degree().max(f.degree());
    let f_full = f.resized(degree);
    let mut prev_sum = crate::series::PowerSeries::zero(degree);
    for (i, s) in d.steps.iter().enumerate() {
        let end = (s.first_atom + s.atom_count).min(d.len());
        let sum = reconstruct_partial(d, end, degree)?;
        let entering = &f_full - &prev_sum;
        let entering_norm = d.space.measure(&entering)?;
        let layer = d.schedule.layer(s.layer).ok_or_else(|| {
            Error::Format(format!("step {i} refers to missing layer {}", s.layer))
        })?;
        let step_sum = &sum - &prev_sum;
        let disc = d
            .space
            .measure(&(&entering.dilate(s.dilation_radius)? - &step_sum))?
            / entering_norm;
        let bound = layer_bound(layer, &d.space)?;
        rows.push(verify_row(
            "discretization",
            Some(i),
            Some(s.layer),
            disc,
            Some(bound),
            disc <= bound,
        ));
        let after = d.space.measure(&(&f_full - &sum))?;
        let ratio = after / entering_norm;
        rows.push(verify_row(
            "contraction",
            Some(i),
            Some(s.layer),
            ratio,
            Some(1.0),
            ratio < 1.0,
        ));
        prev_sum = sum;
    }
    Ok(rows)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let d: Decomposition = read_json(&a.decomposition)?;
    let f = parse_function(&a.function)?;
    if let Some(spec) = &a.space {
        let expected = parse_space(spec)?;
        if expected.tag() != d.space.tag() {
            eprintln!(
                "error: space mismatch: decomposition is {}, expected {}",
                d.space.tag(),
                expected.tag()
            );
            return Ok(2);
        }
    }
    let rows = verify_rows(&d, &f, a.grid, a.prefix_samples)?;
    out_dir(&a.out_dir)?;
    write_csv(&a.out_dir.join("verify.csv"), &VERIFY_COLUMNS, &rows)?;
    let warnings = rows.iter().filter(|r| r[5] == "warn").count();
    info!("{} rows, {} warnings", rows.len(), warnings);
    println!(
        "reconstruction error {}, {} warning rows",
        rows[0][3], warnings
    );
    Ok(0)
}

/// Reads a report written by `decompose`.
pub fn read_report(path: &Path) -> Result<ConvergenceReport> {
    read_json(path)
}
