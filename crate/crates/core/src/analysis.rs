//! Weight sequences for weighted Hardy spaces, their moduli, the analytic
//! projection of boundary data, and the dilation-identity checker used to
//! validate the weighted discretization.
//!
//! A weighted Hardy space is fixed by positive numbers `beta_n`; the norm is
//! `sum |a_n|^2 beta_n` and the reproducing kernel at `lambda` has Taylor
//! coefficients `conj(lambda)^n / beta_n`. Three moduli of the weight drive the
//! weighted lattice sizing:
//!
//! * `omega1(rho) = sup_n rho^(2n) beta_n`
//! * `omega2(rho) = sum_{n>=1} n^2 rho^(2n) / beta_n`
//! * `omega3(rho) = sum_{n>=0} rho^(2n) / beta_n`, the squared norm of the kernel at `rho`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::PowerSeries;

/// Consecutive terms with a decreasing ratio required before the `omega1` scan stops.
const SCAN_STABLE_TERMS: usize = 50;
/// Hard cap on terms for any modulus scan or sum.
const SCAN_TERM_CAP: usize = 1_000_000;
/// Relative tail tolerance for the `omega2`/`omega3` sums.
const SUM_REL_TAIL: f64 = 1e-14;

/// The weight `beta = (beta_n)` of a weighted Hardy space.
///
/// Tables extend past their last entry by holding the last value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSequence {
    /// `beta_n = 1`: the Hardy space H^2.
    Hardy,
    /// `beta_n = n! Gamma(alpha+2) / Gamma(n+alpha+2)`: the Bergman space with
    /// weight `(alpha+1)(1-|z|^2)^alpha`.
    Bergman { alpha: f64 },
    /// `beta_n = n + 1`.
    Dirichlet,
    /// Explicit values, last value held for larger `n`.
    Table { table: Vec<f64> },
}

impl WeightSequence {
    pub fn bergman(alpha: f64) -> Result<Self> {
        let w = WeightSequence::Bergman { alpha };
        w.check()?;
        Ok(w)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let w = WeightSequence::Table { table: values };
        w.check()?;
        Ok(w)
    }

    /// Validates the parameters of the weight.
    pub fn check(&self) -> Result<()> {
        match self {
            WeightSequence::Hardy | WeightSequence::Dirichlet => Ok(()),
            WeightSequence::Bergman { alpha } => {
                if alpha.is_finite() && *alpha > -1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "Bergman weight needs alpha > -1, got {alpha}"
                    )))
                }
            }
            WeightSequence::Table { table } => {
                if table.is_empty() {
                    return Err(Error::InvalidArgument("empty weight table".into()));
                }
                match table.iter().position(|b| !(b.is_finite() && *b > 0.0)) {
                    Some(index) => Err(Error::DegenerateWeight {
                        index,
                        reason: format!(
                            "table value {} is not a positive finite number",
                            table[index]
                        ),
                    }),
                    None => Ok(()),
                }
            }
        }
    }

    /// Short tag used in file names and the space flag.
    pub fn tag(&self) -> String {
        match self {
            WeightSequence::Hardy => "hardy".into(),
            WeightSequence::Bergman { alpha } => format!("bergman:{alpha}"),
            WeightSequence::Dirichlet => "dirichlet".into(),
            WeightSequence::Table { .. } => "table".into(),
        }
    }

    /// `beta_n` for a single index.
    pub fn beta(&self, n: usize) -> f64 {
        match self {
            WeightSequence::Hardy => 1.0,
            WeightSequence::Dirichlet => n as f64 + 1.0,
            WeightSequence::Bergman { alpha } => {
                (1..=n).fold(1.0, |b, m| b * m as f64 / (m as f64 + alpha + 1.0))
            }
            WeightSequence::Table { table } => table[n.min(table.len() - 1)],
        }
    }

    /// `beta_{n+1} / beta_n`.
    pub fn step_ratio(&self, n: usize) -> f64 {
        match self {
            WeightSequence::Hardy => 1.0,
            WeightSequence::Dirichlet => (n as f64 + 2.0) / (n as f64 + 1.0),
            WeightSequence::Bergman { alpha } => (n as f64 + 1.0) / (n as f64 + alpha + 2.0),
            WeightSequence::Table { table } => {
                let last = table.len() - 1;
                table[(n + 1).min(last)] / table[n.min(last)]
            }
        }
    }

    /// `beta_0, ..., beta_{len-1}`, rejecting non-finite or non-positive values.
    pub fn values(&self, len: usize) -> Result<Vec<f64>> {
        self.check()?;
        let values: Vec<f64> = match self {
            WeightSequence::Hardy => vec![1.0; len],
            WeightSequence::Dirichlet => (0..len).map(|n| n as f64 + 1.0).collect(),
            WeightSequence::Bergman { alpha } => {
                let mut out = Vec::with_capacity(len);
                let mut b = 1.0;
                for n in 0..len {
                    if n > 0 {
                        b *= n as f64 / (n as f64 + alpha + 1.0);
                    }
                    out.push(b);
                }
                out
            }
            WeightSequence::Table { table } => {
                (0..len).map(|n| table[n.min(table.len() - 1)]).collect()
            }
        };
        if let Some(index) = values.iter().position(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::DegenerateWeight {
                index,
                reason: format!("beta_n = {} is not a positive finite number", values[index]),
            });
        }
        Ok(values)
    }

    /// Reproducing kernel `K_lambda(z) = sum conj(lambda)^n z^n / beta_n`,
    /// in closed form where one exists.
    pub fn kernel_eval(&self, lambda: Complex64, z: Complex64) -> Complex64 {
        let w = lambda.conj() * z;
        let one = Complex64::new(1.0, 0.0);
        match self {
            WeightSequence::Hardy => one / (one - w),
            WeightSequence::Dirichlet => {
                if w.norm() < 1e-4 {
                    // -log(1-w)/w = sum w^n/(n+1)
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut p = one;
                    for n in 0..8 {
                        acc += p / (n as f64 + 1.0);
                        p *= w;
                    }
                    acc
                } else {
                    -(one - w).ln() / w
                }
            }
            WeightSequence::Bergman { alpha } => (one - w).powf(-(alpha + 2.0)),
            WeightSequence::Table { table } => {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut p = one;
                for b in table {
                    acc += p / *b;
                    p *= w;
                }
                acc + p / (*table.last().unwrap() * (one - w))
            }
        }
    }
}

/// `sup_{n >= start} q^n beta_n` for `0 < q < 1`.
///
/// Scans until the term ratio `q beta_{n+1}/beta_n` has stayed below one for
/// a run of consecutive indices while the current term sits below the running
/// maximum.
pub fn scaled_sup(weight: &WeightSequence, q: f64, start: usize) -> Result<f64> {
    weight.check()?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "scan base must lie in (0,1), got {q}"
        )));
    }
    let table_len = match weight {
        WeightSequence::Table { table } => table.len(),
        _ => 0,
    };
    let mut term = (start as f64 * q.ln() + weight.beta(start).ln()).exp();
    let mut best = term;
    let mut stable = 0usize;
    let mut n = start;
    while n < start + SCAN_TERM_CAP {
        let ratio = q * weight.step_ratio(n);
        term *= ratio;
        n += 1;
        if term > best {
            best = term;
        }
        if ratio < 1.0 && term < best {
            stable += 1;
        } else {
            stable = 0;
        }
        if stable >= SCAN_STABLE_TERMS && n >= table_len {
            return Ok(best);
        }
    }
    Err(Error::Nonconvergent {
        what: "weight supremum scan",
        terms: SCAN_TERM_CAP,
    })
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "rho must lie in (0,1), got {rho}"
        )))
    }
}

/// `omega1(rho) = sup_n rho^(2n) beta_n`.
pub fn omega1(weight: &WeightSequence, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    scaled_sup(weight, rho * rho, 0)
}

/// Sums `sum_{n >= first} n^power rho^(2n) / beta_n` with a geometric tail bound.
fn inverse_weight_sum(
    weight: &WeightSequence,
    rho: f64,
    first: usize,
    power: i32,
    what: &'static str,
) -> Result<f64> {
    check_rho(rho)?;
    weight.check()?;
    let q = rho * rho;
    let table_len = match weight {
        WeightSequence::Table { table } => table.len(),
        _ => 0,
    };
    // u_n = q^n / beta_n
    let mut u = (first as f64 * q.ln() - weight.beta(first).ln()).exp();
    let mut sum = 0.0;
    let mut n = first;
    let cap = first + 10 * SCAN_TERM_CAP;
    while n < cap {
        let term = (n as f64).powi(power) * u;
        sum += term;
        let u_next = u * q / weight.step_ratio(n);
        let next_term = ((n + 1) as f64).powi(power) * u_next;
        let ratio = if term > 0.0 { next_term / term } else { q };
        let bound_ratio = ratio.max(q);
        if n >= table_len && n > first + 4 && bound_ratio < 1.0 {
            let tail = next_term / (1.0 - bound_ratio);
            if tail <= SUM_REL_TAIL * sum {
                return Ok(sum + next_term);
            }
        }
        u = u_next;
        n += 1;
    }
    Err(Error::Nonconvergent {
        what,
        terms: cap - first,
    })
}

/// `omega2(rho) = sum_{n>=1} n^2 rho^(2n) / beta_n`.
pub fn omega2(weight: &WeightSequence, rho: f64) -> Result<f64> {
    inverse_weight_sum(weight, rho, 1, 2, "omega2")
}

/// `omega3(rho) = sum_{n>=0} rho^(2n) / beta_n`.
pub fn omega3(weight: &WeightSequence, rho: f64) -> Result<f64> {
    inverse_weight_sum(weight, rho, 0, 0, "omega3")
}

/// Boundary data given by finitely many Fourier coefficients `g_n`, `-D <= n <= D`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFunction {
    coeffs: Vec<Complex64>,
    max_index: usize,
}

impl BoundaryFunction {
    /// `coeffs[i]` is the coefficient of `zeta^(i - max_index)`; length `2*max_index + 1`.
    pub fn new(max_index: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * max_index + 1 {
            return Err(Error::InvalidArgument(format!(
                "two-sided coefficient vector must have {} entries, got {}",
                2 * max_index + 1,
                coeffs.len()
            )));
        }
        Ok(BoundaryFunction { coeffs, max_index })
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn coefficient(&self, n: i64) -> Complex64 {
        let i = n + self.max_index as i64;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn add(&self, other: &BoundaryFunction) -> BoundaryFunction {
        let d = self.max_index.max(other.max_index);
        let coeffs = (-(d as i64)..=d as i64)
            .map(|n| self.coefficient(n) + other.coefficient(n))
            .collect();
        BoundaryFunction {
            coeffs,
            max_index: d,
        }
    }

    pub fn scale(&self, c: Complex64) -> BoundaryFunction {
        BoundaryFunction {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            max_index: self.max_index,
        }
    }

    /// Value at `e^{i theta}`.
    pub fn eval_angle(&self, theta: f64) -> Complex64 {
        (-(self.max_index as i64)..=self.max_index as i64)
            .map(|n| self.coefficient(n) * Complex64::from_polar(1.0, n as f64 * theta))
            .sum()
    }
}

impl From<&PowerSeries> for BoundaryFunction {
    fn from(f: &PowerSeries) -> Self {
        let d = f.degree();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d];
        coeffs.extend_from_slice(f.coeffs());
        BoundaryFunction {
            coeffs,
            max_index: d,
        }
    }
}

/// Cauchy transform `C g(z) = int g(zeta) / (1 - conj(zeta) z) dm(zeta)`, the
/// analytic projection: keeps `g_n` for `n >= 0`, drops the rest, truncated or
/// padded to `degree`.
pub fn cauchy_transform(g: &BoundaryFunction, degree: usize) -> PowerSeries {
    let coeffs = (0..=degree as i64).map(|n| g.coefficient(n)).collect();
    PowerSeries::new(coeffs).expect("non-empty coefficient vector")
}

/// Both routes of the dilation identity `f(rz) = int F_{r/R}(zeta) conj(K_z(R zeta)) dm(zeta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilationIdentityCheck {
    /// `max_n |a_n beta_n (r/R)^n * R^n / beta_n - a_n r^n|`.
    pub coefficient_discrepancy: f64,
    /// `max_z |quadrature(z) - f(rz)|` over the probe points.
    pub quadrature_discrepancy: f64,
}

impl DilationIdentityCheck {
    pub fn max(&self) -> f64 {
        self.coefficient_discrepancy
            .max(self.quadrature_discrepancy)
    }
}

/// Probe points for the quadrature route: a spiral inside `|z| <= 0.9`.
fn probe_points(n_probe: usize) -> Vec<Complex64> {
    (0..n_probe)
        .map(|i| {
            let t = (i as f64 + 0.5) / n_probe as f64;
            Complex64::from_polar(0.9 * t.sqrt(), 2.399_963_229_728_653 * i as f64)
        })
        .collect()
}

/// Checks the integral representation behind the weighted discretization.
///
/// The coefficient route multiplies the coefficients of `F_{r/R}` by those of
/// the kernel at radius `R`; the quadrature route integrates the product on a
/// uniform boundary grid of `grid_size` points at `n_probe` interior probes.
pub fn dilation_identity_check(
    f: &PowerSeries,
    weight: &WeightSequence,
    r: f64,
    big_r: f64,
    n_probe: usize,
    grid_size: usize,
) -> Result<DilationIdentityCheck> {
    if !(0.0 < r && r < big_r && big_r < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r < R < 1, got r = {r}, R = {big_r}"
        )));
    }
    let betas = weight.values(f.degree() + 1)?;
    let transformed = crate::series::f_rho_transform(f, weight, r / big_r)?;
    let mut coefficient_discrepancy: f64 = 0.0;
    for (n, (a, b)) in f.coeffs().iter().zip(transformed.coeffs()).enumerate() {
        let via_kernel = b * (big_r.powi(n as i32) / betas[n]);
        let direct = a * r.powi(n as i32);
        coefficient_discrepancy = coefficient_discrepancy.max((via_kernel - direct).norm());
    }

    if grid_size < 2 * (f.degree() + 1) {
        return Err(Error::UnderResolvedGrid {
            grid: grid_size,
            degree: f.degree(),
            required: 2 * (f.degree() + 1),
        });
    }
    let samples: Vec<(Complex64, Complex64)> = (0..grid_size)
        .map(|m| {
            let zeta = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * m as f64 / grid_size as f64,
            );
            (zeta, transformed.eval(zeta))
        })
        .collect();
    let dilated = f.dilate(r)?;
    let mut quadrature_discrepancy: f64 = 0.0;
    for z in probe_points(n_probe) {
        // conj(K_z(R zeta)) = K_{R zeta}(z)
        let integral: Complex64 = samples
            .iter()
            .map(|(zeta, fz)| fz * weight.kernel_eval(big_r * zeta, z))
            .sum::<Complex64>()
            / grid_size as f64;
        quadrature_discrepancy = quadrature_discrepancy.max((integral - dilated.eval(z)).norm());
    }
    Ok(DilationIdentityCheck {
        coefficient_discrepancy,
        quadrature_discrepancy,
    })
}

/// Numerical check of the growth conditions `limsup beta_n^(1/n) <= 1` and
/// `limsup (1/beta_n)^(1/n) <= 1` over the tail window `[n_max/2, n_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightReport {
    pub n_max: usize,
    pub max_root_beta: f64,
    pub max_root_inverse: f64,
    /// Set when either root stays above `1 + 1e-2` across the whole window.
    pub flagged: bool,
}

pub fn validate_weight(weight: &WeightSequence, n_max: usize) -> Result<WeightReport> {
    if n_max < 100 {
        return Err(Error::InvalidArgument(format!(
            "n_max must be >= 100, got {n_max}"
        )));
    }
    let betas = weight.values(n_max + 1)?;
    let lo = n_max / 2;
    let mut max_root_beta: f64 = 0.0;
    let mut max_root_inverse: f64 = 0.0;
    let mut min_excess = f64::INFINITY;
    for (n, b) in betas.iter().enumerate().take(n_max + 1).skip(lo.max(1)) {
        let root = (b.ln() / n as f64).exp();
        let inv = (-b.ln() / n as f64).exp();
        max_root_beta = max_root_beta.max(root);
        max_root_inverse = max_root_inverse.max(inv);
        min_excess = min_excess.min(root.max(inv));
    }
    Ok(WeightReport {
        n_max,
        max_root_beta,
        max_root_inverse,
        flagged: min_excess > 1.0 + 1e-2,
    })
}
