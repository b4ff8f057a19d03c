//! Truncated Taylor series on the unit disk and the exact-in-coefficient
//! operations the decomposition is built from.
//!
//! A [`PowerSeries`] stores `a_0, ..., a_D` together with a certified bound on
//! the `l^1` norm of the discarded tail, so the bound also controls every
//! boundary norm of the tail (H^p for any p, and the sup norm). Kernels,
//! dilations, arc integrals and the `F_rho` transform all have closed
//! coefficient formulas; boundary sampling is only needed for H^p norms and
//! the sup norm.

use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{scaled_sup, WeightSequence};
use crate::error::{Error, Result};
use crate::fourier;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Truncated power series `sum_{n <= D} a_n z^n` with a tail certificate.
///
/// JSON form: `{"coeffs": [[re, im], ...], "tail_bound": x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson")]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    tail_bound: f64,
}

#[derive(Deserialize)]
struct SeriesJson {
    coeffs: Vec<Complex64>,
    #[serde(default)]
    tail_bound: f64,
}

impl TryFrom<SeriesJson> for PowerSeries {
    type Error = Error;
    fn try_from(raw: SeriesJson) -> Result<Self> {
        PowerSeries::with_tail(raw.coeffs, raw.tail_bound)
    }
}

impl PowerSeries {
    /// Exact polynomial with the given coefficients (`tail_bound = 0`).
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::with_tail(coeffs, 0.0)
    }

    pub fn with_tail(coeffs: Vec<Complex64>, tail_bound: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a series needs at least one coefficient".into(),
            ));
        }
        if !(tail_bound.is_finite() && tail_bound >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tail bound must be finite and >= 0, got {tail_bound}"
            )));
        }
        if let Some(n) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidArgument(format!(
                "coefficient {n} is not finite"
            )));
        }
        Ok(PowerSeries { coeffs, tail_bound })
    }

    pub fn zero(degree: usize) -> Self {
        PowerSeries {
            coeffs: vec![ZERO; degree + 1],
            tail_bound: 0.0,
        }
    }

    /// `c z^n`.
    pub fn monomial(n: usize, c: Complex64) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[n] = c;
        s
    }

    /// Real coefficients `a_n = f(n)` for `n <= degree`.
    pub fn from_real_fn(degree: usize, f: impl Fn(usize) -> f64) -> Self {
        PowerSeries {
            coeffs: (0..=degree).map(|n| Complex64::new(f(n), 0.0)).collect(),
            tail_bound: 0.0,
        }
    }

    /// `a_n = c^n`, truncated where the geometric tail `|c|^(D+1)/(1-|c|)` drops
    /// below `tail_target`, with that tail recorded.
    pub fn geometric(c: Complex64, tail_target: f64) -> Result<Self> {
        let m = c.norm();
        if m >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "geometric ratio must satisfy |c| < 1, got {m}"
            )));
        }
        let degree = if m == 0.0 {
            0
        } else {
            let d = ((tail_target * (1.0 - m)).ln() / m.ln()).ceil();
            (d.max(1.0) as usize).saturating_sub(1)
        };
        let coeffs = (0..=degree).map(|n| c.powu(n as u32)).collect();
        Self::with_tail(coeffs, geometric_tail(m, degree))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn is_zero(&self) -> bool {
        self.tail_bound == 0.0 && self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// `sum_n a_n z^n` by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, a| acc * z + a)
    }

    /// `f_r(z) = f(rz)` for `0 < r <= 1`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidDilation(r));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * int_pow(r, n))
            .collect();
        Ok(PowerSeries {
            coeffs,
            tail_bound: self.tail_bound * int_pow(r, self.degree() + 1),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            tail_bound: self.tail_bound * c.norm(),
        }
    }

    /// Pads with zeros or truncates to `degree`; truncation moves the dropped
    /// coefficients' `l^1` mass into the tail bound.
    pub fn resized(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        let mut tail = self.tail_bound;
        if degree < self.degree() {
            tail += coeffs[degree + 1..].iter().map(|c| c.norm()).sum::<f64>();
        }
        coeffs.resize(degree + 1, ZERO);
        PowerSeries {
            coeffs,
            tail_bound: tail,
        }
    }

    /// Coefficient `l^2` norm, equal to the H^2 norm of the truncated series.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sqrt(sum |a_n|^2 beta_n)`.
    pub fn beta_norm(&self, weight: &WeightSequence) -> Result<f64> {
        let betas = weight.values(self.coeffs.len())?;
        Ok(self
            .coeffs
            .iter()
            .zip(&betas)
            .map(|(c, b)| c.norm_sqr() * b)
            .sum::<f64>()
            .sqrt())
    }

    /// Values on the uniform boundary grid `e^{2 pi i m / G}`.
    pub fn boundary_values(&self, grid_size: usize) -> Result<Vec<Complex64>> {
        check_grid(grid_size, self.degree())?;
        Ok(fourier::boundary_values(&self.coeffs, grid_size))
    }

    /// Norm of the truncated series in `space`.
    ///
    /// H^p and the disk algebra are evaluated on a uniform boundary grid of
    /// `grid_size` points (a power of two, at least `2(D+1)`); the weighted
    /// norm is read off the coefficients and ignores `grid_size`.
    pub fn norm(&self, space: &SpaceSpec, grid_size: usize) -> Result<f64> {
        space.check()?;
        match space {
            SpaceSpec::HardyP { p } => {
                let values = self.boundary_values(grid_size)?;
                let mean = values.iter().map(|v| v.norm().powf(*p)).sum::<f64>() / grid_size as f64;
                Ok(mean.powf(1.0 / p))
            }
            SpaceSpec::DiskAlgebra => {
                let values = self.boundary_values(grid_size)?;
                Ok(values.iter().fold(0.0, |m, v| m.max(v.norm())))
            }
            SpaceSpec::WeightedH2 { weight } => self.beta_norm(weight),
        }
    }

    /// `int_I f dm` against normalized Lebesgue measure, exact from the coefficients.
    pub fn arc_integral(&self, arc: &Arc) -> Complex64 {
        let (lo, hi) = (arc.theta_lo(), arc.theta_hi());
        let mut acc = self.coeffs[0] * ((hi - lo) / (2.0 * PI));
        for (n, a) in self.coeffs.iter().enumerate().skip(1) {
            let nf = n as f64;
            let diff = Complex64::from_polar(1.0, nf * hi) - Complex64::from_polar(1.0, nf * lo);
            acc += a * diff / Complex64::new(0.0, 2.0 * PI * nf);
        }
        acc
    }
}

/// `x^n` by repeated squaring, exact for powers of two.
fn int_pow(x: f64, n: usize) -> f64 {
    match i32::try_from(n) {
        Ok(n) => x.powi(n),
        Err(_) => (n as f64 * x.ln()).exp(),
    }
}

fn geometric_tail(modulus: f64, degree: usize) -> f64 {
    if modulus == 0.0 {
        0.0
    } else {
        ((degree + 1) as f64 * modulus.ln()).exp() / (1.0 - modulus)
    }
}

fn check_grid(grid: usize, degree: usize) -> Result<()> {
    let required = 2 * (degree + 1);
    if grid < required || !grid.is_power_of_two() {
        return Err(Error::UnderResolvedGrid {
            grid,
            degree,
            required: required.next_power_of_two(),
        });
    }
    Ok(())
}

/// Smallest power of two `>= 8(D+1)`.
pub fn default_grid_size(degree: usize) -> usize {
    (8 * (degree + 1)).next_power_of_two()
}

fn combine(a: &PowerSeries, b: &PowerSeries, sign: f64) -> PowerSeries {
    let len = a.coeffs.len().max(b.coeffs.len());
    let mut coeffs = Vec::with_capacity(len);
    for n in 0..len {
        let x = a.coeffs.get(n).copied().unwrap_or(ZERO);
        let y = b.coeffs.get(n).copied().unwrap_or(ZERO);
        coeffs.push(x + y * sign);
    }
    PowerSeries {
        coeffs,
        tail_bound: a.tail_bound + b.tail_bound,
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        combine(self, rhs, -1.0)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Closed arc `{e^{i theta}: theta_lo <= theta <= theta_hi}` of the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    theta_lo: f64,
    theta_hi: f64,
}

impl Arc {
    /// Arc between two angles; `theta_hi` is unwrapped so that `0 < theta_hi - theta_lo <= 2 pi`.
    pub fn new(theta_lo: f64, theta_hi: f64) -> Result<Self> {
        if !(theta_lo.is_finite() && theta_hi.is_finite()) {
            return Err(Error::InvalidArgument(
                "arc endpoints must be finite".into(),
            ));
        }
        let lo = theta_lo.rem_euclid(2.0 * PI);
        let mut len = theta_hi - theta_lo;
        if len <= 0.0 || len > 2.0 * PI {
            len = len.rem_euclid(2.0 * PI);
            if len == 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "degenerate arc [{theta_lo}, {theta_hi}]"
                )));
            }
        }
        Ok(Arc {
            theta_lo: lo,
            theta_hi: lo + len,
        })
    }

    /// `I_j = [(2j-1) pi/N, (2j+1) pi/N]`, the arc of length `2 pi/N` centred at `e^{2 pi i j/N}`.
    pub fn centered(j: usize, n_arcs: usize) -> Self {
        let n = n_arcs as f64;
        let lo = (2.0 * j as f64 - 1.0) * PI / n;
        Arc {
            theta_lo: lo,
            theta_hi: lo + 2.0 * PI / n,
        }
    }

    pub fn theta_lo(&self) -> f64 {
        self.theta_lo
    }

    pub fn theta_hi(&self) -> f64 {
        self.theta_hi
    }

    /// Length divided by `2 pi`, in `(0, 1]`.
    pub fn normalized_length(&self) -> f64 {
        (self.theta_hi - self.theta_lo) / (2.0 * PI)
    }

    /// Whether `theta` lies strictly inside the arc.
    pub fn contains_open(&self, theta: f64) -> bool {
        let t = (theta - self.theta_lo).rem_euclid(2.0 * PI);
        t > 0.0 && t < self.theta_hi - self.theta_lo
    }
}

/// The function space a decomposition is measured in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// H^p, `1 <= p < infinity`.
    HardyP { p: f64 },
    /// The disk algebra with the sup norm.
    DiskAlgebra,
    /// The weighted Hardy space of `weight`.
    WeightedH2 { weight: WeightSequence },
}

impl SpaceSpec {
    pub fn hardy(p: f64) -> Result<Self> {
        let s = SpaceSpec::HardyP { p };
        s.check()?;
        Ok(s)
    }

    pub fn h2() -> Self {
        SpaceSpec::HardyP { p: 2.0 }
    }

    pub fn weighted(weight: WeightSequence) -> Result<Self> {
        weight.check()?;
        Ok(SpaceSpec::WeightedH2 { weight })
    }

    pub fn check(&self) -> Result<()> {
        match self {
            SpaceSpec::HardyP { p } if !(p.is_finite() && *p >= 1.0) => Err(
                Error::InvalidArgument(format!("H^p needs 1 <= p < infinity, got {p}")),
            ),
            SpaceSpec::WeightedH2 { weight } => weight.check(),
            _ => Ok(()),
        }
    }

    /// Tag in the command-line space syntax.
    pub fn tag(&self) -> String {
        match self {
            SpaceSpec::HardyP { p } if *p == 2.0 => "h2".into(),
            SpaceSpec::HardyP { p } if *p == 1.0 => "h1".into(),
            SpaceSpec::HardyP { p } => format!("hp:{p}"),
            SpaceSpec::DiskAlgebra => "diskalg".into(),
            SpaceSpec::WeightedH2 { weight } => weight.tag(),
        }
    }

    /// Whether steps in this space use the multiplicity (log-dense) construction.
    pub fn needs_multiplicity(&self) -> bool {
        matches!(self, SpaceSpec::DiskAlgebra)
            || matches!(self, SpaceSpec::HardyP { p } if *p == 1.0)
    }

    /// Norm used by the decomposition loop: `norm` on the default grid,
    /// except H^2, which uses the coefficient `l^2` norm (equal by Parseval).
    pub fn measure(&self, f: &PowerSeries) -> Result<f64> {
        match self {
            SpaceSpec::HardyP { p } if *p == 2.0 => Ok(f.l2_norm()),
            SpaceSpec::WeightedH2 { weight } => f.beta_norm(weight),
            _ => f.norm(self, default_grid_size(f.degree())),
        }
    }
}

fn check_node(lambda: Complex64) -> Result<f64> {
    let m = lambda.norm();
    if m.is_finite() && m < 1.0 {
        Ok(m)
    } else {
        Err(Error::NodeOutsideDisk(m))
    }
}

/// Taylor coefficients of the Cauchy kernel `1/(1 - conj(lambda) z)` up to `degree`.
pub fn cauchy_kernel_series(lambda: Complex64, degree: usize) -> Result<PowerSeries> {
    let m = check_node(lambda)?;
    let step = lambda.conj();
    let coeffs = (0..=degree).map(|n| step.powu(n as u32)).collect();
    PowerSeries::with_tail(coeffs, geometric_tail(m, degree))
}

const MAX_EXPLICIT_TAIL: usize = 1_000_000;

/// Bound on `sum_{n > degree} m^n / beta_n`, the `l^1` mass of a weighted
/// kernel's discarded tail at a node of modulus `m`.
pub fn kernel_tail(weight: &WeightSequence, m: f64, degree: usize) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    let table_len = match weight {
        WeightSequence::Table { table } => table.len(),
        _ => 0,
    };
    let mut n = degree + 1;
    let mut u = (n as f64 * m.ln() - weight.beta(n).ln()).exp();
    let mut sum = 0.0;
    // explicit terms while a table is still varying
    while n < table_len {
        sum += u;
        u *= m / weight.step_ratio(n);
        n += 1;
    }
    // Bergman term ratios fall toward m from above and may start >= 1
    let cap = n + MAX_EXPLICIT_TAIL;
    while m / weight.step_ratio(n) >= 1.0 && m < 1.0 && n < cap {
        sum += u;
        u *= m / weight.step_ratio(n);
        n += 1;
    }
    // the presets have monotone step ratios, so the current one bounds the rest
    let q = (m / weight.step_ratio(n)).max(m);
    if q >= 1.0 {
        return Err(Error::Nonconvergent {
            what: "kernel tail",
            terms: n,
        });
    }
    Ok(sum + u / (1.0 - q))
}

/// Taylor coefficients `conj(lambda)^n / beta_n` of the reproducing kernel of the weighted space.
pub fn beta_kernel_series(
    lambda: Complex64,
    weight: &WeightSequence,
    degree: usize,
) -> Result<PowerSeries> {
    let m = check_node(lambda)?;
    let betas = weight.values(degree + 1)?;
    let step = lambda.conj();
    let coeffs = (0..=degree)
        .map(|n| step.powu(n as u32) / betas[n])
        .collect();
    PowerSeries::with_tail(coeffs, kernel_tail(weight, m, degree)?)
}

/// `F_rho(z) = sum a_n beta_n rho^n z^n`.
pub fn f_rho_transform(f: &PowerSeries, weight: &WeightSequence, rho: f64) -> Result<PowerSeries> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rho must lie in (0,1), got {rho}"
        )));
    }
    let betas = weight.values(f.coeffs().len())?;
    let ln_rho = rho.ln();
    let mut coeffs = Vec::with_capacity(betas.len());
    for (n, (a, b)) in f.coeffs().iter().zip(&betas).enumerate() {
        let factor = b * (n as f64 * ln_rho).exp();
        if !factor.is_finite() {
            return Err(Error::DegenerateWeight {
                index: n,
                reason: format!("beta_n rho^n overflows at rho = {rho}"),
            });
        }
        coeffs.push(a * factor);
    }
    let tail = if f.tail_bound() == 0.0 {
        0.0
    } else {
        f.tail_bound() * scaled_sup(weight, rho, f.degree() + 1)?
    };
    PowerSeries::with_tail(coeffs, tail)
}

/// `|<f, K_lambda>_beta - f(lambda)|`: the inner product with the kernel is
/// formed with the weights in place and compared with Horner evaluation.
pub fn reproducing_check(
    f: &PowerSeries,
    weight: &WeightSequence,
    lambda: Complex64,
) -> Result<f64> {
    let kernel = beta_kernel_series(lambda, weight, f.degree())?;
    let betas = weight.values(f.coeffs().len())?;
    let inner: Complex64 = f
        .coeffs()
        .iter()
        .zip(kernel.coeffs())
        .zip(&betas)
        .map(|((a, k), b)| a * b * k.conj())
        .sum();
    Ok((inner - f.eval(lambda)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let one = PowerSeries::new(vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(one.eval(c(0.3, 0.4)), c(1.0, 0.0));
        let z = PowerSeries::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(z.eval(c(0.5, 0.0)), c(0.5, 0.0));
        let g = PowerSeries::from_real_fn(200, |n| 0.7f64.powi(n as i32));
        let v = g.eval(c(0.5, 0.0));
        assert!((v - c(1.0 / (1.0 - 0.35), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dilate_examples() {
        let f = PowerSeries::from_real_fn(10, |n| 1.0 / (n as f64 + 1.0));
        assert_eq!(f.dilate(1.0).unwrap(), f);
        let cube = PowerSeries::monomial(3, c(1.0, 0.0));
        let d = cube.dilate(0.5).unwrap();
        assert_eq!(
            d.coeffs(),
            &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.125, 0.0)]
        );
        assert!(f.dilate(0.0).is_err());
        assert!(f.dilate(1.5).is_err());
        assert!(f.dilate(-0.5).is_err());

        let g = PowerSeries::from_real_fn(300, |n| 0.9f64.powi(n as i32));
        let gd = g.dilate(0.9).unwrap();
        for (n, a) in gd.coeffs().iter().enumerate() {
            assert!((a.re - 0.81f64.powi(n as i32)).abs() < 1e-14);
        }
        for m in 0..16 {
            let z = Complex64::from_polar(0.95, m as f64 * PI / 8.0);
            assert!((gd.eval(z) - g.eval(z * 0.9)).norm() < 1e-12);
        }
    }

    #[test]
    fn dilate_scales_tail() {
        let f = PowerSeries::with_tail(vec![c(1.0, 0.0); 4], 1.0).unwrap();
        let d = f.dilate(0.5).unwrap();
        assert!((d.tail_bound() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        let z5 = PowerSeries::monomial(5, c(1.0, 0.0));
        assert!((z5.norm(&SpaceSpec::h2(), 64).unwrap() - 1.0).abs() < 1e-14);
        let f = PowerSeries::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((f.norm(&SpaceSpec::h2(), 16).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let z3 = PowerSeries::monomial(3, c(1.0, 0.0));
        let dir = SpaceSpec::weighted(WeightSequence::Dirichlet).unwrap();
        assert!((z3.norm(&dir, 0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn norm_rejects_bad_grids() {
        let f = PowerSeries::zero(10);
        assert!(matches!(
            f.norm(&SpaceSpec::h2(), 16),
            Err(Error::UnderResolvedGrid { .. })
        ));
        assert!(matches!(
            f.norm(&SpaceSpec::h2(), 24),
            Err(Error::UnderResolvedGrid { .. })
        ));
        assert!(f.norm(&SpaceSpec::h2(), 32).is_ok());
        assert!(f.norm(&SpaceSpec::HardyP { p: 0.5 }, 32).is_err());
        assert_eq!(default_grid_size(10), 128);
    }

    #[test]
    fn disk_algebra_norm_of_one_plus_z() {
        let f = PowerSeries::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((f.norm(&SpaceSpec::DiskAlgebra, 64).unwrap() - 2.0).abs() < 1e-14);
        // H^1 norm of 1+z is 4/pi; the grid rule is spectrally accurate
        let h1 = f.norm(&SpaceSpec::HardyP { p: 1.0 }, 1 << 14).unwrap();
        assert!((h1 - 4.0 / PI).abs() < 1e-7);
    }

    #[test]
    fn arc_integral_examples() {
        let one = PowerSeries::new(vec![c(1.0, 0.0)]).unwrap();
        for n in [1usize, 3, 12, 100] {
            let v = one.arc_integral(&Arc::centered(0, n));
            assert!((v - c(1.0 / n as f64, 0.0)).norm() < 1e-15);
        }
        let z = PowerSeries::monomial(1, c(1.0, 0.0));
        let arc = Arc::new(-PI / 8.0, PI / 8.0).unwrap();
        let v = z.arc_integral(&arc);
        // composite Simpson on the arc as an independent route
        let steps = 2000;
        let h = (PI / 4.0) / steps as f64;
        let mut acc = c(0.0, 0.0);
        for i in 0..=steps {
            let t = -PI / 8.0 + i as f64 * h;
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += Complex64::from_polar(1.0, t) * w;
        }
        let simpson = acc * h / 3.0 / (2.0 * PI);
        assert!((v - simpson).norm() < 1e-12);
        assert!((v.re - (PI / 8.0).sin() / PI).abs() < 1e-15);
        assert!((v.re - 0.121_812).abs() < 1e-6);
    }

    #[test]
    fn arc_integrals_telescope() {
        let f = PowerSeries::from_real_fn(40, |n| ((n * 7 % 11) as f64 - 5.0) / (n as f64 + 1.0));
        for n in [1usize, 2, 7, 48] {
            let total: Complex64 = (0..n).map(|j| f.arc_integral(&Arc::centered(j, n))).sum();
            assert!((total - f.coeffs()[0]).norm() < 1e-13);
        }
    }

    #[test]
    fn fft_arc_integrals_match_direct() {
        let f = PowerSeries::from_real_fn(90, |n| {
            0.93f64.powi(n as i32) * if n % 3 == 0 { -1.0 } else { 1.0 }
        });
        for n in [1usize, 5, 16, 37, 200] {
            let fast = fourier::uniform_arc_integrals(f.coeffs(), n);
            for (j, w) in fast.iter().enumerate() {
                let direct = f.arc_integral(&Arc::centered(j, n));
                assert!((w - direct).norm() < 1e-13, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn arc_normalization() {
        let a = Arc::new(3.0 * PI / 2.0, 5.0 * PI / 2.0).unwrap();
        assert!((a.normalized_length() - 0.5).abs() < 1e-15);
        let full = Arc::new(0.0, 2.0 * PI).unwrap();
        assert_eq!(full.normalized_length(), 1.0);
        assert!(Arc::new(1.0, 1.0).is_err());
        assert!(Arc::centered(0, 8).contains_open(0.1));
        assert!(Arc::centered(0, 8).contains_open(-0.1));
        assert!(!Arc::centered(0, 8).contains_open(PI / 8.0));
    }

    #[test]
    fn kernel_examples() {
        let k0 = cauchy_kernel_series(c(0.0, 0.0), 5).unwrap();
        assert_eq!(k0.coeffs()[0], c(1.0, 0.0));
        assert!(k0.coeffs()[1..].iter().all(|x| x.norm() == 0.0));
        assert_eq!(k0.tail_bound(), 0.0);

        let k = cauchy_kernel_series(c(0.5, 0.0), 60).unwrap();
        let v = k.eval(c(0.5, 0.0));
        assert!((v - c(4.0 / 3.0, 0.0)).norm() <= k.tail_bound() + 1e-15);

        let ki = cauchy_kernel_series(c(0.0, 0.5), 4).unwrap();
        assert!((ki.coeffs()[2] - c(-0.25, 0.0)).norm() < 1e-16);

        assert!(matches!(
            cauchy_kernel_series(c(1.0, 0.0), 4),
            Err(Error::NodeOutsideDisk(_))
        ));
        assert!(beta_kernel_series(c(0.0, 1.1), &WeightSequence::Dirichlet, 4).is_err());
    }

    #[test]
    fn beta_kernel_examples() {
        let lambda = c(0.3, -0.2);
        let h = beta_kernel_series(lambda, &WeightSequence::Hardy, 30).unwrap();
        let k = cauchy_kernel_series(lambda, 30).unwrap();
        for (a, b) in h.coeffs().iter().zip(k.coeffs()) {
            assert!((a - b).norm() < 1e-16);
        }
        let w = WeightSequence::bergman(0.5).unwrap();
        let b0 = beta_kernel_series(c(0.0, 0.0), &w, 3).unwrap();
        assert!((b0.coeffs()[0] - c(1.0 / w.beta(0), 0.0)).norm() < 1e-16);
        let d = beta_kernel_series(c(0.5, 0.0), &WeightSequence::Dirichlet, 5).unwrap();
        assert!((d.coeffs()[3] - c(0.03125, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn f_rho_examples() {
        let f = PowerSeries::from_real_fn(12, |n| 1.0 / (1.0 + n as f64));
        let hardy = f_rho_transform(&f, &WeightSequence::Hardy, 0.6).unwrap();
        let dil = f.dilate(0.6).unwrap();
        for (a, b) in hardy.coeffs().iter().zip(dil.coeffs()) {
            assert!((a - b).norm() < 1e-16);
        }
        let z2 = PowerSeries::monomial(2, c(1.0, 0.0));
        let t = f_rho_transform(&z2, &WeightSequence::Dirichlet, 0.5).unwrap();
        assert!((t.coeffs()[2] - c(0.75, 0.0)).norm() < 1e-16);
        assert!(f_rho_transform(&f, &WeightSequence::Hardy, 1.0).is_err());
    }

    #[test]
    fn reproducing_examples() {
        let one = PowerSeries::new(vec![c(1.0, 0.0)]).unwrap();
        assert!(reproducing_check(&one, &WeightSequence::Dirichlet, c(0.4, 0.4)).unwrap() < 1e-16);
        let z4 = PowerSeries::monomial(4, c(1.0, 0.0));
        assert!(reproducing_check(&z4, &WeightSequence::Dirichlet, c(0.3, 0.0)).unwrap() < 1e-14);
    }

    #[test]
    fn resize_moves_mass_into_tail() {
        let f = PowerSeries::new(vec![c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0)]).unwrap();
        let t = f.resized(0);
        assert_eq!(t.degree(), 0);
        assert!((t.tail_bound() - 5.0).abs() < 1e-15);
        let p = f.resized(5);
        assert_eq!(p.degree(), 5);
        assert_eq!(p.tail_bound(), 0.0);
    }

    #[test]
    fn geometric_preset_truncates() {
        let g = PowerSeries::geometric(c(0.7, 0.0), 1e-16).unwrap();
        assert!(g.tail_bound() < 1e-16);
        assert!(g.tail_bound() > 0.0);
        let exact = 1.0 / (1.0 - 0.7 * 0.3);
        assert!((g.eval(c(0.3, 0.0)).re - exact).abs() < 1e-15 * exact + g.tail_bound());
        assert!(PowerSeries::geometric(c(1.0, 0.0), 1e-16).is_err());
    }

    #[test]
    fn arithmetic_adds_tails() {
        let a = PowerSeries::with_tail(vec![c(1.0, 0.0)], 0.25).unwrap();
        let b = PowerSeries::with_tail(vec![c(0.0, 0.0), c(2.0, 0.0)], 0.5).unwrap();
        let s = &a + &b;
        assert_eq!(s.degree(), 1);
        assert_eq!(s.tail_bound(), 0.75);
        let d = &a - &b;
        assert_eq!(d.coeffs()[1], c(-2.0, 0.0));
        assert_eq!(d.tail_bound(), 0.75);
    }
}
