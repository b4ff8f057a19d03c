use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{KernelAtom, KernelKind};
use crate::analysis::{omega1, omega2, WeightSequence};
use crate::error::{Error, Result};
use crate::fourier::{accumulate_ring, uniform_arc_integrals, RingOffsets};
use crate::lattice::{LatticeLayer, LatticeSchedule, LayerKind};
use crate::series::{kernel_tail, PowerSeries, SpaceSpec};

/// `M_2 = pi sqrt(pi^2 + 1)`, the constant of the one-step discretization bound.
pub const M2: f64 = 10.357542924607737;

/// Result of one discretization step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub atoms: Vec<KernelAtom>,
    /// `f - S`, where `S` is the kernel sum of the atoms.
    pub residual: PowerSeries,
    /// `|f - S| / |f|`.
    pub ratio: f64,
    /// `|f_r - S| / |f|`.
    pub discretization_ratio: f64,
    pub dilation_radius: f64,
    pub input_norm: f64,
}

/// `M_2 / (n (1 - r^2))` for the layer's outer circle: the relative bound on
/// `|f_r - S|_p` for a single-circle layer.
pub fn discretization_error_bound(layer: &LatticeLayer) -> f64 {
    let r = layer.radius();
    M2 / (layer.n_points() as f64 * (1.0 - r * r))
}

/// `pi sqrt(omega1(R) omega2(R)) / N`, the leading term of the weighted
/// one-step estimate with `|zeta - zeta_j| <= pi / N` made explicit.
pub fn weighted_error_bound(layer: &LatticeLayer, weight: &WeightSequence) -> Result<f64> {
    let r = layer.radius();
    Ok(PI * (omega1(weight, r)? * omega2(weight, r)?).sqrt() / layer.n_points() as f64)
}

/// Step bound appropriate to the layer kind.
pub fn layer_bound(layer: &LatticeLayer, space: &SpaceSpec) -> Result<f64> {
    match space {
        SpaceSpec::WeightedH2 { weight } => weighted_error_bound(layer, weight),
        _ => Ok(discretization_error_bound(layer)),
    }
}

/// Radius the step dilates by: the layer radius, or `R_{k,1}^2` for weighted layers.
pub fn dilation_radius(layer: &LatticeLayer) -> f64 {
    match layer.kind() {
        LayerKind::Weighted => layer.inner_radius() * layer.inner_radius(),
        _ => layer.radius(),
    }
}

/// Whether a schedule of this kind can carry steps in `space`.
pub fn check_compatible(schedule: &LatticeSchedule, space: &SpaceSpec) -> Result<()> {
    space.check()?;
    let ok = match (schedule.kind(), space) {
        (LayerKind::Hp, SpaceSpec::HardyP { p }) => *p > 1.0,
        (LayerKind::H1, s) => s.needs_multiplicity(),
        (LayerKind::Weighted, SpaceSpec::WeightedH2 { weight }) => {
            schedule.weight().is_none_or(|w| w == weight)
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "a {} schedule cannot be used in space {}",
            schedule.kind().tag(),
            space.tag()
        )))
    }
}

/// Smallest layer index `k >= start` with `|f - f_r| <= delta |f|`, where `r` is
/// the layer's dilation radius.
pub fn select_layer(
    f: &PowerSeries,
    schedule: &LatticeSchedule,
    delta: f64,
    space: &SpaceSpec,
    start: usize,
) -> Result<usize> {
    select_layer_with_error(f, schedule, delta, space, start).map(|(k, _)| k)
}

pub(crate) fn select_layer_with_error(
    f: &PowerSeries,
    schedule: &LatticeSchedule,
    delta: f64,
    space: &SpaceSpec,
    start: usize,
) -> Result<(usize, f64)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let norm = space.measure(f)?;
    if norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    for (k, layer) in schedule.layers().iter().enumerate().skip(start) {
        let diff = f - &f.dilate(dilation_radius(layer))?;
        let err = space.measure(&diff)?;
        if err <= delta * norm {
            return Ok((k, err / norm));
        }
    }
    Err(Error::ScheduleExhausted { start })
}

/// Weight sequence whose kernels the space uses.
pub(crate) fn kernel_weight(space: &SpaceSpec) -> WeightSequence {
    match space {
        SpaceSpec::WeightedH2 { weight } => weight.clone(),
        _ => WeightSequence::Hardy,
    }
}

/// Smallest `D <= cap` whose kernel tail at `radius` is below `eps`; the error
/// carries an estimate of the degree actually needed.
pub(crate) fn truncation_degree(
    weight: &WeightSequence,
    radius: f64,
    eps: f64,
    cap: usize,
) -> std::result::Result<usize, usize> {
    let ok = |d: usize| {
        kernel_tail(weight, radius, d)
            .map(|t| t < eps)
            .unwrap_or(false)
    };
    if !ok(cap) {
        let mut d = cap;
        while !ok(d) && d < usize::MAX / 4 {
            d *= 2;
        }
        return Err(d);
    }
    let (mut lo, mut hi) = (0usize, cap);
    if ok(0) {
        return Ok(0);
    }
    // invariant: !ok(lo), ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Coefficients of `sum_l sum_j w_{l,j} / (1 - conj(node) z)`, i.e. the kernel
/// sum before the `1/beta_n` division.
pub(crate) fn synthesize(
    layer: &LatticeLayer,
    rings: &[Vec<Complex64>],
    offsets: &[RingOffsets],
    len: usize,
) -> Vec<Complex64> {
    let ring = |l: usize| {
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        accumulate_ring(&rings[l], layer.ring_radius(l), &offsets[l], &mut buf);
        buf
    };
    if rings.len() == 1 {
        return ring(0);
    }
    // ordered sum keeps results independent of the thread count
    let parts: Vec<Vec<Complex64>> = (0..rings.len()).into_par_iter().map(ring).collect();
    let mut total = vec![Complex64::new(0.0, 0.0); len];
    for part in parts {
        for (x, y) in total.iter_mut().zip(&part) {
            *x += y;
        }
    }
    total
}

/// Divides by `beta_n` and attaches the tail bound of the truncated kernels.
pub(crate) fn finish_sum(
    mut coeffs: Vec<Complex64>,
    weight: &WeightSequence,
    layer: &LatticeLayer,
    rings: &[Vec<Complex64>],
) -> Result<PowerSeries> {
    let degree = coeffs.len() - 1;
    if *weight != WeightSequence::Hardy {
        let betas = weight.values(coeffs.len())?;
        for (c, b) in coeffs.iter_mut().zip(&betas) {
            *c /= b;
        }
    }
    let mut tail = 0.0;
    for (l, ring) in rings.iter().enumerate() {
        let mass: f64 = ring.iter().map(|w| w.norm()).sum();
        if mass > 0.0 {
            tail += mass * kernel_tail(weight, layer.ring_radius(l), degree)?;
        }
    }
    PowerSeries::with_tail(coeffs, tail)
}

fn atoms_of(
    layer: &LatticeLayer,
    rings: &[Vec<Complex64>],
    offsets: &[RingOffsets],
    kind: KernelKind,
) -> Vec<KernelAtom> {
    let n = layer.n_points();
    let mut atoms = Vec::with_capacity(layer.total_points());
    for (l, (ring, off)) in rings.iter().zip(offsets).enumerate() {
        let radius = layer.ring_radius(l);
        for (j, w) in ring.iter().enumerate() {
            atoms.push(KernelAtom {
                node: Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64 + off.angle(j)),
                weight: *w,
                kernel: kind,
                layer: layer.index(),
                l,
                j,
            });
        }
    }
    atoms
}

/// Shared body of the three step rules; `f` is already at the working degree.
pub(crate) fn run_step(
    f: &PowerSeries,
    layer: &LatticeLayer,
    space: &SpaceSpec,
    r: f64,
) -> Result<StepOutcome> {
    let input_norm = space.measure(f)?;
    if input_norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let n = layer.n_points();
    let m = layer.multiplicity();
    let weight = kernel_weight(space);
    let offsets = layer.ring_offsets();
    let rings: Vec<Vec<Complex64>> = match layer.kind() {
        LayerKind::Hp => vec![uniform_arc_integrals(f.coeffs(), n)],
        LayerKind::H1 => {
            let inv = 1.0 / m as f64;
            let c: Vec<Complex64> = uniform_arc_integrals(f.coeffs(), n)
                .into_iter()
                .map(|x| x * inv)
                .collect();
            vec![c; m]
        }
        LayerKind::Weighted => {
            let betas = weight.values(f.coeffs().len())?;
            let inv = 1.0 / m as f64;
            (0..m)
                .into_par_iter()
                .map(|l| {
                    // arc integrals of F_{r/R_l}
                    let ln_t = (r / layer.ring_radius(l)).ln();
                    let transformed: Vec<Complex64> = f
                        .coeffs()
                        .iter()
                        .zip(&betas)
                        .enumerate()
                        .map(|(k, (a, b))| a * (b * (k as f64 * ln_t).exp()))
                        .collect();
                    uniform_arc_integrals(&transformed, n)
                        .into_iter()
                        .map(|x| x * inv)
                        .collect()
                })
                .collect()
        }
    };
    let raw = synthesize(layer, &rings, &offsets, f.coeffs().len());
    let sum = finish_sum(raw, &weight, layer, &rings)?;
    let residual = f - &sum;
    let ratio = space.measure(&residual)? / input_norm;
    let discretization_ratio = space.measure(&(&f.dilate(r)? - &sum))? / input_norm;
    let kind = match space {
        SpaceSpec::WeightedH2 { .. } => KernelKind::Beta,
        _ => KernelKind::Cauchy,
    };
    Ok(StepOutcome {
        atoms: atoms_of(layer, &rings, &offsets, kind),
        residual,
        ratio,
        discretization_ratio,
        dilation_radius: r,
        input_norm,
    })
}

/// One step in H^p, `1 < p < infinity`: atom `j` has weight `int_{I_j} f dm` and node `r_k zeta_j`.
pub fn hp_step(f: &PowerSeries, layer: &LatticeLayer, p: f64) -> Result<StepOutcome> {
    if layer.kind() != LayerKind::Hp {
        return Err(Error::IncompatibleLayer {
            layer: layer.index(),
            reason: format!("{} layer given to the H^p step", layer.kind().tag()),
        });
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "the H^p step needs 1 < p < infinity, got {p}; use h1_step for H^1"
        )));
    }
    run_step(f, layer, &SpaceSpec::HardyP { p }, layer.radius())
}

/// One step in H^1 or the disk algebra: each of the `M_k` nodes in arc `j`
/// carries `(1/M_k) int_{I_j} f dm`.
pub fn h1_step(f: &PowerSeries, layer: &LatticeLayer, space: &SpaceSpec) -> Result<StepOutcome> {
    if layer.kind() != LayerKind::H1 {
        return Err(Error::IncompatibleLayer {
            layer: layer.index(),
            reason: format!("{} layer given to the H^1 step", layer.kind().tag()),
        });
    }
    if !space.needs_multiplicity() {
        return Err(Error::InvalidArgument(format!(
            "h1_step works in h1 or diskalg, not {}",
            space.tag()
        )));
    }
    run_step(f, layer, space, layer.radius())
}

/// One step in a weighted space: node `w_{l,j}` carries
/// `(1/M_k) int_{I_j} F_{r/R_l} dm`, so the kernel sum approximates `f(rz)`.
pub fn weighted_step(
    f: &PowerSeries,
    layer: &LatticeLayer,
    weight: &WeightSequence,
    r: f64,
) -> Result<StepOutcome> {
    if layer.kind() != LayerKind::Weighted {
        return Err(Error::IncompatibleLayer {
            layer: layer.index(),
            reason: format!("{} layer given to the weighted step", layer.kind().tag()),
        });
    }
    let limit = layer.inner_radius() * layer.inner_radius();
    if !(r > 0.0 && r <= limit) {
        return Err(Error::InvalidDilation(r));
    }
    run_step(
        f,
        layer,
        &SpaceSpec::WeightedH2 {
            weight: weight.clone(),
        },
        r,
    )
}
