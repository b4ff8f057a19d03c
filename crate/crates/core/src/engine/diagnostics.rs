use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::step::{finish_sum, kernel_weight};
use super::{Decomposition, KernelAtom, KernelKind};
use crate::error::{Error, Result};
use crate::fourier::accumulate_ring;
use crate::lattice::LatticeLayer;
use crate::series::{PowerSeries, SpaceSpec};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Weights of one layer's atoms arranged as `rings[l][j]`.
struct LayerWeights {
    rings: Vec<Vec<Complex64>>,
}

impl LayerWeights {
    fn collect(layer: &LatticeLayer, atoms: &[KernelAtom]) -> Result<Self> {
        let mut rings = vec![vec![ZERO; layer.n_points()]; layer.multiplicity()];
        for a in atoms {
            let slot = rings
                .get_mut(a.l)
                .and_then(|r| r.get_mut(a.j))
                .ok_or_else(|| {
                    Error::Format(format!(
                        "atom (layer {}, l {}, j {}) does not fit a layer of {} x {} points",
                        a.layer,
                        a.l,
                        a.j,
                        layer.multiplicity(),
                        layer.n_points()
                    ))
                })?;
            *slot += a.weight;
        }
        Ok(LayerWeights { rings })
    }
}

/// Splits atoms into runs that share a layer, in order of appearance.
fn layer_runs(atoms: &[KernelAtom]) -> Vec<&[KernelAtom]> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=atoms.len() {
        if i == atoms.len() || atoms[i].layer != atoms[start].layer {
            if i > start {
                runs.push(&atoms[start..i]);
            }
            start = i;
        }
    }
    runs
}

fn schedule_layer(d: &Decomposition, index: usize) -> Result<&LatticeLayer> {
    d.schedule.layer(index).ok_or_else(|| {
        Error::Format(format!(
            "atom refers to layer {index}, which the schedule lacks"
        ))
    })
}

/// Sum of the first `n_terms` atoms, in series order, truncated at `degree`.
pub fn reconstruct_partial(
    d: &Decomposition,
    n_terms: usize,
    degree: usize,
) -> Result<PowerSeries> {
    if n_terms > d.atoms.len() {
        return Err(Error::InvalidArgument(format!(
            "asked for {n_terms} terms of a {}-term decomposition",
            d.atoms.len()
        )));
    }
    let weight = kernel_weight(&d.space);
    let mut total = PowerSeries::zero(degree);
    for run in layer_runs(&d.atoms[..n_terms]) {
        let layer = schedule_layer(d, run[0].layer)?;
        let w = LayerWeights::collect(layer, run)?;
        let offsets = layer.ring_offsets();
        let mut raw = vec![ZERO; degree + 1];
        for (l, ring) in w.rings.iter().enumerate() {
            accumulate_ring(ring, layer.ring_radius(l), &offsets[l], &mut raw);
        }
        total = &total + &finish_sum(raw, &weight, layer, &w.rings)?;
    }
    Ok(total)
}

/// Largest within-layer partial sum of one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixStat {
    pub step: usize,
    pub layer: usize,
    /// Prefix lengths that were evaluated.
    pub cuts: usize,
    pub max_norm: f64,
    /// `max_norm` over the norm of the residual entering the step.
    pub amplification: f64,
}

fn cut_points(total: usize, ring: usize, samples: usize) -> Vec<usize> {
    if total <= 2 * samples {
        return (1..=total).collect();
    }
    let mut cuts: Vec<usize> = (1..=samples)
        .map(|i| (i * total).div_ceil(samples))
        .collect();
    cuts.extend((1..=total / ring).map(|l| l * ring));
    cuts.sort_unstable();
    cuts.dedup();
    cuts
}

/// Norms of within-layer partial sums in series order.
///
/// For every step the atoms of its layer are summed ring by ring, arc by arc;
/// about `samples` prefix lengths plus every ring boundary are measured in
/// the decomposition's space (all prefixes when the layer is small).
pub fn prefix_sweep(d: &Decomposition, samples: usize) -> Result<Vec<PrefixStat>> {
    let samples = samples.max(1);
    let weight = kernel_weight(&d.space);
    let runs = layer_runs(&d.atoms);
    let mut out = Vec::with_capacity(d.steps.len());
    for (step, record) in d.steps.iter().enumerate() {
        let Some(run) = runs.iter().find(|r| r[0].layer == record.layer) else {
            continue;
        };
        let layer = schedule_layer(d, record.layer)?;
        let w = LayerWeights::collect(layer, run)?;
        let offsets = layer.ring_offsets();
        let n = layer.n_points();
        let len = record.degree + 1;
        let cuts = cut_points(layer.total_points(), n, samples);
        let mut full = vec![ZERO; len];
        let mut max_norm: f64 = 0.0;
        let mut next = 0usize;
        for (l, ring) in w.rings.iter().enumerate() {
            let radius = layer.ring_radius(l);
            let inside: Vec<usize> = cuts
                .iter()
                .skip(next)
                .take_while(|&&t| t <= (l + 1) * n)
                .map(|&t| t - l * n)
                .collect();
            next += inside.len();
            let norms: Vec<f64> = inside
                .par_iter()
                .filter(|&&j0| j0 < n)
                .map(|&j0| {
                    let mut buf = full.clone();
                    let mut masked = ring.clone();
                    masked[j0..].fill(ZERO);
                    accumulate_ring(&masked, radius, &offsets[l], &mut buf);
                    measure_raw(buf, &weight, layer, &d.space)
                })
                .collect::<Result<_>>()?;
            max_norm = norms.into_iter().fold(max_norm, f64::max);
            accumulate_ring(ring, radius, &offsets[l], &mut full);
            if inside.last() == Some(&n) {
                max_norm = max_norm.max(measure_raw(full.clone(), &weight, layer, &d.space)?);
            }
        }
        let entering = d.residual_norms.get(step).copied().unwrap_or(f64::NAN);
        out.push(PrefixStat {
            step,
            layer: record.layer,
            cuts: cuts.len(),
            max_norm,
            amplification: max_norm / entering,
        });
    }
    Ok(out)
}

fn measure_raw(
    raw: Vec<Complex64>,
    weight: &crate::analysis::WeightSequence,
    layer: &LatticeLayer,
    space: &SpaceSpec,
) -> Result<f64> {
    space.measure(&finish_sum(raw, weight, layer, &[])?)
}

/// 64 probe points: 8 circles of radius `0.1125 i`, `i = 1..=8`, with 8 angles each.
pub fn interior_grid() -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(64);
    for i in 1..=8 {
        let r = 0.9 * i as f64 / 8.0;
        let shift = if i % 2 == 0 { PI / 8.0 } else { 0.0 };
        for j in 0..8 {
            pts.push(Complex64::from_polar(r, shift + 2.0 * PI * j as f64 / 8.0));
        }
    }
    pts
}

/// `max_z |f(z) - sum_atoms w K_node(z)|` with the kernels in closed form.
pub fn reconstruction_error(
    d: &Decomposition,
    f: &PowerSeries,
    points: &[Complex64],
) -> Result<f64> {
    let weight = kernel_weight(&d.space);
    let one = Complex64::new(1.0, 0.0);
    let errs: Vec<f64> = points
        .par_iter()
        .map(|&z| {
            let sum: Complex64 = d
                .atoms
                .iter()
                .map(|a| {
                    a.weight
                        * match a.kernel {
                            KernelKind::Cauchy => one / (one - a.node.conj() * z),
                            KernelKind::Beta => weight.kernel_eval(a.node, z),
                        }
                })
                .sum();
            (f.eval(z) - sum).norm()
        })
        .collect();
    Ok(errs.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_points_cover_rings() {
        assert_eq!(cut_points(5, 5, 32), vec![1, 2, 3, 4, 5]);
        let c = cut_points(1000, 250, 8);
        for b in [250, 500, 750, 1000] {
            assert!(c.contains(&b));
        }
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn grid_shape() {
        let g = interior_grid();
        assert_eq!(g.len(), 64);
        assert!(g.iter().all(|z| z.norm() <= 0.9 + 1e-15));
    }
}
