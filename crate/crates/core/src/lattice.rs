//! Node-point schedules for the kernel systems and the density diagnostic.
//!
//! A schedule is a list of layers. Each layer owns `N` arcs
//! `I_j = [(2j-1) pi/N, (2j+1) pi/N]` and one or more rings of nodes, one node
//! per arc on every ring:
//!
//! * `hp` layers: one ring of radius `r_k` with `n_k = ceil(M / (1 - r_k))`;
//! * `h1` layers: `M_k` rings on the same radius `R_k`, the `M_k` nodes of an
//!   arc at equispaced interior positions, giving each arc a multiplicity;
//! * `weighted` layers: `M_k` rings at radii `R_{k,1} < ... < R_{k,M_k} = R_k`.
//!
//! Points are enumerated layer by layer, then ring `l`, then arc `j`. All
//! indices are 0-based.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{omega1, omega2, omega3, WeightSequence};
use crate::error::{Error, Result};
use crate::fourier::RingOffsets;

/// `ceil`, except that values within a relative `1e-12` of an integer round to it.
pub(crate) fn tolerant_ceil(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-12 * x.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Hp,
    H1,
    Weighted,
}

impl LayerKind {
    pub fn tag(self) -> &'static str {
        match self {
            LayerKind::Hp => "hp",
            LayerKind::H1 => "h1",
            LayerKind::Weighted => "weighted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseMode {
    /// Nodes at the arc centres (`hp`, `weighted`) or at the equispaced interior positions (`h1`).
    Centered,
    /// Nodes drawn uniformly inside their open arcs; layer `i` uses stream `i` of the seed.
    Random { seed: u64 },
}

/// One layer of a schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeLayer {
    kind: LayerKind,
    index: usize,
    radii: Vec<f64>,
    n_points: usize,
    multiplicity: usize,
    phase_mode: PhaseMode,
}

impl LatticeLayer {
    /// `radii` holds one radius for `hp` and `h1` layers and `multiplicity`
    /// strictly increasing radii for `weighted` layers.
    pub fn new(
        kind: LayerKind,
        index: usize,
        radii: Vec<f64>,
        n_points: usize,
        multiplicity: usize,
        phase_mode: PhaseMode,
    ) -> Result<Self> {
        if n_points == 0 || multiplicity == 0 {
            return Err(Error::InvalidArgument(format!(
                "layer {index}: point count and multiplicity must be >= 1"
            )));
        }
        check_increasing(&radii)?;
        let expected = match kind {
            LayerKind::Hp if multiplicity != 1 => {
                return Err(Error::InvalidArgument(format!(
                    "hp layer {index} must have multiplicity 1"
                )))
            }
            LayerKind::Weighted => multiplicity,
            _ => 1,
        };
        if radii.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "{} layer {index} needs {expected} radii, got {}",
                kind.tag(),
                radii.len()
            )));
        }
        Ok(LatticeLayer {
            kind,
            index,
            radii,
            n_points,
            multiplicity,
            phase_mode,
        })
    }

    pub fn kind(&self) -> LayerKind {
        self.kind
    }

    /// Position of the layer in its schedule.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Outer radius `r_k` or `R_k`.
    pub fn radius(&self) -> f64 {
        *self.radii.last().expect("layers have at least one radius")
    }

    /// Inner radius `R_{k,1}` (equal to the outer radius for single-radius layers).
    pub fn inner_radius(&self) -> f64 {
        self.radii[0]
    }

    /// Number of arcs, i.e. points per ring.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn phase_mode(&self) -> PhaseMode {
        self.phase_mode
    }

    pub fn total_points(&self) -> usize {
        self.n_points * self.multiplicity
    }

    pub fn ring_radius(&self, l: usize) -> f64 {
        match self.kind {
            LayerKind::Weighted => self.radii[l],
            _ => self.radii[0],
        }
    }

    /// Angular offsets of every ring relative to the arc centres `2 pi j / N`.
    pub fn ring_offsets(&self) -> Vec<RingOffsets> {
        let n = self.n_points;
        let m = self.multiplicity;
        let half = PI / n as f64;
        match (self.phase_mode, self.kind) {
            (PhaseMode::Centered, LayerKind::H1) => (0..m)
                .map(|l| RingOffsets::Uniform(-half + 2.0 * half * (l + 1) as f64 / (m + 1) as f64))
                .collect(),
            (PhaseMode::Centered, _) => vec![RingOffsets::Uniform(0.0); m],
            (PhaseMode::Random { seed }, kind) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(self.index as u64);
                let mut rings = vec![Vec::with_capacity(n); m];
                let mut arc = vec![0.0; m];
                for _ in 0..n {
                    loop {
                        for x in arc.iter_mut() {
                            *x = open_unit(&mut rng) * 2.0 * half - half;
                        }
                        if kind == LayerKind::H1 {
                            arc.sort_by(f64::total_cmp);
                            if arc.windows(2).any(|w| w[0] == w[1]) {
                                continue;
                            }
                        }
                        break;
                    }
                    for (ring, x) in rings.iter_mut().zip(&arc) {
                        ring.push(*x);
                    }
                }
                rings.into_iter().map(RingOffsets::PerNode).collect()
            }
        }
    }

    /// All nodes, ring `l` outer and arc `j` inner.
    pub fn layer_points(&self) -> Vec<Complex64> {
        let n = self.n_points as f64;
        let mut out = Vec::with_capacity(self.total_points());
        for (l, offsets) in self.ring_offsets().iter().enumerate() {
            let radius = self.ring_radius(l);
            for j in 0..self.n_points {
                out.push(Complex64::from_polar(
                    radius,
                    2.0 * PI * j as f64 / n + offsets.angle(j),
                ));
            }
        }
        out
    }
}

/// Uniform draw from the open interval `(0, 1)`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn check_increasing(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidRadii("empty radius list".into()));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::InvalidRadii(format!("radius {r} outside (0, 1)")));
    }
    if let Some(w) = radii.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidRadii(format!(
            "{} is not above {}",
            w[1], w[0]
        )));
    }
    Ok(())
}

/// Options shared by the schedule builders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerOptions {
    pub phases: PhaseMode,
    /// Upper limit on the points of a single layer.
    pub point_cap: usize,
}

impl Default for LayerOptions {
    fn default() -> Self {
        LayerOptions {
            phases: PhaseMode::Centered,
            point_cap: 1 << 32,
        }
    }
}

impl LayerOptions {
    pub fn random(seed: u64) -> Self {
        LayerOptions {
            phases: PhaseMode::Random { seed },
            ..Default::default()
        }
    }
}

/// An ordered list of layers with the parameters that generated it.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSchedule {
    kind: LayerKind,
    m: Option<f64>,
    c_mult: Option<f64>,
    safety: Option<f64>,
    weight: Option<WeightSequence>,
    layers: Vec<LatticeLayer>,
}

impl LatticeSchedule {
    /// Assembles a schedule from explicit layers, checking that all radii
    /// increase across the layers so that nodes stay distinct.
    pub fn from_layers(kind: LayerKind, layers: Vec<LatticeLayer>) -> Result<Self> {
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[1].inner_radius() <= pair[0].radius() {
                return Err(Error::InvalidRadii(format!(
                    "layer {} starts at {} which is not above layer {}'s radius {}",
                    i + 1,
                    pair[1].inner_radius(),
                    i,
                    pair[0].radius()
                )));
            }
        }
        if let Some(l) = layers.iter().find(|l| l.kind != kind) {
            return Err(Error::InvalidArgument(format!(
                "layer {} is {} inside a {} schedule",
                l.index,
                l.kind.tag(),
                kind.tag()
            )));
        }
        let layers = layers
            .into_iter()
            .enumerate()
            .map(|(i, mut l)| {
                l.index = i;
                l
            })
            .collect();
        Ok(LatticeSchedule {
            kind,
            m: None,
            c_mult: None,
            safety: None,
            weight: None,
            layers,
        })
    }

    pub fn kind(&self) -> LayerKind {
        self.kind
    }

    /// The density constant `M` of `hp` and `h1` schedules.
    pub fn m(&self) -> Option<f64> {
        self.m
    }

    pub fn c_mult(&self) -> Option<f64> {
        self.c_mult
    }

    pub fn safety(&self) -> Option<f64> {
        self.safety
    }

    pub fn weight(&self) -> Option<&WeightSequence> {
        self.weight.as_ref()
    }

    pub fn layers(&self) -> &[LatticeLayer] {
        &self.layers
    }

    pub fn layer(&self, i: usize) -> Option<&LatticeLayer> {
        self.layers.get(i)
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn total_points(&self) -> usize {
        self.layers.iter().map(LatticeLayer::total_points).sum()
    }

    /// Short identifier written into decompositions.
    pub fn reference(&self) -> String {
        let mut s = format!("{}:layers={}", self.kind.tag(), self.layers.len());
        if let Some(m) = self.m {
            s.push_str(&format!(":M={m}"));
        }
        if let Some(c) = self.c_mult {
            s.push_str(&format!(":c_mult={c}"));
        }
        if let Some(w) = &self.weight {
            s.push_str(&format!(":weight={}", w.tag()));
        }
        if let Some(s2) = self.safety {
            s.push_str(&format!(":safety={s2}"));
        }
        if let Some(PhaseMode::Random { seed }) = self.layers.first().map(|l| l.phase_mode) {
            s.push_str(&format!(":seed={seed}"));
        }
        s
    }

    /// All nodes of the schedule in enumeration order.
    pub fn points(&self) -> Vec<Complex64> {
        self.layers.iter().flat_map(|l| l.layer_points()).collect()
    }
}

/// `r_k = 1 - 2^{-k}` for `k = 1..=count`.
pub fn default_radii(count: usize) -> Vec<f64> {
    (1..=count).map(|k| 1.0 - (-(k as f64)).exp2()).collect()
}

fn check_sequence(radii: &[f64]) -> Result<()> {
    check_increasing(radii)
}

fn check_cap(layer: usize, points: f64, cap: usize) -> Result<usize> {
    if !points.is_finite() || points > cap as f64 {
        return Err(Error::TooManyPoints {
            layer,
            points: if points.is_finite() {
                points as usize
            } else {
                usize::MAX
            },
            cap,
        });
    }
    Ok(points as usize)
}

/// `n_k = ceil(M / (1 - r_k))` points on the circle of radius `r_k`.
pub fn build_hp_schedule(m: f64, radii: &[f64], opts: &LayerOptions) -> Result<LatticeSchedule> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "M must be positive, got {m}"
        )));
    }
    check_sequence(radii)?;
    let mut layers = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let n = check_cap(i, tolerant_ceil(m / (1.0 - r)), opts.point_cap)?;
        layers.push(LatticeLayer::new(
            LayerKind::Hp,
            i,
            vec![r],
            n,
            1,
            opts.phases,
        )?);
    }
    Ok(LatticeSchedule {
        m: Some(m),
        ..LatticeSchedule::from_layers(LayerKind::Hp, layers)?
    })
}

/// `N_k = ceil(M / (1 - R_k))` arcs, each carrying
/// `M_k = max(1, ceil(c_mult log(1/(1-R_k))))` points on the circle of radius `R_k`.
pub fn build_h1_schedule(
    m: f64,
    c_mult: f64,
    radii: &[f64],
    opts: &LayerOptions,
) -> Result<LatticeSchedule> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "M must be positive, got {m}"
        )));
    }
    if !(c_mult.is_finite() && c_mult > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "c_mult must be positive, got {c_mult}"
        )));
    }
    check_sequence(radii)?;
    let mut layers = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let n = check_cap(i, tolerant_ceil(m / (1.0 - r)), opts.point_cap)?;
        let mult = (tolerant_ceil(c_mult * (1.0 / (1.0 - r)).ln()) as usize).max(1);
        check_cap(i, n as f64 * mult as f64, opts.point_cap)?;
        layers.push(LatticeLayer::new(
            LayerKind::H1,
            i,
            vec![r],
            n,
            mult,
            opts.phases,
        )?);
    }
    Ok(LatticeSchedule {
        m: Some(m),
        c_mult: Some(c_mult),
        ..LatticeSchedule::from_layers(LayerKind::H1, layers)?
    })
}

/// Sizes of one weighted layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedSizing {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub n_points: usize,
    pub multiplicity: usize,
}

/// `N_k = ceil(s sqrt(w1 w2) k)` and `M_k = ceil(s sqrt(w1 w3))` at radius `R_k`,
/// with `k` counted from 1.
pub fn weighted_sizing(
    weight: &WeightSequence,
    radius: f64,
    k: usize,
    safety: f64,
) -> Result<WeightedSizing> {
    let o1 = omega1(weight, radius)?;
    let o2 = omega2(weight, radius)?;
    let o3 = omega3(weight, radius)?;
    let n = tolerant_ceil(safety * (o1 * o2).sqrt() * k as f64);
    let m = tolerant_ceil(safety * (o1 * o3).sqrt());
    if !(n.is_finite() && m.is_finite()) {
        return Err(Error::DegenerateWeight {
            index: 0,
            reason: format!("weight moduli overflow at radius {radius}"),
        });
    }
    Ok(WeightedSizing {
        omega1: o1,
        omega2: o2,
        omega3: o3,
        n_points: (n as usize).max(1),
        multiplicity: (m as usize).max(1),
    })
}

/// Weighted layers at the given outer radii `R_k`, with inner radii
/// `R_{k,l} = R_k - (M_k - l) eps_k`, `eps_k = (1 - R_k) / (2 M_k)`.
pub fn build_weighted_schedule(
    weight: &WeightSequence,
    radii: &[f64],
    safety: f64,
    opts: &LayerOptions,
) -> Result<LatticeSchedule> {
    if !(safety.is_finite() && safety >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "safety must be >= 1, got {safety}"
        )));
    }
    weight.check()?;
    check_sequence(radii)?;
    let mut layers = Vec::with_capacity(radii.len());
    for (i, &big_r) in radii.iter().enumerate() {
        let sizing = weighted_sizing(weight, big_r, i + 1, safety).map_err(|e| match e {
            Error::Nonconvergent { .. } | Error::DegenerateWeight { .. } => {
                Error::InvalidRadii(format!(
                    "radius {big_r} is too close to 1 for the {} weight: {e}",
                    weight.tag()
                ))
            }
            other => other,
        })?;
        check_cap(
            i,
            sizing.n_points as f64 * sizing.multiplicity as f64,
            opts.point_cap,
        )?;
        let m = sizing.multiplicity;
        let eps = (1.0 - big_r) / (2.0 * m as f64);
        // l = 1..=M in the 1-based convention
        let ring_radii: Vec<f64> = (1..=m).map(|l| big_r - (m - l) as f64 * eps).collect();
        layers.push(LatticeLayer::new(
            LayerKind::Weighted,
            i,
            ring_radii,
            sizing.n_points,
            m,
            opts.phases,
        )?);
    }
    Ok(LatticeSchedule {
        safety: Some(safety),
        weight: Some(weight.clone()),
        ..LatticeSchedule::from_layers(LayerKind::Weighted, layers)?
    })
}

/// `#{lambda in schedule : |lambda| < r}` for each `r`, counted from the layer radii.
pub fn point_counts(schedule: &LatticeSchedule, r_grid: &[f64]) -> Vec<usize> {
    r_grid
        .iter()
        .map(|&r| {
            schedule
                .layers
                .iter()
                .map(|layer| match layer.kind {
                    LayerKind::Weighted => {
                        layer.radii.iter().filter(|&&x| x < r).count() * layer.n_points
                    }
                    _ if layer.radius() < r => layer.total_points(),
                    _ => 0,
                })
                .sum()
        })
        .collect()
}

/// Finite-grid proxy `max_r (1 - r) #(Lambda ∩ {|z| < r})` for the upper density
/// `D+ = limsup_{r -> 1} (1 - r) #(Lambda ∩ {|z| < r})`.
///
/// The limsup itself is not computable from finitely many layers; the proxy
/// only sees radii in `r_grid`, and grid points beyond the last layer see a
/// count that no longer grows.
pub fn density_upper(schedule: &LatticeSchedule, r_grid: &[f64]) -> Result<f64> {
    if r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(Error::InvalidArgument(
            "r_grid must increase inside (0, 1)".into(),
        ));
    }
    Ok(point_counts(schedule, r_grid)
        .into_iter()
        .zip(r_grid)
        .map(|(c, r)| (1.0 - r) * c as f64)
        .fold(0.0, f64::max))
}

/// Grid `1 - 2^{-i/per_octave}` for `i = 1..=octaves*per_octave`.
pub fn dyadic_grid(octaves: usize, per_octave: usize) -> Vec<f64> {
    (1..=octaves * per_octave)
        .map(|i| 1.0 - (-(i as f64) / per_octave as f64).exp2())
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RadiusJson {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
struct LayerJson {
    r: RadiusJson,
    n: usize,
    mult: usize,
    phases: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    kind: LayerKind,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_mult: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    safety: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<WeightSequence>,
    layers: Vec<LayerJson>,
}

impl Serialize for LatticeSchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let layers = self
            .layers
            .iter()
            .map(|l| LayerJson {
                r: if l.kind == LayerKind::Weighted {
                    RadiusJson::Many(l.radii.clone())
                } else {
                    RadiusJson::One(l.radius())
                },
                n: l.n_points,
                mult: l.multiplicity,
                phases: match l.phase_mode {
                    PhaseMode::Centered => "centered".into(),
                    PhaseMode::Random { .. } => "random".into(),
                },
                seed: match l.phase_mode {
                    PhaseMode::Centered => None,
                    PhaseMode::Random { seed } => Some(seed),
                },
            })
            .collect();
        ScheduleJson {
            kind: self.kind,
            m: self.m,
            c_mult: self.c_mult,
            safety: self.safety,
            weight: self.weight.clone(),
            layers,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ScheduleJson::deserialize(d)?;
        let mut layers = Vec::with_capacity(raw.layers.len());
        for (i, l) in raw.layers.into_iter().enumerate() {
            let phase_mode = match (l.phases.as_str(), l.seed) {
                ("centered", _) => PhaseMode::Centered,
                ("random", Some(seed)) => PhaseMode::Random { seed },
                ("random", None) => {
                    return Err(D::Error::custom(format!(
                        "layer {i}: random phases need a seed"
                    )))
                }
                (other, _) => {
                    return Err(D::Error::custom(format!(
                        "layer {i}: unknown phase mode {other:?}"
                    )))
                }
            };
            let radii = match l.r {
                RadiusJson::One(r) => vec![r],
                RadiusJson::Many(v) => v,
            };
            layers.push(
                LatticeLayer::new(raw.kind, i, radii, l.n, l.mult, phase_mode)
                    .map_err(D::Error::custom)?,
            );
        }
        let base = LatticeSchedule::from_layers(raw.kind, layers).map_err(D::Error::custom)?;
        if raw.kind == LayerKind::Weighted && raw.weight.is_none() {
            return Err(D::Error::custom(
                "weighted schedules need a \"weight\" entry",
            ));
        }
        Ok(LatticeSchedule {
            m: raw.m,
            c_mult: raw.c_mult,
            safety: raw.safety,
            weight: raw.weight,
            ..base
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn hp_sizes() {
        let s = build_hp_schedule(6.0, &default_radii(3), &LayerOptions::default()).unwrap();
        let n: Vec<usize> = s.layers().iter().map(|l| l.n_points()).collect();
        assert_eq!(n, vec![12, 24, 48]);
        for l in s.layers() {
            assert!(l.n_points() as f64 * (1.0 - l.radius()) >= 6.0);
        }
    }

    #[test]
    fn hp_first_layer_points() {
        let s = build_hp_schedule(6.0, &[0.5, 0.75], &LayerOptions::default()).unwrap();
        let pts = s.layers()[0].layer_points();
        assert_eq!(pts.len(), 12);
        for (j, p) in pts.iter().enumerate() {
            assert!(close(
                *p,
                Complex64::from_polar(0.5, 2.0 * PI * j as f64 / 12.0)
            ));
        }
    }

    #[test]
    fn layer_point_examples() {
        let l = LatticeLayer::new(LayerKind::Hp, 0, vec![0.5], 4, 1, PhaseMode::Centered).unwrap();
        let p = l.layer_points();
        let want = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        for (a, b) in p.iter().zip(want) {
            assert!(close(*a, b));
        }
        let w = LatticeLayer::new(
            LayerKind::Weighted,
            0,
            vec![0.8, 0.9],
            2,
            2,
            PhaseMode::Centered,
        )
        .unwrap();
        let p = w.layer_points();
        let want = [c(0.8, 0.0), c(-0.8, 0.0), c(0.9, 0.0), c(-0.9, 0.0)];
        for (a, b) in p.iter().zip(want) {
            assert!(close(*a, b));
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_radii() {
        let o = LayerOptions::default();
        assert!(matches!(
            build_hp_schedule(6.0, &[0.5, 0.4], &o),
            Err(Error::InvalidRadii(_))
        ));
        assert!(build_hp_schedule(6.0, &[0.5, 1.0], &o).is_err());
        assert!(build_hp_schedule(0.0, &[0.5], &o).is_err());
        let capped = LayerOptions {
            point_cap: 100,
            ..o
        };
        assert!(matches!(
            build_hp_schedule(6.0, &default_radii(6), &capped),
            Err(Error::TooManyPoints { layer: 4, .. })
        ));
    }

    #[test]
    fn h1_multiplicity() {
        let radii: Vec<f64> = (1..=6).map(|k| 1.0 - (-(k as f64)).exp()).collect();
        let s = build_h1_schedule(6.0, 1.0, &radii, &LayerOptions::default()).unwrap();
        for (k, l) in s.layers().iter().enumerate() {
            assert_eq!(l.multiplicity(), k + 1);
        }
        let s = build_h1_schedule(6.0, 1.0, &[0.5], &LayerOptions::default()).unwrap();
        assert_eq!(s.layers()[0].multiplicity(), 1);
    }

    #[test]
    fn h1_points_distinct_and_inside_arcs() {
        for opts in [LayerOptions::default(), LayerOptions::random(7)] {
            let s = build_h1_schedule(6.0, 2.0, &default_radii(4), &opts).unwrap();
            let mut all = s.points();
            let expect: usize = s
                .layers()
                .iter()
                .map(|l| l.n_points() * l.multiplicity())
                .sum();
            assert_eq!(all.len(), expect);
            all.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            assert!(all.windows(2).all(|w| w[0] != w[1]));
            for layer in s.layers() {
                let n = layer.n_points();
                for (l, off) in layer.ring_offsets().iter().enumerate() {
                    for j in 0..n {
                        let x = off.angle(j);
                        assert!(x.abs() < PI / n as f64, "ring {l} arc {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn random_phases_are_deterministic() {
        let a = build_hp_schedule(6.0, &default_radii(3), &LayerOptions::random(11)).unwrap();
        let b = build_hp_schedule(6.0, &default_radii(3), &LayerOptions::random(11)).unwrap();
        let c2 = build_hp_schedule(6.0, &default_radii(3), &LayerOptions::random(12)).unwrap();
        assert_eq!(a.points(), b.points());
        assert_ne!(a.points(), c2.points());
    }

    #[test]
    fn weighted_hardy_reduction() {
        let s = build_weighted_schedule(
            &WeightSequence::Hardy,
            &default_radii(5),
            2.0,
            &LayerOptions::default(),
        )
        .unwrap();
        for layer in s.layers() {
            let r = layer.radius();
            // M_k = ceil(2 / sqrt(1 - r^2)) for the Hardy weight
            let want = tolerant_ceil(2.0 / (1.0 - r * r).sqrt()) as usize;
            assert_eq!(layer.multiplicity(), want);
            assert!(layer.radii().windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*layer.radii().last().unwrap(), r);
        }
        for pair in s.layers().windows(2) {
            assert!(pair[1].inner_radius() > pair[0].radius());
        }
    }

    #[test]
    fn weighted_conditions_hold() {
        let w = WeightSequence::Dirichlet;
        let s =
            build_weighted_schedule(&w, &default_radii(7), 2.0, &LayerOptions::default()).unwrap();
        let mut prev = f64::INFINITY;
        for layer in s.layers() {
            let r = layer.radius();
            let (o1, o2, o3) = (
                omega1(&w, r).unwrap(),
                omega2(&w, r).unwrap(),
                omega3(&w, r).unwrap(),
            );
            let m = layer.multiplicity() as f64;
            assert!(o1 * o3 <= 4.0 * m * m);
            let q = o1 * o2 / (layer.n_points() as f64).powi(2);
            assert!(q < prev);
            prev = q;
        }
    }

    #[test]
    fn density_examples() {
        let empty = LatticeSchedule::from_layers(LayerKind::Hp, vec![]).unwrap();
        assert_eq!(density_upper(&empty, &[0.5, 0.9]).unwrap(), 0.0);
        let one = LatticeSchedule::from_layers(
            LayerKind::Hp,
            vec![
                LatticeLayer::new(LayerKind::Hp, 0, vec![0.5], 12, 1, PhaseMode::Centered).unwrap(),
            ],
        )
        .unwrap();
        assert!((density_upper(&one, &[0.9]).unwrap() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn density_counts_match_points() {
        let s = build_h1_schedule(6.0, 1.5, &default_radii(5), &LayerOptions::default()).unwrap();
        // offset from the layer radii so that rounding of |p| cannot matter
        let grid: Vec<f64> = (1..24)
            .map(|i| 1.0 - (-(i as f64 + 0.5) / 4.0).exp2())
            .collect();
        let pts = s.points();
        for (r, count) in grid.iter().zip(point_counts(&s, &grid)) {
            let brute = pts.iter().filter(|p| p.norm() < *r).count();
            assert_eq!(brute, count);
        }
    }

    #[test]
    fn schedule_json_round_trip() {
        for s in [
            build_hp_schedule(6.0, &default_radii(4), &LayerOptions::random(3)).unwrap(),
            build_h1_schedule(8.0, 2.0, &default_radii(3), &LayerOptions::default()).unwrap(),
            build_weighted_schedule(
                &WeightSequence::Dirichlet,
                &default_radii(3),
                2.0,
                &LayerOptions::default(),
            )
            .unwrap(),
        ] {
            let text = serde_json::to_string(&s).unwrap();
            let back: LatticeSchedule = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s);
        }
        let hand =
            r#"{"kind":"hp","M":6,"layers":[{"r":0.5,"n":12,"mult":1,"phases":"centered"}]}"#;
        let s: LatticeSchedule = serde_json::from_str(hand).unwrap();
        assert_eq!(s.layers()[0].n_points(), 12);
        let bad = r#"{"kind":"hp","layers":[{"r":0.5,"n":12,"mult":1,"phases":"random"}]}"#;
        assert!(serde_json::from_str::<LatticeSchedule>(bad).is_err());
    }

    #[test]
    fn tolerant_ceil_absorbs_rounding() {
        assert_eq!(tolerant_ceil(3.0000000000001), 3.0);
        assert_eq!(tolerant_ceil(3.001), 4.0);
        let r = 1.0 - (-4.0f64).exp();
        assert_eq!(tolerant_ceil((1.0 / (1.0 - r)).ln()), 4.0);
    }
}
