//! FFT-backed kernels shared by the series and engine modules: boundary
//! sampling, arc integrals over the uniform arc partition, and the Taylor
//! coefficients of kernel sums over one ring of nodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Values `sum_n a_n e^{2 pi i n m / G}` for `m = 0..G`; coefficients beyond
/// `G` alias onto the grid.
pub(crate) fn boundary_values(coeffs: &[Complex64], grid: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; grid];
    for (n, a) in coeffs.iter().enumerate() {
        buf[n % grid] += a;
    }
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    buf
}

/// `int_{I_j} zeta^n dm / zeta_j^n` for the arc of length `2 pi / n_arcs`
/// centred at `zeta_j`.
#[inline]
pub(crate) fn arc_moment(n: usize, n_arcs: usize) -> f64 {
    if n == 0 {
        1.0 / n_arcs as f64
    } else {
        let x = PI * n as f64;
        (x / n_arcs as f64).sin() / x
    }
}

/// `c_j = int_{I_j} f dm` over the arcs `I_j = [(2j-1) pi/N, (2j+1) pi/N]`,
/// `j = 0..N`, where `coeffs[n] = a_n`. Cost `O(D + N log N)`.
pub(crate) fn uniform_arc_integrals(coeffs: &[Complex64], n_arcs: usize) -> Vec<Complex64> {
    let mut folded = vec![ZERO; n_arcs];
    for (n, a) in coeffs.iter().enumerate() {
        folded[n % n_arcs] += a * arc_moment(n, n_arcs);
    }
    // c_j = sum_m folded[m] e^{2 pi i m j / N}
    FftPlanner::new()
        .plan_fft_inverse(n_arcs)
        .process(&mut folded);
    folded
}

/// Angular placement of the nodes on one ring, relative to the centres `2 pi j / N`.
#[derive(Clone, Debug, PartialEq)]
pub enum RingOffsets {
    /// Every node shifted by the same angle.
    Uniform(f64),
    /// Node `j` shifted by `offsets[j]`.
    PerNode(Vec<f64>),
}

impl RingOffsets {
    pub fn angle(&self, j: usize) -> f64 {
        match self {
            RingOffsets::Uniform(phi) => *phi,
            RingOffsets::PerNode(v) => v[j],
        }
    }

    fn max_abs(&self) -> f64 {
        match self {
            RingOffsets::Uniform(phi) => phi.abs(),
            RingOffsets::PerNode(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

/// Target for the Taylor remainder in the per-node path.
const TAYLOR_EPS: f64 = 1e-17;
/// Below this `N * (D+1)` the per-node path sums directly.
const DIRECT_WORK: usize = 4_000_000;

/// Adds `sum_j w_j conj(radius e^{i(2 pi j/N + phi_j)})^n` to `out[n]` for
/// every `n < out.len()`, where `N = weights.len()`.
///
/// With a common offset this is one FFT. Per-node offsets are handled by
/// splitting the index range into blocks and expanding `e^{-i (n - n_c) phi_j}`
/// around each block centre `n_c`, one FFT per Taylor order.
pub(crate) fn accumulate_ring(
    weights: &[Complex64],
    radius: f64,
    offsets: &RingOffsets,
    out: &mut [Complex64],
) {
    let n_nodes = weights.len();
    if n_nodes == 0 || out.is_empty() {
        return;
    }
    let len = out.len();
    let ln_r = radius.ln();
    match offsets {
        RingOffsets::Uniform(phi) => {
            let mut spectrum = weights.to_vec();
            FftPlanner::new()
                .plan_fft_forward(n_nodes)
                .process(&mut spectrum);
            for (n, o) in out.iter_mut().enumerate() {
                let nf = n as f64;
                *o += Complex64::from_polar((nf * ln_r).exp(), -nf * phi) * spectrum[n % n_nodes];
            }
        }
        RingOffsets::PerNode(phis) => {
            let phi_max = offsets.max_abs();
            if phi_max == 0.0 {
                accumulate_ring(weights, radius, &RingOffsets::Uniform(0.0), out);
                return;
            }
            if n_nodes.saturating_mul(len) <= DIRECT_WORK || phi_max * n_nodes as f64 > 4.0 * PI {
                accumulate_direct(weights, radius, phis, out);
                return;
            }
            // |(n - n_c) phi| <= 2 inside a block
            let half = ((2.0 / phi_max).floor().min(len as f64) as usize).max(1);
            let mut order = 1usize;
            let mut bound = 2.0f64;
            while bound > TAYLOR_EPS {
                order += 1;
                bound *= 2.0 / order as f64;
            }
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_forward(n_nodes);
            let mut start = 0usize;
            while start < len {
                let end = (start + 2 * half + 1).min(len);
                let centre = start + half;
                let cf = centre as f64;
                // Horner over p, highest order first:
                // v_p(m) = sum_j w_j (-i phi_j)^p / p! e^{-i n_c phi_j} e^{-2 pi i j m / N}
                let base: Vec<Complex64> = weights
                    .iter()
                    .zip(phis)
                    .map(|(w, phi)| w * Complex64::from_polar(1.0, -cf * phi))
                    .collect();
                let mut acc = vec![ZERO; end - start];
                let mut spectrum = vec![ZERO; n_nodes];
                for p in (0..=order).rev() {
                    let inv_fact = 1.0 / factorial(p);
                    for ((s, b), phi) in spectrum.iter_mut().zip(&base).zip(phis) {
                        *s = b * Complex64::new(0.0, -phi).powu(p as u32) * inv_fact;
                    }
                    fft.process(&mut spectrum);
                    for (i, a) in acc.iter_mut().enumerate() {
                        let n = start + i;
                        *a = *a * (n as f64 - cf) + spectrum[n % n_nodes];
                    }
                }
                for (i, a) in acc.iter().enumerate() {
                    let n = start + i;
                    out[n] += a * (n as f64 * ln_r).exp();
                }
                start = end;
            }
        }
    }
}

fn factorial(p: usize) -> f64 {
    (1..=p).fold(1.0, |f, k| f * k as f64)
}

fn accumulate_direct(weights: &[Complex64], radius: f64, phis: &[f64], out: &mut [Complex64]) {
    let n_nodes = weights.len();
    for (j, (w, phi)) in weights.iter().zip(phis).enumerate() {
        let theta = 2.0 * PI * j as f64 / n_nodes as f64 + phi;
        let step = Complex64::from_polar(radius, -theta);
        let mut p = *w;
        for (n, o) in out.iter_mut().enumerate() {
            if n % 256 == 0 && n > 0 {
                // re-anchor the running power
                p = w * Complex64::from_polar((n as f64 * radius.ln()).exp(), -(n as f64) * theta);
            }
            *o += p;
            p *= step;
        }
    }
}
