use std::f64::consts::PI;

use kernelrepr::analysis::{cauchy_transform, dilation_identity_check, BoundaryFunction};
use kernelrepr::engine::{self, reconstruct_partial, KernelKind};
use kernelrepr::lattice::{
    build_h1_schedule, build_hp_schedule, build_weighted_schedule, default_radii, density_upper,
    dyadic_grid, LatticeSchedule,
};
use kernelrepr::series::{f_rho_transform, reproducing_check};
use kernelrepr::{
    omega1, omega2, omega3, Arc, DecomposeOptions, LayerOptions, PowerSeries, SpaceSpec,
    WeightSequence,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn poly(max_degree: usize) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_degree + 1).prop_map(|v| {
        PowerSeries::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
    })
}

fn weight() -> impl Strategy<Value = WeightSequence> {
    prop_oneof![
        Just(WeightSequence::Hardy),
        Just(WeightSequence::Dirichlet),
        (0.0f64..3.0).prop_map(|a| WeightSequence::bergman(a).unwrap()),
        prop::collection::vec(0.2f64..5.0, 1..8).prop_map(|t| WeightSequence::table(t).unwrap()),
    ]
}

fn max_abs(f: &PowerSeries) -> f64 {
    f.coeffs().iter().map(|a| a.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn telescoping(f in poly(60), n in 1usize..300, shift in 0.0f64..1.0) {
        // a partition of the circle into n arcs with arbitrary interior cuts
        let mut cuts: Vec<f64> = (0..n).map(|j| 2.0 * PI * (j as f64 + shift * 0.9) / n as f64).collect();
        cuts.push(cuts[0] + 2.0 * PI);
        let total: Complex64 = cuts.windows(2).map(|w| f.arc_integral(&Arc::new(w[0], w[1]).unwrap())).sum();
        let tol = 1e-12 * (f.degree() + 1) as f64 * max_abs(&f);
        prop_assert!((total - f.coeffs()[0]).norm() <= tol);
    }

    #[test]
    fn dilation_semigroup(f in poly(40), i in 1i32..6, j in 1i32..6) {
        let (r, s) = (0.5f64.powi(i), 0.5f64.powi(j));
        let two = f.dilate(r).unwrap().dilate(s).unwrap();
        let one = f.dilate(r * s).unwrap();
        prop_assert_eq!(two.coeffs(), one.coeffs());
    }

    #[test]
    fn norm_monotone_in_p(f in poly(30), p in 1.0f64..4.0, dq in 0.0f64..4.0) {
        let grid = 256;
        let np = f.norm(&SpaceSpec::hardy(p).unwrap(), grid).unwrap();
        let nq = f.norm(&SpaceSpec::hardy(p + dq).unwrap(), grid).unwrap();
        let sup = f.norm(&SpaceSpec::DiskAlgebra, grid).unwrap();
        prop_assert!(np <= nq * (1.0 + 1e-12));
        prop_assert!(nq <= sup * (1.0 + 1e-12));
    }

    #[test]
    fn parseval(f in poly(100)) {
        let grid = f.norm(&SpaceSpec::h2(), 1024).unwrap();
        let coef = f.coeffs().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((grid - coef).abs() <= 1e-10);
        let flat = f.norm(&SpaceSpec::weighted(WeightSequence::Hardy).unwrap(), 1024).unwrap();
        prop_assert!((flat - grid).abs() <= 1e-10);
    }

    #[test]
    fn reproducing(f in poly(30), w in weight(), m in 0.0f64..0.9, t in 0.0f64..(2.0 * PI)) {
        let err = reproducing_check(&f, &w, Complex64::from_polar(m, t)).unwrap();
        prop_assert!(err <= 1e-10, "err {err}");
    }

    #[test]
    fn f_rho_bounded_by_omega1(f in poly(30), w in weight(), rho in 0.05f64..0.98) {
        let lhs = f_rho_transform(&f, &w, rho).unwrap().l2_norm();
        let rhs = omega1(&w, rho).unwrap().sqrt() * f.beta_norm(&w).unwrap();
        prop_assert!(lhs <= rhs + 1e-10, "{lhs} > {rhs}");
    }

    #[test]
    fn dilation_identity_exact(f in poly(25), w in weight(), r in 0.1f64..0.6, gap in 0.05f64..0.35) {
        let check = dilation_identity_check(&f, &w, r, r + gap, 8, 256).unwrap();
        prop_assert!(check.coefficient_discrepancy <= 1e-14 * (1.0 + max_abs(&f)));
    }

    #[test]
    fn omega_monotone(w in weight(), a in 0.05f64..0.9, d in 0.01f64..0.09) {
        let b = a + d;
        prop_assert!(omega1(&w, a).unwrap() <= omega1(&w, b).unwrap());
        prop_assert!(omega2(&w, a).unwrap() < omega2(&w, b).unwrap());
        prop_assert!(omega3(&w, a).unwrap() < omega3(&w, b).unwrap());
    }

    #[test]
    fn cauchy_projection(f in poly(20), g in poly(20), c in (-2.0f64..2.0, -2.0f64..2.0)) {
        // boundary data with both analytic and anti-analytic parts
        let d = f.degree().max(g.degree());
        let mut two_sided: Vec<Complex64> = (0..d).map(|i| Complex64::new(i as f64 * 0.1, -0.3)).collect();
        two_sided.extend(g.resized(d).coeffs().iter().copied());
        let bg = BoundaryFunction::new(d, two_sided).unwrap();
        let bf = BoundaryFunction::from(&f);
        let c = Complex64::new(c.0, c.1);
        let once = cauchy_transform(&bg, d);
        let g_d = g.resized(d);
        prop_assert_eq!(once.coeffs(), g_d.coeffs());
        let twice = cauchy_transform(&BoundaryFunction::from(&once), d);
        prop_assert_eq!(twice.coeffs(), once.coeffs());
        let identity = cauchy_transform(&bf, f.degree());
        prop_assert_eq!(identity.coeffs(), f.coeffs());
        let lhs = cauchy_transform(&bf.add(&bg.scale(c)), d);
        let rhs = &f.resized(d) + &once.scale(c);
        for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-14 * (1.0 + y.norm()));
        }
    }
}

fn distinct(points: &[Complex64]) -> bool {
    let mut keys: Vec<(u64, u64)> = points
        .iter()
        .map(|z| (z.re.to_bits(), z.im.to_bits()))
        .collect();
    keys.sort_unstable();
    keys.windows(2).all(|w| w[0] != w[1])
}

fn phases() -> impl Strategy<Value = LayerOptions> {
    prop_oneof![
        Just(LayerOptions::default()),
        any::<u64>().prop_map(LayerOptions::random)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hp_schedule_invariants(m in 1.0f64..12.0, count in 1usize..9, opts in phases()) {
        let s = build_hp_schedule(m, &default_radii(count), &opts).unwrap();
        for l in s.layers() {
            prop_assert!(l.n_points() as f64 * (1.0 - l.radius()) >= m * (1.0 - 1e-12));
            prop_assert_eq!(l.layer_points().len(), l.n_points() * l.multiplicity());
        }
        prop_assert!(distinct(&s.points()));
    }

    #[test]
    fn h1_schedule_invariants(m in 2.0f64..10.0, c in 0.5f64..3.0, count in 1usize..7, opts in phases()) {
        let s = build_h1_schedule(m, c, &default_radii(count), &opts).unwrap();
        for l in s.layers() {
            prop_assert!(l.multiplicity() as f64 >= c * (1.0 / (1.0 - l.radius())).ln() * (1.0 - 1e-12));
            prop_assert_eq!(l.layer_points().len(), l.n_points() * l.multiplicity());
        }
        prop_assert!(distinct(&s.points()));
    }

    #[test]
    fn weighted_schedule_invariants(w in weight(), safety in 1.0f64..3.0, count in 1usize..5) {
        let s = build_weighted_schedule(&w, &default_radii(count), safety, &LayerOptions::default()).unwrap();
        let mut prev = f64::INFINITY;
        for l in s.layers() {
            let r = l.radius();
            let (o1, o2, o3) = (omega1(&w, r).unwrap(), omega2(&w, r).unwrap(), omega3(&w, r).unwrap());
            let mk = l.multiplicity() as f64;
            prop_assert!(o1 * o3 <= safety * safety * mk * mk * (1.0 + 1e-12));
            let q = o1 * o2 / (l.n_points() as f64).powi(2);
            prop_assert!(q < prev);
            prev = q;
        }
        prop_assert!(distinct(&s.points()));
    }

    #[test]
    fn density_monotone_in_layers(m in 2.0f64..10.0, count in 2usize..10) {
        let grid = dyadic_grid(count + 2, 8);
        let radii = default_radii(count);
        let full = build_hp_schedule(m, &radii, &LayerOptions::default()).unwrap();
        let fewer = LatticeSchedule::from_layers(full.kind(), full.layers()[..count - 1].to_vec()).unwrap();
        prop_assert!(density_upper(&fewer, &grid).unwrap() <= density_upper(&full, &grid).unwrap());
    }
}

fn quick_run(f: &PowerSeries) -> engine::DecompositionRun {
    let schedule = build_hp_schedule(8.0, &default_radii(12), &LayerOptions::default()).unwrap();
    let opts = DecomposeOptions {
        tol: 1e-2,
        prefix_samples: 0,
        interior_check: false,
        ..Default::default()
    };
    engine::run(f, &SpaceSpec::h2(), &schedule, &opts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn exact_telescoping_and_contraction(re in -0.8f64..0.8, im in -0.4f64..0.4) {
        let f = PowerSeries::geometric(Complex64::new(re, im), 1e-17).unwrap();
        let run = quick_run(&f);
        let d = &run.decomposition;
        let degree = d.degree().max(run.residual.degree());
        let total = reconstruct_partial(d, d.len(), degree).unwrap();
        let back = &total + &run.residual.resized(degree);
        let scale = f.l2_norm();
        for (x, y) in back.coeffs().iter().zip(f.resized(degree).coeffs()) {
            prop_assert!((x - y).norm() <= 1e-10 * scale);
        }
        let ratios: Vec<f64> = run.report.accepted().map(|s| s.ratio).collect();
        prop_assert!(ratios.iter().all(|r| *r < 1.0));
        let product: f64 = ratios.iter().product();
        prop_assert!(run.residual.l2_norm() <= product * scale * 1.05);
    }

    #[test]
    fn linearity(re in -0.8f64..0.8, k in -3i32..4, alpha in 0.1f64..3.0) {
        let f = PowerSeries::geometric(Complex64::new(re, 0.3), 1e-17).unwrap();
        let base = quick_run(&f);
        // powers of two scale every operation exactly
        let two = 2f64.powi(k);
        let scaled = quick_run(&f.scale(Complex64::new(two, 0.0)));
        prop_assert_eq!(scaled.decomposition.len(), base.decomposition.len());
        for (a, b) in scaled.decomposition.atoms.iter().zip(&base.decomposition.atoms) {
            prop_assert_eq!(a.weight, b.weight * two);
        }
        let general = quick_run(&f.scale(Complex64::new(alpha, 0.0)));
        let layers = |r: &engine::DecompositionRun| r.decomposition.steps.iter().map(|s| s.layer).collect::<Vec<_>>();
        if layers(&general) == layers(&base) {
            for (a, b) in general.decomposition.atoms.iter().zip(&base.decomposition.atoms) {
                prop_assert!((a.weight - b.weight * alpha).norm() <= 1e-12 * (1.0 + b.weight.norm()));
            }
        }
    }

    #[test]
    fn order_invariance(re in -0.8f64..0.8, seed in any::<u64>()) {
        let f = PowerSeries::geometric(Complex64::new(re, 0.0), 1e-17).unwrap();
        let run = quick_run(&f);
        let d = &run.decomposition;
        let degree = d.degree();
        let fast = reconstruct_partial(d, d.len(), degree).unwrap();
        let mut order: Vec<usize> = (0..d.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut direct = vec![Complex64::new(0.0, 0.0); degree + 1];
        for i in order {
            let a = &d.atoms[i];
            prop_assert_eq!(a.kernel, KernelKind::Cauchy);
            let step = a.node.conj();
            let mut p = a.weight;
            for c in direct.iter_mut() {
                *c += p;
                p *= step;
            }
        }
        for (x, y) in fast.coeffs().iter().zip(&direct) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }
}

#[test]
fn omega3_is_kernel_norm() {
    use kernelrepr::series::beta_kernel_series;
    for w in [
        WeightSequence::Hardy,
        WeightSequence::Dirichlet,
        WeightSequence::bergman(0.0).unwrap(),
        WeightSequence::bergman(2.5).unwrap(),
        WeightSequence::table(vec![2.0, 0.5, 1.0]).unwrap(),
    ] {
        for rho in [0.5f64, 0.9, 0.99] {
            let k = beta_kernel_series(Complex64::new(0.0, rho), &w, 8000).unwrap();
            let sq = k.beta_norm(&w).unwrap().powi(2);
            // absolute for moderate values; omega3 reaches ~1e7 for large alpha near the circle
            let o3 = omega3(&w, rho).unwrap();
            assert!(
                (sq - o3).abs() <= 1e-8 * o3.max(1.0),
                "{} at {rho}",
                w.tag()
            );
        }
    }
}
