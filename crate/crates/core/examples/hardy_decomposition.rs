//! Greedy decomposition of `1/(1 - c z)` over Cauchy kernels in H^2.
//!
//! Run with `cargo run --release --example hardy_decomposition -- 0.7 1e-3`
//! (arguments: the ratio `c` and the relative tolerance).

use std::time::Instant;

use kernelrepr::engine::{self, DecomposeOptions};
use kernelrepr::lattice::{build_hp_schedule, default_radii, LayerOptions};
use kernelrepr::{PowerSeries, SpaceSpec};
use num_complex::Complex64;

fn main() -> kernelrepr::Result<()> {
    let mut args = std::env::args().skip(1);
    let c: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.7);
    let tol: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let f = PowerSeries::geometric(Complex64::new(c, 0.0), 1e-17)?;
    let schedule = build_hp_schedule(8.0, &default_radii(24), &LayerOptions::default())?;
    let opts = DecomposeOptions {
        delta: 0.05,
        tol,
        ..Default::default()
    };
    let t = Instant::now();
    let run = engine::run(&f, &SpaceSpec::h2(), &schedule, &opts)?;
    println!("f = 1/(1 - {c} z), |f| = {:.6}", run.report.initial_norm);
    println!(
        "{:>4} {:>5} {:>10} {:>10} {:>10} {:>9} {:>9}",
        "step", "layer", "ratio", "disc", "bound", "prefix", "degree"
    );
    for s in run.report.accepted() {
        println!(
            "{:>4} {:>5} {:>10.3e} {:>10.3e} {:>10.3e} {:>9.3} {:>9}",
            s.step, s.layer, s.ratio, s.discretization, s.bound, s.prefix_max, s.degree
        );
    }
    println!("status: {:?}", run.report.status);
    println!("atoms: {}", run.decomposition.len());
    println!("final |f_N|/|f| = {:.3e}", run.report.final_ratio());
    println!(
        "interior reconstruction error = {:.3e}",
        run.report.reconstruction_error
    );
    println!("elapsed {:.2?}", t.elapsed());
    Ok(())
}
