//! Randomly placed nodes inside each arc still give contracting steps.

use kernelrepr::engine::{self, DecomposeOptions};
use kernelrepr::lattice::{build_hp_schedule, default_radii, LayerOptions};
use kernelrepr::{PowerSeries, SpaceSpec};
use num_complex::Complex64;

fn main() -> kernelrepr::Result<()> {
    let f = PowerSeries::geometric(Complex64::new(0.7, 0.0), 1e-17)?;
    let opts = DecomposeOptions {
        tol: 1e-3,
        prefix_samples: 0,
        ..Default::default()
    };
    for (label, layer_opts) in [
        ("centered".to_string(), LayerOptions::default()),
        ("seed 1".to_string(), LayerOptions::random(1)),
        ("seed 2".to_string(), LayerOptions::random(2)),
    ] {
        let schedule = build_hp_schedule(8.0, &default_radii(20), &layer_opts)?;
        let run = engine::run(&f, &SpaceSpec::h2(), &schedule, &opts)?;
        let steps: Vec<String> = run
            .report
            .accepted()
            .map(|s| format!("L{} {:.3}/{:.1e}", s.layer, s.ratio, s.discretization))
            .collect();
        println!(
            "{label:>9}: {:?}; ratio/discretization {}",
            run.report.status,
            steps.join(", ")
        );
    }
    Ok(())
}
