//! Decomposition in H^1 and in the disk algebra with multi-radius layers.

use kernelrepr::engine::{self, DecomposeOptions};
use kernelrepr::lattice::{build_h1_schedule, default_radii, LayerOptions};
use kernelrepr::{PowerSeries, SpaceSpec};
use num_complex::Complex64;

fn main() -> kernelrepr::Result<()> {
    let f = PowerSeries::geometric(Complex64::new(0.9, 0.0), 1e-17)?;
    let schedule = build_h1_schedule(8.0, 2.0, &default_radii(12), &LayerOptions::default())?;
    let opts = DecomposeOptions {
        delta: 0.25,
        tol: 1e-3,
        ..Default::default()
    };
    for space in [SpaceSpec::hardy(1.0)?, SpaceSpec::DiskAlgebra] {
        let run = engine::run(&f, &space, &schedule, &opts)?;
        println!("{}: {:?}", space.tag(), run.report.status);
        for s in run.report.accepted() {
            let layer = schedule.layer(s.layer).expect("selected layer");
            println!(
                "  layer {:>2}: {} rings x {} points, ratio {:.4}, prefix amplification {:.3}",
                s.layer,
                layer.multiplicity(),
                layer.n_points(),
                s.ratio,
                s.prefix_max
            );
        }
        println!(
            "  atoms {}, reconstruction error {:.2e}",
            run.decomposition.len(),
            run.report.reconstruction_error
        );
    }
    Ok(())
}
