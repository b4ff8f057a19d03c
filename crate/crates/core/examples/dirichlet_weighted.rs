//! Weighted kernels: a slowly decaying Dirichlet-space function.

use kernelrepr::engine::{self, DecomposeOptions};
use kernelrepr::io::powerlaw;
use kernelrepr::lattice::{build_weighted_schedule, default_radii, LayerOptions};
use kernelrepr::{SpaceSpec, WeightSequence};

fn main() -> kernelrepr::Result<()> {
    let w = WeightSequence::Dirichlet;
    let f = powerlaw(2.0, 64);
    let schedule = build_weighted_schedule(&w, &default_radii(8), 2.0, &LayerOptions::default())?;
    for l in schedule.layers() {
        println!(
            "layer {}: R = {:.6}, {} radii x {} points",
            l.index(),
            l.radius(),
            l.multiplicity(),
            l.n_points()
        );
    }
    let opts = DecomposeOptions {
        delta: 0.5,
        tol: 1e-2,
        ..Default::default()
    };
    let run = engine::run(&f, &SpaceSpec::weighted(w)?, &schedule, &opts)?;
    for s in run.report.accepted() {
        println!(
            "step {}: layer {}, ratio {:.4}, residual {:.3e}",
            s.step, s.layer, s.ratio, s.residual_norm
        );
    }
    println!("{:?}, {} atoms", run.report.status, run.decomposition.len());
    Ok(())
}
