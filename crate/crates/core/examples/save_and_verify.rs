//! Writes a decomposition to JSON, reads it back and rechecks it.

use kernelrepr::cli::verify_rows;
use kernelrepr::engine::{self, reconstruct_partial, DecomposeOptions};
use kernelrepr::io::{read_json, write_json};
use kernelrepr::lattice::{build_hp_schedule, default_radii, LayerOptions};
use kernelrepr::{Decomposition, PowerSeries, SpaceSpec};
use num_complex::Complex64;

fn main() -> kernelrepr::Result<()> {
    let f = PowerSeries::geometric(Complex64::new(-0.6, 0.3), 1e-17)?;
    let schedule = build_hp_schedule(6.0, &default_radii(16), &LayerOptions::default())?;
    let run = engine::run(
        &f,
        &SpaceSpec::h2(),
        &schedule,
        &DecomposeOptions::default(),
    )?;

    let path = std::env::temp_dir().join("kernelrepr_example_decomposition.json");
    write_json(&path, &run.decomposition)?;
    let d: Decomposition = read_json(&path)?;
    println!("{} atoms written to {}", d.len(), path.display());

    let total = reconstruct_partial(&d, d.len(), d.degree())?;
    let z = Complex64::new(0.2, 0.5);
    println!("f(z) = {:.10}, series = {:.10}", f.eval(z), total.eval(z));

    for row in verify_rows(&d, &f, 0.9, 16)? {
        println!("{}", row.join(", "));
    }
    let _ = std::fs::remove_file(&path);
    Ok(())
}
