//! The moduli omega_1..3 of the preset weights and a weight-sequence check.

use kernelrepr::analysis::validate_weight;
use kernelrepr::{omega1, omega2, omega3, WeightSequence};

fn main() -> kernelrepr::Result<()> {
    let weights = [
        WeightSequence::Hardy,
        WeightSequence::Dirichlet,
        WeightSequence::bergman(0.0)?,
        WeightSequence::bergman(1.0)?,
        WeightSequence::table(vec![1.0, 4.0, 2.0])?,
    ];
    println!(
        "{:>14} {:>5} {:>12} {:>12} {:>12}",
        "weight", "rho", "omega1", "omega2", "omega3"
    );
    for w in &weights {
        for rho in [0.5, 0.9, 0.99] {
            println!(
                "{:>14} {:>5} {:>12.6} {:>12.6} {:>12.6}",
                w.tag(),
                rho,
                omega1(w, rho)?,
                omega2(w, rho)?,
                omega3(w, rho)?
            );
        }
    }
    let report = validate_weight(&WeightSequence::bergman(1.0)?, 5000)?;
    println!("bergman:1 check: {report:?}");
    Ok(())
}
