//! Power series arithmetic: evaluation, dilation, norms and arc integrals.

use kernelrepr::series::{cauchy_kernel_series, Arc};
use kernelrepr::{PowerSeries, SpaceSpec, WeightSequence};
use num_complex::Complex64;

fn main() -> kernelrepr::Result<()> {
    let f = PowerSeries::geometric(Complex64::new(0.5, 0.2), 1e-17)?;
    println!(
        "f = 1/(1 - (0.5+0.2i) z): degree {}, tail bound {:.1e}",
        f.degree(),
        f.tail_bound()
    );

    let z = Complex64::new(0.3, -0.4);
    let exact = 1.0 / (1.0 - Complex64::new(0.5, 0.2) * z);
    println!("f(z) = {:.12}, closed form {:.12}", f.eval(z), exact);

    let fr = f.dilate(0.5)?;
    println!("f(z/2) at z: {:.12}", fr.eval(z));

    let grid = 1024;
    for (name, space) in [
        ("H^1", SpaceSpec::hardy(1.0)?),
        ("H^2", SpaceSpec::h2()),
        ("H^4", SpaceSpec::hardy(4.0)?),
        ("sup", SpaceSpec::DiskAlgebra),
        ("Dirichlet", SpaceSpec::weighted(WeightSequence::Dirichlet)?),
    ] {
        println!("{name:>9} norm {:.10}", f.norm(&space, grid)?);
    }

    // arcs centered at the N-th roots of unity telescope to a_0
    let n = 12;
    let sum: Complex64 = (0..n).map(|j| f.arc_integral(&Arc::centered(j, n))).sum();
    println!(
        "sum of {n} arc integrals = {sum:.15} (a_0 = {})",
        f.coeffs()[0]
    );

    let k = cauchy_kernel_series(Complex64::new(0.0, 0.9), 400)?;
    println!(
        "|K_0.9i|_2^2 = {:.10}, 1/(1-0.81) = {:.10}",
        k.l2_norm().powi(2),
        1.0 / 0.19
    );
    Ok(())
}
