//! Node schedules and the upper-density proxy `max (1 - r) #{|lambda| < r}`.

use kernelrepr::lattice::{
    build_hp_schedule, default_radii, density_upper, dyadic_grid, point_counts, LayerOptions,
};

fn main() -> kernelrepr::Result<()> {
    for m in [4.0, 6.0, 8.0] {
        let schedule = build_hp_schedule(m, &default_radii(12), &LayerOptions::default())?;
        let grid = dyadic_grid(13, 16);
        println!(
            "M = {m}: {} points, proxy {:.4} (2M = {})",
            schedule.total_points(),
            density_upper(&schedule, &grid)?,
            2.0 * m
        );
    }
    let schedule = build_hp_schedule(6.0, &default_radii(6), &LayerOptions::default())?;
    let grid = dyadic_grid(7, 2);
    for (r, c) in grid.iter().zip(point_counts(&schedule, &grid)) {
        println!(
            "  r = {r:.6}: {c:>4} points, (1-r) count = {:.3}",
            (1.0 - r) * c as f64
        );
    }
    Ok(())
}
