//! Smoothing bound for a standardized binomial against the normal law.

use selberg::esseen1d::{self, Distribution1D, EsseenConfig};

fn main() -> selberg::Result<()> {
    let normal = Distribution1D::normal(0.0, 1.0);
    let cfg = EsseenConfig::default();
    let grid = esseen1d::linspace(-5.0, 5.0, 2001);
    println!(
        "{:>5} {:>10} {:>10} {:>7}",
        "n", "distance", "bound", "omega"
    );
    for n in [25, 100, 400, 1600] {
        let f = Distribution1D::binomial_standardized(n, 0.5)?;
        let d = esseen1d::sup_cdf_distance(&f, &normal, &grid);
        let best = esseen1d::optimize_omega(&f, &normal, -2..=9, &cfg)?;
        println!("{n:>5} {d:>10.6} {:>10.6} {:>7}", best.total, best.omega);
    }
    Ok(())
}
