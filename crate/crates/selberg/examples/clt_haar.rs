//! Normalized sums of uniform points on the circle: the analytic gap
//! against its bound and a Monte Carlo check of the Gaussian limit.

use num_complex::Complex64;
use selberg::clt::{self, CoefficientScheme, MonteCarloConfig};
use selberg::esseen1d::linspace;

fn main() -> selberg::Result<()> {
    let law = clt::haar_circle_law();
    let ones = CoefficientScheme::ones();
    for n in [100, 400, 1600] {
        let g = clt::gaussian_limit_gap(&law, &ones, n, &[Complex64::new(1.0, 0.0)], 1.0)?;
        println!("N = {n:<5} gap {:.3e}  bound {:.3e}", g.gap, g.bound);
    }
    let mc = MonteCarloConfig {
        seed: 7,
        samples: 100_000,
    };
    let v = clt::vector_statistic(&law, &ones, 400, mc, &linspace(-1.5, 1.5, 7))?;
    let (re, im) = v.ks[0];
    println!("KS of Re T, Im T against N(0, 1/2): {re:.4}, {im:.4}");
    let c = v.covariance[0];
    println!("E|T|^2 = {:.4} +- {:.4}", c.value.0, c.std_error);
    Ok(())
}
