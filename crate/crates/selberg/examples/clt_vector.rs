//! Two-component CLT with alternating coefficients.

use num_complex::Complex64;
use selberg::clt::{self, CoefficientScheme};

fn main() -> selberg::Result<()> {
    let law = clt::haar_circle_law();
    let alt = CoefficientScheme::alternating_pair();
    let xi = [Complex64::new(0.6, 0.2), Complex64::new(-0.3, 0.7)];
    for n in [11, 101, 1001, 10_001] {
        let s = clt::lyapunov_normalizer(&alt, n)?;
        let g = clt::gaussian_limit_gap(&law, &alt, n, &xi, 1.0)?;
        println!(
            "N = {n:<6} matrix residual {:.3e}  Lyapunov sum {:.3e}  gap {:.3e}  bound {:.3e}",
            s.matrix_residual.unwrap_or(f64::NAN),
            s.lyapunov_sum,
            g.gap,
            g.bound
        );
    }
    Ok(())
}
