//! Tabulates the extremal majorant and minorant of sgn and the constant
//! lambda.

use selberg::kernels::{self, KernelConfig, KernelKind};

fn main() -> selberg::Result<()> {
    let cfg = KernelConfig::default();
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12}",
        "x", "b(x)", "sgn(x)", "B(x)", "W(x)"
    );
    for i in -8..=8 {
        let x = 0.25 * i as f64;
        let b = kernels::kernel_family_eval(KernelKind::Bminus, x, &cfg)?;
        let up = kernels::kernel_family_eval(KernelKind::B, x, &cfg)?;
        let w = kernels::kernel_family_eval(KernelKind::W, x, &cfg)?;
        println!(
            "{x:>6.2} {b:>12.8} {:>12.1} {up:>12.8} {w:>12.8}",
            kernels::sgn(x)
        );
    }
    let oracle = kernels::w_oracle(0.5, &cfg)?;
    println!(
        "W(1/2) = {:.15} +- {:.1e} (8/pi^2 = {:.15})",
        oracle.value,
        oracle.radius,
        8.0 / std::f64::consts::PI.powi(2)
    );
    println!("lambda = {:.9}", kernels::lambda_constant(1e-10));
    Ok(())
}
