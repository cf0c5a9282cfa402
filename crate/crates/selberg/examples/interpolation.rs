//! Reconstructs band-limited functions from samples and checks two
//! classical identities.

use selberg::interpolation::{
    cardinal_series, classical_identity_residual, vaaler_interpolation, CardinalMode, Identity,
    IdentityConfig, SampleSet,
};
use selberg::kernels::{fejer_k, fejer_k_prime};

fn main() -> selberg::Result<()> {
    let cardinal = SampleSet::cardinal(1.0, 10_000, fejer_k)?;
    let f = |t: f64| fejer_k(0.5 * t).powi(2);
    let df = |t: f64| fejer_k(0.5 * t) * fejer_k_prime(0.5 * t);
    let vaaler = SampleSet::vaaler(1.0, 400, f, df)?.with_decay(4.0);
    for z in [0.1, 0.5, 1.3, 2.75] {
        let c = cardinal_series(&cardinal, z, CardinalMode::Basic)?;
        let v = vaaler_interpolation(&vaaler, z)?;
        println!(
            "z = {z:<5} K: {:.12} vs {:.12} (+- {:.1e})   K(z/2)^2: {:.12} vs {:.12} (+- {:.1e})",
            c.value,
            fejer_k(z),
            c.err_est,
            v.value,
            f(z),
            v.err_est
        );
    }
    let cfg = IdentityConfig::default();
    for (which, arg) in [
        (Identity::Fejer, 0.37),
        (Identity::ParsevalSampling, 1.0),
        (Identity::Poisson, 2.0),
    ] {
        let r = classical_identity_residual(which, arg, &cfg)?;
        println!(
            "{which:?}({arg}): lhs {:.15}, rhs {:.15}, residual {:.1e}",
            r.lhs, r.rhs, r.residual
        );
    }
    Ok(())
}
