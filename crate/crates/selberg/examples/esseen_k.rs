//! Multivariate smoothing bounds for a product of binomials against the
//! bivariate normal law.

use selberg::esseen1d::linspace;
use selberg::esseen_multi::{self as em, LawK, MultiConfig, TruncatedMode, TruncationMap};

fn main() -> selberg::Result<()> {
    let f = LawK::binomial_product(2, 64, 0.5)?;
    let g = LawK::standard_normal(2)?;
    let cfg = MultiConfig::new(2)?;
    let om = [15.0, 15.0];
    let (d, at) = em::sup_distance_k(&f, &g, &linspace(-3.0, 3.0, 25))?;
    println!("sup distance {d:.5} at {at:?}");
    let plain = em::esseen_bound_k(&f, &g, &om, &at, &cfg)?;
    println!("plain bound at that point: {:.5}", plain.total);
    let a = em::esseen_bound_truncated(
        &f,
        &g,
        &om,
        &TruncationMap::variant_a(4.0),
        &TruncatedMode::A,
        &cfg,
    )?;
    println!("uniform bound (variant A): {:.5}", a.total);
    let (lo, hi) = (vec![-1.0, -0.5], vec![0.5, 1.0]);
    let mode = TruncatedMode::B {
        a: lo.clone(),
        b: hi.clone(),
    };
    let b = em::esseen_bound_truncated(&f, &g, &om, &TruncationMap::variant_b(2.0), &mode, &cfg)?;
    let gap = (f.box_measure(&lo, &hi) - g.box_measure(&lo, &hi)).abs();
    println!(
        "box {lo:?} x {hi:?}: discrepancy {gap:.5}, bound {:.5}",
        b.total
    );
    let s = em::esseen_bound_slab(&f, &g, &om, &cfg)?;
    println!("slab bound: {:.5}", s.total);
    Ok(())
}
