//! Property tests over random inputs.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use selberg::clt::{self, CoefficientScheme};
use selberg::esseen1d::{Distribution1D, EsseenConfig};
use selberg::esseen_multi::{self as em, apply_operator, LawK, MultiConfig, Op};
use selberg::interpolation::{classical_identity_residual, Identity, IdentityConfig};
use selberg::kernels::{self, KernelConfig, KernelKind};

fn eval(kind: KernelKind, x: f64) -> f64 {
    kernels::kernel_family_eval(kind, x, &KernelConfig::default()).unwrap()
}

fn off_integer() -> impl Strategy<Value = f64> {
    (-60i32..60, 0.001f64..0.999).prop_map(|(n, f)| n as f64 + f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sgn_is_strictly_sandwiched(x in off_integer()) {
        let s = kernels::sgn(x);
        prop_assert!(eval(KernelKind::Bminus, x) < s);
        prop_assert!(s < eval(KernelKind::B, x));
    }

    #[test]
    fn majorants_touch_sgn_at_nonzero_integers(n in 1i32..60, neg in any::<bool>()) {
        let x = if neg { -(n as f64) } else { n as f64 };
        prop_assert!((eval(KernelKind::B, x) - kernels::sgn(x)).abs() < 1e-12);
        prop_assert!((eval(KernelKind::Bminus, x) - kernels::sgn(x)).abs() < 1e-12);
    }

    #[test]
    fn w_is_odd_and_b_symmetrizes_to_2k(x in -80.0f64..80.0) {
        prop_assert!((eval(KernelKind::W, x) + eval(KernelKind::W, -x)).abs() <= 1e-12);
        let s = eval(KernelKind::B, x) + eval(KernelKind::B, -x);
        prop_assert!((s - 2.0 * kernels::fejer_k(x)).abs() <= 1e-12);
    }

    #[test]
    fn gap_to_sgn_is_at_most_2k(x in -80.0f64..80.0) {
        let (s, k2) = (kernels::sgn(x), 2.0 * kernels::fejer_k(x));
        prop_assert!((eval(KernelKind::B, x) - s).abs() <= k2 + 1e-15);
        prop_assert!((eval(KernelKind::Bminus, x) - s).abs() <= k2 + 1e-15);
    }

    #[test]
    fn interval_functions_sandwich_the_indicator(x in -30.0f64..30.0, l in 0.1f64..9.0) {
        let c = kernels::chi_interval(l, x);
        let (up, lo) = (eval(KernelKind::S(l), x), eval(KernelKind::Sigma(l), x));
        prop_assert!(lo <= c && c <= up);
        prop_assert!(up - lo <= kernels::fejer_k(x) + kernels::fejer_k(l - x) + 1e-12);
    }

    #[test]
    fn fast_w_matches_oracle(x in -30.0f64..30.0) {
        let cfg = KernelConfig::default();
        let o = kernels::w_oracle(x, &cfg).unwrap();
        prop_assert!((kernels::w_fast(x, &cfg) - o.value).abs() <= 1e-10);
    }

    #[test]
    fn q_reflection(v in 0.0f64..1.0) {
        prop_assert!((kernels::q_eval(v) + kernels::q_eval(1.0 - v) - 1.0 / PI).abs() <= 1e-12);
    }

    #[test]
    fn fejer_identity(x in -20.0f64..20.0) {
        let r = classical_identity_residual(Identity::Fejer, x, &IdentityConfig::default()).unwrap();
        prop_assert!(r.residual <= 1e-8, "residual {}", r.residual);
    }

    #[test]
    fn sandwich_inequalities(w in 0.05f64..50.0) {
        let cfg = IdentityConfig::default();
        prop_assert!(classical_identity_residual(Identity::Sandwich, w, &cfg).unwrap().holds);
        prop_assert!(classical_identity_residual(Identity::RefinedSandwich, w, &cfg).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_dimensional_bound_dominates_distance(n in 4u64..200, j in 1i32..8) {
        let f = Distribution1D::binomial_standardized(n, 0.5).unwrap();
        let g = Distribution1D::normal(0.0, 1.0);
        let omega = 2f64.powi(j);
        let r = selberg::esseen1d::esseen_bound_1d(&f, &g, omega, &EsseenConfig::default()).unwrap();
        let grid = selberg::esseen1d::linspace(-5.0, 5.0, 401);
        let d = selberg::esseen1d::sup_cdf_distance(&f, &g, &grid);
        prop_assert!(r.total >= d, "bound {} < distance {}", r.total, d);
    }

    #[test]
    fn cf_is_hermitian(n in 1u64..100, z in -20.0f64..20.0) {
        let f = Distribution1D::binomial_standardized(n, 0.5).unwrap();
        prop_assert!((f.cf(-z) - f.cf(z).conj()).norm() <= 1e-14);
        prop_assert!(f.cf(z).norm() <= 1.0 + 1e-14);
    }

    #[test]
    fn ring_identity_holds(k in 2usize..=4, vals in prop::collection::vec(-1.0f64..1.0, 12)) {
        let ring = em::selberg_ring_expansion(k).unwrap();
        let (c, rest) = vals.split_at(4);
        let (d, e) = rest.split_at(4);
        prop_assert!(ring.residual(&c[..k], &d[..k], &e[..k]).abs() <= 1e-12);
    }

    #[test]
    fn projections_split_the_identity(v0 in -3.0f64..3.0, v1 in -3.0f64..3.0, a in -2.0f64..2.0) {
        let f = move |w: &[f64]| Complex64::from_polar(1.0, a * w[0] - 0.7 * w[1])
            + Complex64::new((w[0] * w[1]).cos(), 0.0);
        let v = [v0, v1];
        for j in 0..2 {
            let z = |word: &[Op]| apply_operator(word, &f, &v);
            let split = z(&[Op::p(j)]) + z(&[Op::d(j)]) + z(&[Op::e(j), Op::delta(j)]) - z(&[]);
            prop_assert!(split.norm() <= 1e-12);
            prop_assert!((z(&[Op::e(j), Op::p(j)]) - z(&[Op::p(j)])).norm() <= 1e-12);
        }
    }

    #[test]
    fn truncation_inequality(t0 in -6.0f64..6.0, t1 in -6.0f64..6.0, delta in 1.1f64..4.0) {
        let f = LawK::binomial_product(2, 9, 0.5).unwrap();
        let (lhs, rhs) = em::truncation_check(&f, &[t0, t1], delta).unwrap();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn scalar_gap_is_below_bound(n in 10usize..3000, r in 0.0f64..1.0, th in 0.0f64..6.3) {
        let xi = [Complex64::from_polar(r, th)];
        for law in [clt::haar_circle_law(), clt::complex_gaussian_law(1.0).unwrap(), clt::rademacher_product_law()] {
            let g = clt::gaussian_limit_gap(&law, &CoefficientScheme::ones(), n, &xi, 1.0).unwrap();
            prop_assert!(g.holds(), "{} at N = {n}: gap {} bound {}", law.name, g.gap, g.bound);
        }
    }

    #[test]
    fn phase_rotation_keeps_normalizer(n in 5usize..400, w in 0.0f64..6.3) {
        let lin = CoefficientScheme::linear();
        let rot = lin.twisted(move |j| w * (j as f64).sqrt());
        let (a, b) = (clt::lyapunov_normalizer(&lin, n).unwrap(), clt::lyapunov_normalizer(&rot, n).unwrap());
        prop_assert!((a.normalizer - b.normalizer).abs() <= 1e-12 * a.normalizer);
        prop_assert!((a.lyapunov_sum - b.lyapunov_sum).abs() <= 1e-12 * a.lyapunov_sum);
    }
}

#[test]
fn dirac_collapse_agrees_with_smearing() {
    let f = |v: &[f64]| (-(v[0] * v[0]) - 0.5 * v[1] * v[1]).exp() * (1.0 + v[0]);
    let (c, _, d) = em::dirac_collapse_check(&f, &[6.0, 6.0], &[0], 1e-3).unwrap();
    assert!(d / c.abs() <= 1e-5);
}

#[test]
fn plain_bound_at_origin_is_below_triangle_bound() {
    let f = LawK::binomial_product(2, 16, 0.5).unwrap();
    let g = LawK::standard_normal(2).unwrap();
    let cfg = MultiConfig::new(2).unwrap();
    let plain = em::esseen_bound_k(&f, &g, &[4.0, 4.0], &[0.0, 0.0], &cfg).unwrap();
    let tri = em::esseen_bound_truncated(
        &f,
        &g,
        &[4.0, 4.0],
        &em::TruncationMap::variant_a(4.0).with_transform(em::Transform::Triangle),
        &em::TruncatedMode::A,
        &cfg,
    )
    .unwrap();
    assert!(plain.total <= tri.total);
}
