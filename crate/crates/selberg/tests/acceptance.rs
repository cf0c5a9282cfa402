//! Acceptance run: one line per criterion, exit status 1 if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use selberg::clt::{self, CoefficientScheme, MonteCarloConfig};
use selberg::esseen1d::{self, Distribution1D, EsseenConfig};
use selberg::esseen_multi::{
    self as em, apply_operator, LawK, MultiConfig, Op, Symbol, TruncatedMode, TruncationMap,
};
use selberg::interpolation::{classical_identity_residual, Identity, IdentityConfig};
use selberg::kernels::{self, KernelConfig, KernelKind};
use selberg::quad::{integrate, QuadOptions};
use selberg::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn eval(kind: KernelKind, x: f64) -> f64 {
    kernels::kernel_family_eval(kind, x, &KernelConfig::default()).expect("finite argument")
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(a..b)).collect()
}

fn c1_lambda() -> Result<Outcome> {
    let t = Instant::now();
    let lam = kernels::lambda_constant(5e-8);
    let el = t.elapsed();
    let rounded = (lam * 1e7).round() / 1e7;
    outcome(
        rounded == 0.3263598 && el < Duration::from_secs(1),
        format!("lambda = {lam:.10} in {el:.2?}"),
    )
}

/// `int (f - g)` over `[-x, x + l]`, split at the integers and at `l`.
fn bracket<F: Fn(f64) -> f64>(f: F, l: f64) -> Result<(f64, f64)> {
    let x = 50.0;
    let mut br: Vec<f64> = (-49..=(49 + l as i64)).map(|k| k as f64).collect();
    br.push(l);
    br.sort_by(f64::total_cmp);
    br.dedup();
    let q = integrate(f, -x, x + l, &br, QuadOptions::abs(1e-11))?;
    Ok((q.value, q.error))
}

fn c2_integrals() -> Result<Outcome> {
    let t = Instant::now();
    let tail = 4.0 / (PI * PI * 50.0);
    let mut ok = true;
    let mut err_total = 0.0;
    let mut parts = Vec::new();
    let mut add = |name: String, (v, e): (f64, f64)| {
        ok &= v - e <= 1.0 && 1.0 <= v + tail + e;
        err_total += e;
        parts.push(format!("{name} {v:.7}"));
    };
    add(
        "B".into(),
        bracket(|x| eval(KernelKind::B, x) - kernels::sgn(x), 0.0)?,
    );
    add(
        "b".into(),
        bracket(|x| kernels::sgn(x) - eval(KernelKind::Bminus, x), 0.0)?,
    );
    for l in [1.0, 2.0, 7.5] {
        add(
            format!("S{l}"),
            bracket(
                |x| eval(KernelKind::S(l), x) - kernels::chi_interval(l, x),
                l,
            )?,
        );
        add(
            format!("s{l}"),
            bracket(
                |x| kernels::chi_interval(l, x) - eval(KernelKind::Sigma(l), x),
                l,
            )?,
        );
    }
    let el = t.elapsed();
    outcome(
        ok && err_total <= 1e-6 && el < Duration::from_secs(10),
        format!(
            "{}; tail {tail:.4e}, quadrature error {err_total:.1e}, {el:.2?}",
            parts.join(", ")
        ),
    )
}

fn c3_w_consistency() -> Result<Outcome> {
    let cfg = KernelConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for x in uniform(&mut rng, 1000, -30.0, 30.0) {
        worst = worst.max((kernels::w_fast(x, &cfg) - kernels::w_oracle(x, &cfg)?.value).abs());
    }
    let mut xs = esseen1d::linspace(-6.0, 6.0, 23);
    xs.extend([0.5, -0.5]);
    let mut fw: f64 = 0.0;
    for &x in &xs {
        fw = fw.max((kernels::fourier_w_check(x, &cfg)?.value - kernels::w_fast(x, &cfg)).abs());
    }
    let half = (kernels::fourier_w_check(0.5, &cfg)?.value - 8.0 / (PI * PI)).abs();
    outcome(
        worst <= 1e-10 && fw <= 1e-8 && half <= 1e-8,
        format!("fast vs oracle {worst:.1e}, Fourier route {fw:.1e}, |W(1/2) - 8/pi^2| {half:.1e}"),
    )
}

fn c4_majorants() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts = uniform(&mut rng, 100_000, -50.0, 50.0);
    let mut bad = 0usize;
    for &x in &pts {
        let (s, k) = (kernels::sgn(x), kernels::fejer_k(x));
        let (b_up, b_lo, w) = (
            eval(KernelKind::B, x),
            eval(KernelKind::Bminus, x),
            eval(KernelKind::W, x),
        );
        let window = if x > 0.0 {
            1.0 - k <= w && w <= 1.0
        } else {
            -1.0 <= w && w <= -1.0 + k
        };
        if !(b_lo <= s && s <= b_up && (b_up - s).abs() <= 2.0 * k && window) {
            bad += 1;
        }
        for l in [1.0, 2.0, 7.5] {
            let c = kernels::chi_interval(l, x);
            if !(eval(KernelKind::Sigma(l), x) <= c && c <= eval(KernelKind::S(l), x)) {
                bad += 1;
            }
        }
    }
    let mut strict_bad = 0usize;
    let mut n = 0;
    while n < 1000 {
        let x: f64 = rng.random_range(-50.0..50.0);
        if (x - x.round()).abs() < 0.01 {
            continue;
        }
        n += 1;
        let s = kernels::sgn(x);
        if !(eval(KernelKind::Bminus, x) < s && s < eval(KernelKind::B, x)) {
            strict_bad += 1;
        }
    }
    outcome(
        bad == 0 && strict_bad == 0,
        format!("{bad} violations over 1e5 points, {strict_bad} strictness failures over 1e3"),
    )
}

fn c5_identities() -> Result<Outcome> {
    let cfg = IdentityConfig::default();
    let mut fejer: f64 = 0.0;
    for x in [0.1, 0.37, 0.5, 2.71, -4.2] {
        fejer = fejer.max(classical_identity_residual(Identity::Fejer, x, &cfg)?.residual);
    }
    let pars = classical_identity_residual(Identity::ParsevalSampling, 1.0, &cfg)?;
    let pars_err = (pars.lhs - 2.0 / 3.0)
        .abs()
        .max((pars.rhs - 2.0 / 3.0).abs());
    let poisson = classical_identity_residual(Identity::Poisson, 2.0, &cfg)?.residual;
    let q = esseen1d::linspace(0.0, 1.0, 1001)
        .into_iter()
        .map(|v| (kernels::q_eval(v) + kernels::q_eval(1.0 - v) - 1.0 / PI).abs())
        .fold(0.0, f64::max);
    outcome(
        fejer <= 1e-8 && pars_err <= 1e-8 && poisson <= 1e-12 && q <= 1e-12,
        format!(
            "Fejer {fejer:.1e}, Parseval {pars_err:.1e}, Poisson {poisson:.1e}, Q symmetry {q:.1e}"
        ),
    )
}

fn c6_esseen_1d() -> Result<Outcome> {
    let t = Instant::now();
    let normal = Distribution1D::normal(0.0, 1.0);
    let cfg = EsseenConfig::default();
    let grid = esseen1d::linspace(-5.0, 5.0, 2001);
    let mut ok = true;
    let mut totals = Vec::new();
    for n in [25u64, 100, 400] {
        let f = Distribution1D::binomial_standardized(n, 0.5)?;
        let best = esseen1d::optimize_omega(&f, &normal, -2..=9, &cfg)?;
        for &x in &grid {
            let d = (f.cdf(x) - normal.cdf(x))
                .abs()
                .max((f.cdf_left(x) - normal.cdf(x)).abs());
            ok &= d <= best.total;
        }
        totals.push(best.total);
    }
    let mono = totals.windows(2).all(|w| w[1] < w[0]);
    let el = t.elapsed();
    outcome(
        ok && mono && el < Duration::from_secs(30),
        format!("optimized bounds {totals:.5?} for n = 25, 100, 400, {el:.2?}"),
    )
}

fn c7_ring() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut exact_bad = 0;
    for k in 2..=4 {
        let ring = em::selberg_ring_expansion(k)?;
        for _ in 0..100 {
            let c = uniform(&mut rng, k, -1.0, 1.0);
            let d = uniform(&mut rng, k, -1.0, 1.0);
            let e = uniform(&mut rng, k, -1.0, 1.0);
            worst = worst.max(ring.residual(&c, &d, &e).abs());
            let mut q = || -> Vec<BigRational> {
                (0..k)
                    .map(|_| {
                        BigRational::new(
                            BigInt::from(rng.random_range(-500i64..500)),
                            BigInt::from(rng.random_range(1i64..500)),
                        )
                    })
                    .collect()
            };
            let (c, d, e) = (q(), q(), q());
            if !ring.residual(&c, &d, &e).is_zero() {
                exact_bad += 1;
            }
        }
    }
    use Symbol::{Chi, Delta, Eps};
    let mut got: Vec<Vec<Symbol>> = em::selberg_ring_expansion(2)?
        .s
        .iter()
        .map(|m| m.symbols.clone())
        .collect();
    got.sort();
    let mut want = vec![
        vec![Delta, Chi],
        vec![Chi, Delta],
        vec![Delta, Eps],
        vec![Eps, Delta],
        vec![Eps, Eps],
    ];
    want.sort();
    outcome(
        worst <= 1e-12 && exact_bad == 0 && got == want,
        format!("float residual {worst:.1e}, {exact_bad} nonzero rational residuals, k = 2 set matches: {}", got == want),
    )
}

fn trig_poly(rng: &mut ChaCha8Rng, k: usize) -> impl Fn(&[f64]) -> Complex64 + Sync {
    let terms: Vec<(Vec<f64>, f64)> = (0..5)
        .map(|_| (uniform(rng, k, -2.0, 2.0), rng.random_range(-1.0..1.0)))
        .collect();
    move |v: &[f64]| {
        terms
            .iter()
            .map(|(m, c)| Complex64::from_polar(*c, m.iter().zip(v).map(|(a, b)| a * b).sum()))
            .sum()
    }
}

fn c8_operators() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for k in 1..=3 {
        let f = trig_poly(&mut rng, k);
        for _ in 0..20 {
            let v = uniform(&mut rng, k, -3.0, 3.0);
            let z = |w: &[Op]| apply_operator(w, &f, &v);
            for j in 0..k {
                let ops = [Op::d(j), Op::e(j), Op::p(j), Op::delta(j)];
                let mut res = vec![
                    z(&[Op::d(j), Op::e(j)]).norm(),
                    z(&[Op::d(j), Op::p(j)]).norm(),
                    (z(&[Op::d(j), Op::delta(j)]) - z(&[Op::d(j)])).norm(),
                    (z(&[Op::e(j), Op::p(j)]) - z(&[Op::p(j)])).norm(),
                    z(&[Op::p(j), Op::delta(j)]).norm(),
                    (z(&[Op::p(j)]) + z(&[Op::d(j)]) + z(&[Op::e(j), Op::delta(j)]) - z(&[]))
                        .norm(),
                ];
                for o in ops {
                    res.push((z(&[o, o]) - z(&[o])).norm());
                    for a in 0..k {
                        for q in [Op::d(a), Op::e(a), Op::p(a), Op::delta(a)] {
                            res.push((z(&[o, q]) - z(&[q, o])).norm());
                        }
                    }
                }
                worst = res.into_iter().fold(worst, f64::max);
            }
        }
    }
    let mut fact: f64 = 0.0;
    let a = [0.8, 1.1];
    let f = |v: &[f64]| Complex64::new(v.iter().zip(&a).map(|(x, a)| (a * x).cos()).product(), 0.0);
    let d1 = |v: &[f64]| {
        Complex64::new(
            v.iter().zip(&a).map(|(x, a)| -a * (a * x).sin()).product(),
            0.0,
        )
    };
    let d2 = |v: &[f64]| {
        Complex64::new(
            v.iter()
                .zip(&a)
                .map(|(x, a)| -a * a * (a * x).cos())
                .product(),
            0.0,
        )
    };
    for v in [[0.7, -0.3], [1.2, 0.9], [-2.1, 1.6]] {
        for (which, d) in [
            (
                em::Factorization::Mixed,
                &d1 as &(dyn Fn(&[f64]) -> Complex64 + Sync),
            ),
            (em::Factorization::Delta, &d1),
            (em::Factorization::EDelta, &d2),
        ] {
            fact = fact.max(em::factorization_residual(&f, Some(d), 2, which, &v)?.residual);
        }
    }
    outcome(
        worst <= 1e-12 && fact <= 1e-8,
        format!("algebra residual {worst:.1e}, factorization residual {fact:.1e}"),
    )
}

fn c9_multivariate() -> Result<Outcome> {
    let t = Instant::now();
    let f = LawK::binomial_product(2, 64, 0.5)?;
    let g = LawK::standard_normal(2)?;
    let cfg = MultiConfig::new(2)?;
    let om = [15.0, 15.0];
    let (d, _) = em::sup_distance_k(&f, &g, &esseen1d::linspace(-3.0, 3.0, 25))?;
    let mut ok = true;
    let mut plain_min = f64::INFINITY;
    for tp in [
        [0.0, 0.0],
        [0.5, -0.5],
        [1.0, 1.0],
        [-1.5, 0.25],
        [2.0, -2.0],
    ] {
        let b = em::esseen_bound_k(&f, &g, &om, &tp, &cfg)?;
        ok &= b.total.is_finite() && b.total >= (f.cdf(&tp) - g.cdf(&tp)).abs();
        plain_min = plain_min.min(b.total);
    }
    let a = em::esseen_bound_truncated(
        &f,
        &g,
        &om,
        &TruncationMap::variant_a(4.0),
        &TruncatedMode::A,
        &cfg,
    )?;
    ok &= a.total.is_finite() && a.total >= d;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut box_max: f64 = 0.0;
    for _ in 0..10 {
        let lo = uniform(&mut rng, 2, -2.0, 0.5);
        let hi: Vec<f64> = lo.iter().map(|x| x + rng.random_range(0.2..1.5)).collect();
        let mode = TruncatedMode::B {
            a: lo.clone(),
            b: hi.clone(),
        };
        let b =
            em::esseen_bound_truncated(&f, &g, &om, &TruncationMap::variant_b(2.0), &mode, &cfg)?;
        let gap = (f.box_measure(&lo, &hi) - g.box_measure(&lo, &hi)).abs();
        ok &= b.total.is_finite() && b.total >= gap;
        box_max = box_max.max(gap);
    }
    let s = em::esseen_bound_slab(&f, &g, &om, &cfg)?;
    ok &= s.total.is_finite() && s.total >= d;
    let el = t.elapsed();
    outcome(
        ok && el <= Duration::from_secs(300),
        format!(
            "sup distance {d:.4}: plain >= {plain_min:.4}, A {:.4}, slab {:.4}; box gaps <= {box_max:.4}; {el:.2?}",
            a.total, s.total
        ),
    )
}

/// `J0(r)` by its power series, adequate for `r <= 1`.
fn j0_series(r: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..30 {
        term *= -(r * r / 4.0) / (k * k) as f64;
        sum += term;
    }
    sum
}

fn c10_clt() -> Result<Outcome> {
    let t = Instant::now();
    let law = clt::haar_circle_law();
    let ones = CoefficientScheme::ones();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut excess = f64::NEG_INFINITY;
    let mut oracle: f64 = 0.0;
    for n in [100usize, 400, 1600] {
        for _ in 0..20 {
            let xi = Complex64::from_polar(
                rng.random_range(0.0..1.0f64).sqrt(),
                rng.random_range(0.0..2.0 * PI),
            );
            let g = clt::gaussian_limit_gap(&law, &ones, n, &[xi], 1.0)?;
            // independent value of N log J0(|xi| / sqrt N)
            let direct = n as f64 * j0_series(xi.norm() / (n as f64).sqrt()).ln();
            oracle = oracle.max((g.log_phi.0 - direct).abs() + g.log_phi.1.abs());
            let gap = (direct + 0.25 * xi.norm_sqr()).abs();
            excess = excess.max(gap - 2.0 / 3.0 / (n as f64).sqrt());
        }
    }
    let mc = MonteCarloConfig {
        seed: 7,
        samples: 100_000,
    };
    let draws = clt::sample_statistic(&law, &ones, 400, mc)?;
    let nd = Normal::new(0.0, 0.5f64.sqrt()).expect("valid normal");
    let ks = |mut xs: Vec<f64>| {
        xs.sort_by(f64::total_cmp);
        let m = xs.len() as f64;
        xs.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
            let c = nd.cdf(x);
            acc.max((i as f64 + 1.0) / m - c).max(c - i as f64 / m)
        })
    };
    let ks_re = ks(draws.iter().map(|d| d[0].re).collect());
    let ks_im = ks(draws.iter().map(|d| d[0].im).collect());
    // E|T|^2 = 1 and E T^2 = 0
    let m = draws.len() as f64;
    let mean_sd = |vals: Vec<Complex64>| {
        let mean = vals.iter().sum::<Complex64>() / m;
        let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (m - 1.0);
        (mean, (var / m).sqrt())
    };
    let (abs2, se_abs2) = mean_sd(
        draws
            .iter()
            .map(|d| Complex64::new(d[0].norm_sqr(), 0.0))
            .collect(),
    );
    let (sq, se_sq) = mean_sd(draws.iter().map(|d| d[0] * d[0]).collect());
    let z_abs2 = (abs2 - 1.0).norm() / se_abs2;
    let z_sq = sq.norm() / se_sq;
    let el = t.elapsed();
    outcome(
        excess <= 0.0
            && oracle <= 1e-12
            && ks_re <= 0.01
            && ks_im <= 0.01
            && z_abs2 <= 4.0
            && z_sq <= 4.0
            && el < Duration::from_secs(60),
        format!(
            "gap - (2/3)N^-1/2 <= {excess:.2e}, log oracle {oracle:.1e}, KS {ks_re:.4}/{ks_im:.4}, covariance z {z_abs2:.2}/{z_sq:.2}, {el:.2?}"
        ),
    )
}

fn c11_vector_clt() -> Result<Outcome> {
    let alt = CoefficientScheme::alternating_pair();
    // odd N: for even N the alternating residual vanishes identically
    let ns = [11usize, 101, 1001, 10_001];
    let mut res = Vec::new();
    let mut sums = Vec::new();
    for &n in &ns {
        let s = clt::lyapunov_normalizer(&alt, n)?;
        res.push(s.matrix_residual.unwrap_or(f64::INFINITY));
        sums.push(s.lyapunov_sum);
    }
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]) && v[v.len() - 1] <= 0.1 * v[0];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = f64::NEG_INFINITY;
    let mut tested = 0;
    for law in [clt::haar_circle_law(), clt::complex_gaussian_law(1.0)?] {
        for n in [100usize, 400, 1600] {
            for _ in 0..20 {
                let mut x = || {
                    Complex64::from_polar(
                        rng.random_range(0.0..1.0),
                        rng.random_range(0.0..2.0 * PI),
                    )
                };
                let xi = [x(), x()];
                let g = clt::gaussian_limit_gap(&law, &alt, n, &xi, 1.0)?;
                tested += 1;
                worst = worst.max(if g.admissible {
                    g.gap - g.bound
                } else {
                    f64::INFINITY
                });
            }
        }
    }
    outcome(
        dec(&res) && dec(&sums) && worst <= 0.0,
        format!(
            "residuals {}, sums {}, gap - bound <= {worst:.2e} over {tested} points",
            sci(&res),
            sci(&sums)
        ),
    )
}

fn sci(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.2e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("lambda constant", c1_lambda),
        ("majorant integrals", c2_integrals),
        ("W consistency", c3_w_consistency),
        ("majorant suites", c4_majorants),
        ("identity suite", c5_identities),
        ("one-dimensional smoothing bound", c6_esseen_1d),
        ("ring identity", c7_ring),
        ("operator algebra", c8_operators),
        ("multivariate bounds", c9_multivariate),
        ("quantitative CLT", c10_clt),
        ("vector CLT", c11_vector_clt),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail}",
            if passed { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
