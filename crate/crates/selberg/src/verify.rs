//! Verification suites. Every check reports a measured residual or slack
//! against a tolerance and passes iff `measured <= tolerance`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clt::{self, CoefficientScheme, ComplexLawSpec, Inequality, MonteCarloConfig};
use crate::error::{Error, Result};
use crate::esseen1d::{self, Distribution1D, EsseenConfig};
use crate::esseen_multi::{
    self as em, apply_operator, Factorization, LawK, MultiConfig, Op, Symbol, Transform,
    TruncatedMode, TruncationMap,
};
use crate::interpolation::{self as interp, CardinalMode, Identity, IdentityConfig, SampleSet};
use crate::kernels::{self, KernelConfig, KernelKind};
use crate::quad::{integrate, QuadOptions};
use crate::special::{sine_integral, zeta_int};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    Kernels,
    Interpolation,
    Esseen1d,
    EsseenK,
    Clt,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 5] = [
        Suite::Kernels,
        Suite::Interpolation,
        Suite::Esseen1d,
        Suite::EsseenK,
        Suite::Clt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernels => "kernels",
            Suite::Interpolation => "interpolation",
            Suite::Esseen1d => "esseen1d",
            Suite::EsseenK => "esseen_k",
            Suite::Clt => "clt",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "kernels" => Suite::Kernels,
            "interpolation" => Suite::Interpolation,
            "esseen1d" => Suite::Esseen1d,
            "esseen_k" | "esseen-k" => Suite::EsseenK,
            "clt" => Suite::Clt,
            "all" => Suite::All,
            other => return Err(Error::InvalidInput(format!("unknown suite {other}"))),
        })
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

/// Seed, Monte Carlo sizes and tolerance overrides for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Draws for the moment contract.
    pub moment_samples: usize,
    /// Replicas for the Monte Carlo CLT checks.
    pub clt_samples: usize,
    /// Replaces every default tolerance.
    pub tol: Option<f64>,
    /// Per-check tolerances, keyed `suite.name` or `name`.
    pub overrides: BTreeMap<String, f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            moment_samples: 1_000_000,
            clt_samples: 100_000,
            tol: None,
            overrides: BTreeMap::new(),
        }
    }
}

impl VerifyOptions {
    fn tolerance(&self, suite: &str, name: &str, default: f64) -> f64 {
        self.overrides
            .get(&format!("{suite}.{name}"))
            .or_else(|| self.overrides.get(name))
            .copied()
            .or(self.tol)
            .unwrap_or(default)
    }
}

struct Runner<'a> {
    suite: Suite,
    opts: &'a VerifyOptions,
    out: Vec<Check>,
}

impl<'a> Runner<'a> {
    fn new(suite: Suite, opts: &'a VerifyOptions) -> Self {
        Self {
            suite,
            opts,
            out: Vec::new(),
        }
    }

    fn check<F>(&mut self, name: &str, default_tol: f64, f: F)
    where
        F: FnOnce() -> Result<(f64, String)>,
    {
        let suite = self.suite.name();
        let tolerance = self.opts.tolerance(suite, name, default_tol);
        let (measured, detail) = match f() {
            Ok(x) => x,
            Err(e) => (f64::INFINITY, format!("error: {e}")),
        };
        self.out.push(Check {
            suite: suite.into(),
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            detail,
        });
    }
}

/// Run one suite, or all of them in module order.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<Check> {
    match suite {
        Suite::All => Suite::MODULES
            .iter()
            .flat_map(|&s| run_suite(s, opts))
            .collect(),
        Suite::Kernels => kernel_checks(opts),
        Suite::Interpolation => interpolation_checks(opts),
        Suite::Esseen1d => esseen1d_checks(opts),
        Suite::EsseenK => esseen_k_checks(opts),
        Suite::Clt => clt_checks(opts),
    }
}

fn eval(kind: KernelKind, x: f64) -> f64 {
    kernels::kernel_family_eval(kind, x, &KernelConfig::default()).expect("finite argument")
}

fn uniform_points(rng: &mut ChaCha8Rng, n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(a..b)).collect()
}

/// Points whose distance to the nearest integer is at least `gap`.
fn off_integer_points(rng: &mut ChaCha8Rng, n: usize, r: f64, gap: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let base = rng.random_range(-r..r).floor();
            base + rng.random_range(gap..1.0 - gap)
        })
        .collect()
}

fn sci(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Distance of `target` from `[lo, hi]`.
fn outside(target: f64, lo: f64, hi: f64) -> f64 {
    (lo - target).max(target - hi).max(0.0)
}

/// `int (f - g)` over `[-x, x + l]` with breaks at every integer (and at `l`).
fn integral_bracket<F: Fn(f64) -> f64>(f: F, l: f64, x: f64) -> Result<(f64, f64)> {
    let mut breaks: Vec<f64> = ((-x) as i64 + 1..(x + l) as i64)
        .map(|k| k as f64)
        .collect();
    breaks.push(l);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let q = integrate(f, -x, x + l, &breaks, QuadOptions::abs(1e-11))?;
    Ok((q.value, q.error))
}

fn kernel_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut r = Runner::new(Suite::Kernels, opts);
    let cfg = KernelConfig::default();
    let pts = uniform_points(&mut r_rng(opts, 1), 100_000, -50.0, 50.0);

    r.check("majorant-order", 0.0, || {
        let v = max_of(
            pts.par_iter()
                .map(|&x| {
                    let s = kernels::sgn(x);
                    (eval(KernelKind::Bminus, x) - s).max(s - eval(KernelKind::B, x))
                })
                .collect::<Vec<_>>(),
        );
        Ok((
            v,
            "max of b - sgn and sgn - B over 1e5 points in [-50, 50]".into(),
        ))
    });

    let strict = off_integer_points(&mut r_rng(opts, 2), 1000, 50.0, 0.01);
    r.check("majorant-strict", 0.0, || {
        let bad = strict
            .iter()
            .filter(|&&x| {
                let s = kernels::sgn(x);
                !(eval(KernelKind::B, x) > s && eval(KernelKind::Bminus, x) < s)
            })
            .count();
        Ok((bad as f64, "points off Z where b < sgn < B fails".into()))
    });

    r.check("oddness", 1e-12, || {
        let v = max_of(pts.iter().take(2000).map(|&x| {
            let w = (eval(KernelKind::W, x) + eval(KernelKind::W, -x)).abs();
            let b = (eval(KernelKind::B, x) + eval(KernelKind::B, -x) - 2.0 * kernels::fejer_k(x))
                .abs();
            w.max(b)
        }));
        Ok((v, "|W(x) + W(-x)|, |B(x) + B(-x) - 2K(x)|".into()))
    });

    r.check("w-windows", 0.0, || {
        let v = max_of(
            pts.par_iter()
                .map(|&x| {
                    let (w, k) = (eval(KernelKind::W, x), kernels::fejer_k(x));
                    if x > 0.0 {
                        outside(w, 1.0 - k, 1.0)
                    } else {
                        outside(w, -1.0, -1.0 + k)
                    }
                })
                .collect::<Vec<_>>(),
        );
        Ok((
            v,
            "distance of W from [1-K, 1] (x > 0) or [-1, -1+K] (x < 0)".into(),
        ))
    });

    r.check("two-k-gap", 0.0, || {
        let v = max_of(
            pts.par_iter()
                .map(|&x| {
                    let (s, k2) = (kernels::sgn(x), 2.0 * kernels::fejer_k(x));
                    ((eval(KernelKind::B, x) - s).abs() - k2)
                        .max((eval(KernelKind::Bminus, x) - s).abs() - k2)
                })
                .collect::<Vec<_>>(),
        );
        Ok((v.max(0.0), "excess of |B - sgn|, |b - sgn| over 2K".into()))
    });

    let ells = [0.5, 1.0, 2.0, 7.5];
    r.check("interval-majorants", 0.0, || {
        let v = max_of(ells.iter().map(|&l| {
            max_of(
                pts.par_iter()
                    .map(|&x| {
                        let c = kernels::chi_interval(l, x);
                        let (up, lo) = (eval(KernelKind::S(l), x), eval(KernelKind::Sigma(l), x));
                        let gap = kernels::fejer_k(x) + kernels::fejer_k(l - x);
                        (lo - c).max(c - up).max((up - c).max(c - lo) - gap)
                    })
                    .collect::<Vec<_>>(),
            )
        }));
        Ok((
            v,
            "sigma <= chi <= S and max-gap <= K(x) + K(l-x), l in {0.5, 1, 2, 7.5}".into(),
        ))
    });

    let x_cut = 50.0;
    let tail = 4.0 / (PI * PI * x_cut);
    r.check("sgn-integrals", 1e-6, || {
        let (up, eu) = integral_bracket(|x| eval(KernelKind::B, x) - kernels::sgn(x), 0.0, x_cut)?;
        let (lo, el) = integral_bracket(
            |x| kernels::sgn(x) - eval(KernelKind::Bminus, x),
            0.0,
            x_cut,
        )?;
        let v = outside(1.0, up - eu, up + tail + eu).max(outside(1.0, lo - el, lo + tail + el));
        Ok((
            v,
            format!("int(B - sgn) = {up:.9}, int(sgn - b) = {lo:.9} on [-50, 50], tail {tail:.3e}"),
        ))
    });

    r.check("interval-integrals", 1e-6, || {
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for &l in &[1.0, 2.0, 7.5] {
            let (up, eu) = integral_bracket(
                |x| eval(KernelKind::S(l), x) - kernels::chi_interval(l, x),
                l,
                x_cut,
            )?;
            let (lo, el) = integral_bracket(
                |x| kernels::chi_interval(l, x) - eval(KernelKind::Sigma(l), x),
                l,
                x_cut,
            )?;
            worst = worst
                .max(outside(1.0, up - eu, up + tail + eu))
                .max(outside(1.0, lo - el, lo + tail + el));
            parts.push(format!("l={l}: {up:.9}/{lo:.9}"));
        }
        Ok((worst, parts.join(", ")))
    });

    r.check("fast-vs-oracle", 1e-10, || {
        let xs = uniform_points(&mut r_rng(opts, 3), 1000, -30.0, 30.0);
        let diffs: Result<Vec<f64>> = xs
            .par_iter()
            .map(|&x| Ok((kernels::w_fast(x, &cfg) - kernels::w_oracle(x, &cfg)?.value).abs()))
            .collect();
        Ok((
            max_of(diffs?),
            "1000 points in [-30, 30], oracle series 1e6 terms".into(),
        ))
    });

    r.check("fourier-w", 1e-8, || {
        let mut xs: Vec<f64> = esseen1d::linspace(-5.85, 5.85, 23);
        xs.extend([0.5, -0.5]);
        let diffs: Result<Vec<f64>> = xs
            .par_iter()
            .map(|&x| {
                Ok((kernels::fourier_w_check(x, &cfg)?.value - kernels::w_fast(x, &cfg)).abs())
            })
            .collect();
        let half = (kernels::fourier_w_check(0.5, &cfg)?.value - 8.0 / (PI * PI)).abs();
        Ok((
            max_of(diffs?).max(half),
            format!("25 points incl. +-1/2; |W(1/2) - 8/pi^2| = {half:.2e}"),
        ))
    });

    r.check("interpolatory-format", 1e-12, || {
        let xs = uniform_points(&mut r_rng(opts, 4), 300, -20.0, 20.0);
        let v = max_of([1u32, 2, 3, 5].iter().flat_map(|&l| {
            xs.iter().map(move |&z| {
                (eval(KernelKind::S(l as f64), z) - kernels::interpolatory_format(l, 1.0, 1.0, z))
                    .abs()
            })
        }));
        Ok((
            v,
            "S_l against the direct form with A = B = 1, l in {1, 2, 3, 5}".into(),
        ))
    });

    r.check("taylor-identity", 1e-6, || {
        let m = 3;
        let mut worst = 0.0f64;
        for i in 0..40 {
            let x = (0.2 + 0.2 * i as f64 / 39.0) * if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = kernels::w_oracle(x, &cfg)?.value;
            let mut series = 2.0 * x;
            for j in 1..=m {
                series += 4.0 * j as f64 * zeta_int(2 * j as u32 + 1) * x.powi(2 * j + 1);
            }
            let rem = w / kernels::fejer_k(x) - series;
            let first = 4.0 * (m + 1) as f64 * zeta_int(2 * m as u32 + 3) * x.powi(2 * m + 3);
            // same-sign tail: first <= rem <= first / (1 - x^2)^2
            let upper = first / (1.0 - x * x).powi(2);
            worst = worst.max(outside(rem.abs(), first.abs(), upper.abs()) / first.abs());
        }
        Ok((worst, "W/K - 2x - sum_{m<=3} 4m zeta(2m+1) x^(2m+1) against the omitted tail, 0.2 <= |x| <= 0.4".into()))
    });

    r.check("decay", 0.05, || {
        let xs = esseen1d::linspace(5.0, 100.0, 4000);
        Ok((
            kernels::w_decay_diagnostic(&xs, &cfg),
            "max |W - sgn| x^3 on [5, 100]".into(),
        ))
    });

    r.check("lambda", 5e-8, || {
        let l = kernels::lambda_constant(5e-8);
        Ok(((l - 0.3263598).abs(), format!("lambda = {l:.10}")))
    });

    r.check("closed-forms", 1e-14, || {
        let pi2 = PI * PI;
        let v = max_of([
            (eval(KernelKind::W, 0.5) - 8.0 / pi2).abs(),
            (eval(KernelKind::K, 0.5) - 4.0 / pi2).abs(),
            (eval(KernelKind::B, 0.5) - 12.0 / pi2).abs(),
            (eval(KernelKind::B, 0.0) - 1.0).abs(),
            eval(KernelKind::K, 1.0).abs(),
        ]);
        Ok((
            v,
            "W(1/2) = 8/pi^2, K(1/2) = 4/pi^2, B(1/2) = 12/pi^2, B(0) = 1, K(1) = 0".into(),
        ))
    });

    r.check("q-symmetry", 1e-12, || {
        let v = max_of(
            esseen1d::linspace(0.0, 1.0, 1001)
                .into_iter()
                .map(|v| (kernels::q_eval(v) + kernels::q_eval(1.0 - v) - 1.0 / PI).abs()),
        );
        Ok((v, "Q(v) + Q(1-v) = 1/pi on [0, 1]".into()))
    });

    r.check("extremal-family", 0.0, || {
        let grid = esseen1d::linspace(-10.0, 10.0, 10_000);
        let rep = kernels::extremal_family_check(1, 0.05, &grid, 100.5, &cfg)?;
        Ok((
            rep.violations as f64,
            format!("eta = 0.05, l = 1: min margin {:.3e}", rep.min_margin),
        ))
    });

    r.check("extremal-extra-integral", 2.0 / (PI * PI * 99.5), || {
        let rep = kernels::extremal_family_check(1, 0.05, &[], 100.5, &cfg)?;
        Ok((
            rep.extra_integral.abs() + rep.extra_error,
            "|int_{-R}^{R} perturbation|, R = 100.5".into(),
        ))
    });

    r.out
}

fn r_rng(opts: &VerifyOptions, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn interpolation_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut r = Runner::new(Suite::Interpolation, opts);
    let icfg = IdentityConfig::default();
    let id = |w: Identity, a: f64| interp::classical_identity_residual(w, a, &icfg);

    r.check("parseval", 1e-8, || {
        let rep = id(Identity::ParsevalSampling, 1.0)?;
        let v = (rep.lhs - 2.0 / 3.0).abs().max((rep.rhs - 2.0 / 3.0).abs());
        Ok((
            v,
            format!(
                "sampling side {:.12}, integral side {:.12}",
                rep.lhs, rep.rhs
            ),
        ))
    });

    r.check("bernstein", 0.0, || {
        let mut v = 0.0f64;
        for m in [0.0, 1.0] {
            let rep = id(Identity::Bernstein, m)?;
            v = v.max(rep.lhs - rep.rhs);
        }
        Ok((
            v.max(0.0),
            "sup |K^(m)| minus the bound, m in {0, 1}".into(),
        ))
    });

    r.check("poisson", 1e-12, || {
        let rep = id(Identity::Poisson, 2.0)?;
        Ok((rep.residual, format!("a = 2: {:.15}", rep.lhs)))
    });

    r.check("fejer", 1e-8, || {
        let v = max_of(
            [0.37, 2.5, -7.1, 1e-3, 30.25]
                .iter()
                .map(|&x| id(Identity::Fejer, x).map(|rep| rep.residual))
                .collect::<Result<Vec<_>>>()?,
        );
        Ok((v, "(sin pi x / pi)^2 sum (x-n)^-2 = 1".into()))
    });

    r.check("csc", 1e-12, || {
        let v = max_of(
            [0.5, 0.25, 1.3, -2.7]
                .iter()
                .map(|&w| id(Identity::Csc, w).map(|rep| (rep.residual - rep.tail_bound).max(0.0)))
                .collect::<Result<Vec<_>>>()?,
        );
        Ok((
            v,
            "partial-fraction csc series beyond its next-term bound".into(),
        ))
    });

    r.check("sandwich", 0.0, || {
        let mut bad = 0;
        for w in [0.5, 1.0, 2.0, 10.0, 100.0] {
            for which in [Identity::Sandwich, Identity::RefinedSandwich] {
                if !id(which, w)?.holds {
                    bad += 1;
                }
            }
        }
        Ok((bad as f64, "failed sandwich bounds for sum (n+w)^-2".into()))
    });

    r.check("cardinal-idempotence", 1e-12, || {
        let f = |x: f64| kernels::fejer_k(x).powi(2);
        let s1 = SampleSet::cardinal(2.0, 2000, f)?
            .with_decay(4.0)
            .with_tol(1e-8);
        let g1 = |z: f64| interp::cardinal_series(&s1, z, CardinalMode::Basic);
        let s2 = SampleSet::cardinal(4.0, 1600, |z| g1(z).map(|e| e.value).unwrap_or(f64::NAN))?
            .with_decay(4.0)
            .with_tol(1e-8);
        let mut worst = 0.0f64;
        for z in [0.3, 1.7, -2.45, 5.55, 0.0625] {
            let (a, b) = (
                g1(z)?,
                interp::cardinal_series(&s2, z, CardinalMode::Basic)?,
            );
            worst = worst.max((a.value - b.value).abs() - a.err_est - b.err_est);
        }
        Ok((
            worst.max(0.0),
            "K^2 resampled at twice the rate, excess over the tail estimates".into(),
        ))
    });

    r.check("extended-vs-basic", 0.0, || {
        let basic = SampleSet::cardinal(1.0, 4000, kernels::fejer_k)?;
        let ext = SampleSet::cardinal(1.0, 4000, |x| x * kernels::fejer_k(x))?
            .with_origin(0.0, 1.0)
            .with_decay(1.0)
            .with_tol(1e-3);
        let mut worst = f64::NEG_INFINITY;
        for z in [0.3, 1.2, -2.6, 7.75] {
            let b = interp::cardinal_series(&basic, z, CardinalMode::Basic)?;
            let e = interp::cardinal_series(&ext, z, CardinalMode::Extended)?;
            worst = worst.max((e.value / z - b.value).abs() - e.err_est / z.abs() - b.err_est);
        }
        Ok((
            worst.max(0.0),
            "extended form on zK(z) divided by z against the basic form on K".into(),
        ))
    });

    r.check("vaaler", 1e-14, || {
        let f = |x: f64| kernels::fejer_k(0.5 * x).powi(2);
        let df = |x: f64| kernels::fejer_k(0.5 * x) * kernels::fejer_k_prime(0.5 * x);
        let s = SampleSet::vaaler(1.0, 400, f, df)?.with_decay(4.0);
        let mut worst = 0.0f64;
        for z in [0.25, 1.6, -3.3, 10.5] {
            let e = interp::vaaler_interpolation(&s, z)?;
            worst = worst.max((e.value - f(z)).abs() - e.err_est);
        }
        Ok((
            worst.max(0.0),
            "K(x/2)^2 from values and derivatives on Z".into(),
        ))
    });

    r.out
}

fn esseen1d_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut r = Runner::new(Suite::Esseen1d, opts);
    let cfg = EsseenConfig::default();
    let normal = Distribution1D::normal(0.0, 1.0);

    for (name, upper) in [
        ("representation-upper", true),
        ("representation-lower", false),
    ] {
        r.check(name, 1e-6, || {
            let mut v = 0.0f64;
            for x in [0.3, 1.7, -2.4] {
                let a = esseen1d::smoothing_representation(x, upper, 1e-10)?;
                v = v.max((a - esseen1d::representation_target(x, upper)).abs());
            }
            Ok((
                v,
                "pv integral of [1/(pi i v) + R(v)] e^(2 pi i x v) at x in {0.3, 1.7, -2.4}".into(),
            ))
        });
    }

    let grid = esseen1d::linspace(-5.0, 5.0, 2001);
    r.check("bound-validity", 0.0, || {
        let cases: Vec<(Distribution1D, f64)> = vec![
            (Distribution1D::binomial_standardized(25, 0.5)?, 5.0),
            (Distribution1D::binomial_standardized(25, 0.5)?, 20.0),
            (Distribution1D::binomial_standardized(100, 0.5)?, 20.0),
            (Distribution1D::binomial_standardized(40, 0.3)?, 10.0),
            (Distribution1D::irwin_hall_standardized(3)?, 10.0),
        ];
        let mut worst = f64::NEG_INFINITY;
        for (f, w) in &cases {
            let d = esseen1d::sup_cdf_distance(f, &normal, &grid);
            let b = esseen1d::esseen_bound_1d(f, &normal, *w, &cfg)?;
            worst = worst.max(d - b.total);
        }
        Ok((
            worst.max(0.0),
            format!(
                "{} (F, G, W) triples; excess of sup distance over the bound",
                cases.len()
            ),
        ))
    });

    r.check("tail-monotone", 0.0, || {
        let f = Distribution1D::binomial_standardized(100, 0.5)?;
        let reps: Vec<_> = (-2..=9)
            .map(|j| esseen1d::esseen_bound_1d(&f, &normal, 2f64.powi(j), &cfg))
            .collect::<Result<_>>()?;
        let mut worst = max_of(reps.windows(2).map(|w| w[1].tail_term - w[0].tail_term));
        let best = esseen1d::optimize_omega(&f, &normal, -2..=9, &cfg)?;
        let min_fixed = reps.iter().map(|x| x.total).fold(f64::INFINITY, f64::min);
        worst = worst.max(best.total - min_fixed);
        Ok((
            worst.max(0.0),
            format!("tail term along W = 2^j; optimized total {:.6}", best.total),
        ))
    });

    r.check("mollify-contraction", 1e-12, || {
        let f = Distribution1D::binomial_standardized(25, 0.5)?;
        let base = esseen1d::sup_cdf_distance(&f, &normal, &grid);
        let mut worst = f64::NEG_INFINITY;
        for eps in [0.05, 0.2, 0.5] {
            let fe = esseen1d::gaussian_mollify(&f, eps)?;
            let ge = esseen1d::gaussian_mollify(&normal, eps)?;
            worst = worst.max(esseen1d::sup_cdf_distance(&fe, &ge, &grid) - base);
        }
        Ok((
            worst.max(0.0),
            format!("binomial(25) vs normal, unmollified distance {base:.6}"),
        ))
    });

    r.check("hermitian", 1e-14, || {
        let laws = vec![
            normal.clone(),
            Distribution1D::binomial_standardized(25, 0.3)?,
            Distribution1D::irwin_hall_standardized(3)?,
            esseen1d::gaussian_mollify(&Distribution1D::binomial_standardized(9, 0.5)?, 0.1)?,
            Distribution1D::point_mass(0.7),
        ];
        let zs = uniform_points(&mut r_rng(opts, 11), 1000, -50.0, 50.0);
        let v = max_of(
            laws.iter()
                .flat_map(|f| zs.iter().map(move |&z| (f.cf(-z) - f.cf(z).conj()).norm())),
        );
        Ok((v, "cf(-z) = conj cf(z), 1000 random z per law".into()))
    });

    r.check("pv-example", 1e-9, || {
        let h = |v: f64| Complex64::new(0.0, 2.0 * PI * v).exp() / Complex64::new(0.0, PI * v);
        let p = esseen1d::pv_integral(h, 1.0, 1e-11)?;
        let want = 2.0 / PI * sine_integral(2.0 * PI);
        Ok((
            (p.value() - want).norm(),
            "pv int e^(2 pi i v)/(pi i v) = (2/pi) Si(2 pi)".into(),
        ))
    });

    r.check("harness-monotone", 0.0, || {
        let rows = esseen1d::convergence_harness_1d(
            |n| Distribution1D::irwin_hall_standardized(n as u32),
            &normal,
            &[2, 4, 8, 16],
            &esseen1d::linspace(-4.0, 4.0, 401),
            &cfg,
        )?;
        let bad = rows
            .windows(2)
            .filter(|w| {
                !(w[1].sup_distance < w[0].sup_distance && w[1].bound.total <= w[0].bound.total)
            })
            .count()
            + rows
                .iter()
                .filter(|x| x.bound.total < x.sup_distance)
                .count();
        Ok((
            bad as f64,
            "Irwin-Hall n in {2, 4, 8, 16}: decreasing distances and bounds".into(),
        ))
    });

    r.out
}

fn cos_product(v: &[f64]) -> Complex64 {
    Complex64::new(
        v.iter()
            .enumerate()
            .map(|(j, x)| (0.8 + 0.3 * j as f64) * x)
            .map(|a| a.cos())
            .product(),
        0.0,
    )
}

/// Random Hermitian trigonometric polynomial `sum c_m e^{i m.v}` with real
/// coefficients, so that `f(-v) = conj f(v)`.
fn hermitian_poly(rng: &mut ChaCha8Rng, k: usize) -> impl Fn(&[f64]) -> Complex64 + Sync {
    let terms: Vec<(Vec<f64>, f64)> = (0..5)
        .map(|_| {
            let m: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
            (m, rng.random_range(-1.0..1.0))
        })
        .collect();
    move |v: &[f64]| {
        terms
            .iter()
            .map(|(m, c)| {
                let a: f64 = m.iter().zip(v).map(|(x, y)| x * y).sum();
                Complex64::from_polar(*c, a)
            })
            .sum()
    }
}

fn esseen_k_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut r = Runner::new(Suite::EsseenK, opts);

    r.check("ring-identity", 1e-12, || {
        let mut rng = r_rng(opts, 21);
        let mut worst = 0.0f64;
        for k in 2..=4 {
            let ring = em::selberg_ring_expansion(k)?;
            for _ in 0..100 {
                let mut draw =
                    || -> Vec<f64> { (0..k).map(|_| rng.random_range(-1.0..1.0)).collect() };
                let (c, d, e) = (draw(), draw(), draw());
                worst = worst
                    .max(ring.residual(&c, &d, &e).abs())
                    .max(ring.residual_tilde(&c, &e).abs());
            }
        }
        Ok((
            worst,
            "k in {2, 3, 4}, 100 random real assignments each".into(),
        ))
    });

    r.check("ring-identity-exact", 0.0, || {
        let mut rng = r_rng(opts, 22);
        let mut bad = 0;
        for k in 2..=4 {
            let ring = em::selberg_ring_expansion(k)?;
            for _ in 0..100 {
                let mut draw = || -> Vec<BigRational> {
                    (0..k)
                        .map(|_| {
                            BigRational::new(
                                BigInt::from(rng.random_range(-1000i64..1000)),
                                BigInt::from(rng.random_range(1i64..1000)),
                            )
                        })
                        .collect()
                };
                let (c, d, e) = (draw(), draw(), draw());
                use num_traits::Zero;
                if !ring.residual(&c, &d, &e).is_zero() || !ring.residual_tilde(&c, &e).is_zero() {
                    bad += 1;
                }
            }
        }
        Ok((
            bad as f64,
            "rational assignments with a nonzero residual".into(),
        ))
    });

    r.check("ring-k2-set", 0.0, || {
        use Symbol::{Chi, Delta, Eps};
        let ring = em::selberg_ring_expansion(2)?;
        let mut got: Vec<(Vec<Symbol>, u64)> = ring
            .s
            .iter()
            .map(|m| (m.symbols.clone(), m.multiplicity))
            .collect();
        got.sort();
        let mut want = vec![
            (vec![Delta, Chi], 1),
            (vec![Chi, Delta], 1),
            (vec![Delta, Eps], 1),
            (vec![Eps, Delta], 1),
            (vec![Eps, Eps], 1),
        ];
        want.sort();
        Ok((
            if got == want { 0.0 } else { 1.0 },
            format!("{} monomials", got.len()),
        ))
    });

    r.check("operator-algebra", 1e-12, || {
        let mut rng = r_rng(opts, 23);
        let mut worst = 0.0f64;
        for k in 1..=3 {
            let f = hermitian_poly(&mut rng, k);
            let g = |v: &[f64]| f(v) + Complex64::new(v[0] * v[0] * v[k - 1], 0.3 * v[0]);
            for _ in 0..20 {
                let v: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
                let z = |w: &[Op]| apply_operator(w, &g, &v);
                for j in 0..k {
                    let ops = [Op::d(j), Op::e(j), Op::p(j), Op::delta(j)];
                    let base = z(&[]);
                    let mut res = vec![
                        z(&[Op::d(j), Op::e(j)]).norm(),
                        z(&[Op::d(j), Op::p(j)]).norm(),
                        (z(&[Op::d(j), Op::delta(j)]) - z(&[Op::d(j)])).norm(),
                        (z(&[Op::e(j), Op::p(j)]) - z(&[Op::p(j)])).norm(),
                        z(&[Op::p(j), Op::delta(j)]).norm(),
                        (z(&[Op::p(j)]) + z(&[Op::d(j)]) + z(&[Op::e(j), Op::delta(j)]) - base)
                            .norm(),
                        // the three summands annihilate one another
                        z(&[Op::p(j), Op::e(j), Op::delta(j)]).norm(),
                        z(&[Op::d(j), Op::e(j), Op::delta(j)]).norm(),
                    ];
                    for o in ops {
                        res.push((z(&[o, o]) - z(&[o])).norm());
                    }
                    for a in 0..k {
                        for o in ops {
                            for q in [Op::d(a), Op::e(a), Op::p(a), Op::delta(a)] {
                                res.push((z(&[o, q]) - z(&[q, o])).norm());
                            }
                        }
                    }
                    worst = worst.max(max_of(res));
                }
            }
        }
        Ok((
            worst,
            "products, idempotents, commutators and the P + E Delta + D split, k <= 3".into(),
        ))
    });

    r.check("hermitian-preservation", 1e-12, || {
        let mut rng = r_rng(opts, 24);
        let mut worst = 0.0f64;
        for k in 1..=3 {
            let f = hermitian_poly(&mut rng, k);
            for _ in 0..20 {
                let v: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
                let mv: Vec<f64> = v.iter().map(|x| -x).collect();
                let herm = (f(&mv) - f(&v).conj()).norm();
                worst = worst.max(herm);
                for j in 0..k {
                    for word in [
                        vec![Op::d(j)],
                        vec![Op::e(j)],
                        vec![Op::p(j)],
                        vec![Op::delta(j)],
                        vec![Op::e(j), Op::delta(j)],
                    ] {
                        let a = apply_operator(&word, &f, &mv);
                        let b = apply_operator(&word, &f, &v);
                        worst = worst.max((a - b.conj()).norm());
                    }
                }
            }
        }
        Ok((
            worst,
            "W f(-v) = conj W f(v) for D, E, P, Delta, E Delta".into(),
        ))
    });

    r.check("factorization", 1e-8, || {
        let mut worst = 0.0f64;
        for m in 1..=2usize {
            let a: Vec<f64> = (0..m).map(|j| 0.8 + 0.3 * j as f64).collect();
            let a1 = a.clone();
            let d1 = move |v: &[f64]| {
                Complex64::new((0..m).map(|j| -a1[j] * (a1[j] * v[j]).sin()).product(), 0.0)
            };
            let a2 = a.clone();
            let d2 = move |v: &[f64]| {
                Complex64::new(
                    (0..m)
                        .map(|j| -a2[j] * a2[j] * (a2[j] * v[j]).cos())
                        .product(),
                    0.0,
                )
            };
            let f = |v: &[f64]| cos_product(&v[..m]);
            for v in [[0.7, -0.3], [1.2, 0.9], [-2.1, 1.6]] {
                for (which, d) in [
                    (
                        Factorization::Mixed,
                        &d1 as &(dyn Fn(&[f64]) -> Complex64 + Sync),
                    ),
                    (Factorization::Delta, &d1),
                    (Factorization::EDelta, &d2),
                ] {
                    let rep = em::factorization_residual(&f, Some(d), m, which, &v[..m])?;
                    worst = worst.max(rep.residual);
                }
            }
        }
        Ok((
            worst,
            "mixed, Delta and E Delta integral forms on product cosines".into(),
        ))
    });

    r.check("derivative-bounds", 0.0, || {
        let f = |w: &[f64]| {
            Complex64::new(0.0, 0.7 * w[0] - 1.3 * w[1]).exp()
                + Complex64::new(0.0, 2.1 * w[0] + 0.2 * w[1]).exp() * Complex64::new(0.3, -0.8)
        };
        let mut bad = 0;
        let mut total = 0;
        for v in [[0.5, 2.0], [1.5, -0.4]] {
            for which in [em::Which::Eq26, em::Which::Eq27, em::Which::Eq28] {
                for (h, delta) in [(1, 0), (1, 1), (2, 1), (0, 1)] {
                    let spec = em::DerivativeSpec {
                        which,
                        h,
                        ell: 1,
                        n: 1,
                        m: 2,
                        delta,
                    };
                    let c = em::derivative_bound_check(&f, spec, &v)?;
                    total += 1;
                    if !c.holds {
                        bad += 1;
                    }
                }
            }
        }
        Ok((
            bad as f64,
            format!("{total} derivative inequalities on a trigonometric sum"),
        ))
    });

    r.check("dirac-collapse", 1e-5, || {
        let f = |v: &[f64]| (-(v[0] * v[0]) - 0.5 * v[1] * v[1]).exp() * (1.0 + v[0]);
        let (c, s, d) = em::dirac_collapse_check(&f, &[6.0, 6.0], &[0], 1e-3)?;
        Ok((d / c.abs(), format!("collapsed {c:.10}, smeared {s:.10}")))
    });

    let f2 = LawK::binomial_product(2, 16, 0.5);
    let g2 = LawK::standard_normal(2);
    r.check("dominance-chain", 0.0, || {
        let (f, g) = (f2.clone()?, g2.clone()?);
        let cfg = MultiConfig::new(2)?;
        let plain = em::esseen_bound_k(&f, &g, &[4.0, 4.0], &[0.0, 0.0], &cfg)?;
        let tri = em::esseen_bound_truncated(
            &f,
            &g,
            &[4.0, 4.0],
            &TruncationMap::variant_a(4.0).with_transform(Transform::Triangle),
            &TruncatedMode::A,
            &cfg,
        )?;
        Ok((
            (plain.total - tri.total).max(0.0),
            format!(
                "plain at t = 0: {:.6}, triangle weights: {:.6}",
                plain.total, tri.total
            ),
        ))
    });

    r.check("bounds-vs-measured", 0.0, || {
        let (f, g) = (f2.clone()?, g2.clone()?);
        let cfg = MultiConfig::new(2)?;
        let grid = esseen1d::linspace(-3.0, 3.0, 13);
        let (d, _) = em::sup_distance_k(&f, &g, &grid)?;
        let mut worst = f64::NEG_INFINITY;
        let mut parts = Vec::new();
        for t in [
            [0.0, 0.0],
            [0.5, -0.5],
            [1.0, 1.0],
            [-1.5, 0.25],
            [2.0, -2.0],
        ] {
            let b = em::esseen_bound_k(&f, &g, &[8.0, 8.0], &t, &cfg)?;
            worst = worst.max((f.cdf(&t) - g.cdf(&t)).abs() - b.total);
        }
        let a = em::esseen_bound_truncated(
            &f,
            &g,
            &[8.0, 8.0],
            &TruncationMap::variant_a(4.0),
            &TruncatedMode::A,
            &cfg,
        )?;
        worst = worst.max(d - a.total);
        parts.push(format!("A {:.4} vs {d:.4}", a.total));
        let boxes = [
            ([0.0, 0.0], [1.0, 1.0]),
            ([-1.0, -0.5], [0.5, 1.0]),
            ([-2.0, 0.0], [0.0, 2.0]),
        ];
        for (lo, hi) in boxes {
            let tm = TruncationMap::variant_b(2.0);
            let mode = TruncatedMode::B {
                a: lo.to_vec(),
                b: hi.to_vec(),
            };
            let b = em::esseen_bound_truncated(&f, &g, &[8.0, 8.0], &tm, &mode, &cfg)?;
            worst = worst.max((f.box_measure(&lo, &hi) - g.box_measure(&lo, &hi)).abs() - b.total);
        }
        let s = em::esseen_bound_slab(&f, &g, &[8.0, 8.0], &cfg)?;
        worst = worst.max(d - s.total);
        parts.push(format!("slab {:.4}", s.total));
        Ok((
            worst.max(0.0),
            format!("binomial(16)^2 vs normal: {}", parts.join(", ")),
        ))
    });

    r.check("truncation-inequality", 0.0, || {
        let f = f2.clone()?;
        let mut worst = f64::NEG_INFINITY;
        for delta in [1.5, 2.0, 3.0] {
            for t in [[3.0, 0.5], [-4.0, 2.5], [2.2, -2.2], [5.0, 5.0]] {
                let (lhs, rhs) = em::truncation_check(&f, &t, delta)?;
                worst = worst.max(lhs - rhs);
            }
        }
        Ok((
            worst.max(0.0),
            "|F(t) - F(t*)| against k Delta^-alpha E max|x|^alpha".into(),
        ))
    });

    r.check("harness-k", 0.0, || {
        let g = LawK::standard_normal(2)?;
        let cfg = MultiConfig::new(2)?;
        let rows = em::convergence_harness_k(
            |n| LawK::irwin_hall_product(2, n as u32),
            &g,
            &[2, 4, 8],
            em::HarnessVariant::Plain,
            &esseen1d::linspace(-3.0, 3.0, 13),
            &cfg,
        )?;
        let bad = rows
            .windows(2)
            .filter(|w| !(w[1].measured < w[0].measured))
            .count()
            + rows
                .iter()
                .filter(|x| x.bound.total < x.measured || x.covariance_gap > 1e-5)
                .count();
        Ok((bad as f64, "Irwin-Hall products, n in {2, 4, 8}".into()))
    });

    r.out
}

fn random_xi(rng: &mut ChaCha8Rng, a: f64) -> Complex64 {
    Complex64::from_polar(
        a * rng.random_range(0.0f64..1.0).sqrt(),
        rng.random_range(0.0..2.0 * PI),
    )
}

fn builtin_laws() -> Vec<ComplexLawSpec> {
    vec![
        clt::haar_circle_law(),
        clt::rademacher_product_law(),
        clt::complex_gaussian_law(0.8).expect("positive beta"),
        clt::uniform_square_law(),
    ]
}

/// `true` when the sequence is non-increasing and its last value is at
/// most a tenth of its first.
fn tends_to_zero(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)) && xs[xs.len() - 1] <= 0.1 * xs[0]
}

fn toolbox_instances(rng: &mut ChaCha8Rng, which: usize) -> Inequality {
    let vecn = |rng: &mut ChaCha8Rng, lo: usize, hi: usize, r: f64| -> Vec<f64> {
        let n = rng.random_range(lo..=hi);
        (0..n).map(|_| rng.random_range(0.0..r)).collect()
    };
    match which {
        0 => Inequality::Taylor {
            n: rng.random_range(0..7),
            t: rng.random_range(-20.0..20.0),
        },
        1 => Inequality::TaylorMin {
            n: rng.random_range(0..7),
            t: rng.random_range(-20.0..20.0),
        },
        2 => {
            let z = random_xi(rng, 0.5);
            Inequality::Log { z: (z.re, z.im) }
        }
        3 => Inequality::PowerMeans {
            x: vecn(rng, 2, 8, 10.0),
            lambda: rng.random_range(1.0..6.0),
        },
        4 => {
            let mut x = vecn(rng, 1, 20, 10.0);
            x[0] += 0.1;
            Inequality::Lyapunov { x }
        }
        5 => Inequality::TaylorFractional {
            n: rng.random_range(0..6),
            t: rng.random_range(-20.0..20.0),
            omega: rng.random_range(0.0..1.0),
        },
        6 => {
            let n = rng.random_range(1..6);
            let w = (0..n)
                .map(|i| {
                    let z = random_xi(rng, 5.0);
                    (z.re + if i == 0 { 0.1 } else { 0.0 }, z.im)
                })
                .collect();
            Inequality::NormRatios {
                w,
                lambda: rng.random_range(1.0..6.0),
            }
        }
        7 => Inequality::Decay {
            n: rng.random_range(0..7),
            beta: rng.random_range(0.1..3.0),
            q: rng.random_range(3.0..8.0),
            t: rng.random_range(-100.0..100.0),
        },
        _ => {
            let mut t: Vec<f64> = vecn(rng, 1, 6, 4.0).into_iter().map(|x| x - 2.0).collect();
            t[0] += 0.05;
            Inequality::PowerSumRatio {
                t,
                n: rng.random_range(1..5),
                psi: rng.random_range(0.2..4.0),
            }
        }
    }
}

fn clt_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut r = Runner::new(Suite::Clt, opts);
    let one = Complex64::new(1.0, 0.0);

    r.check("moment-contract", 4.0, || {
        let mc = MonteCarloConfig {
            seed: opts.seed,
            samples: opts.moment_samples,
        };
        let mut worst = 0.0f64;
        for law in builtin_laws() {
            let m = clt::moment_estimates(&law, mc)?;
            let zero = Complex64::new(0.0, 0.0);
            for (e, target) in [
                (m.mean, zero),
                (m.analytic_second, zero),
                (m.abs_second, Complex64::new(2.0 * law.beta2, 0.0)),
                (m.abs_third, Complex64::new(law.rho3, 0.0)),
            ] {
                let dev = ((Complex64::new(e.value.0, e.value.1) - target).norm() - 1e-12).max(0.0);
                let z = if dev == 0.0 { 0.0 } else { dev / e.std_error };
                worst = worst.max(z);
            }
        }
        Ok((
            worst,
            format!(
                "largest deviation in standard errors, {} draws per law",
                opts.moment_samples
            ),
        ))
    });

    r.check("gap-dominance", 0.0, || {
        let mut rng = r_rng(opts, 31);
        let xis: Vec<Complex64> = (0..20).map(|_| random_xi(&mut rng, 1.0)).collect();
        let schemes = [
            CoefficientScheme::ones(),
            CoefficientScheme::linear(),
            CoefficientScheme::linear().twisted(|j| 0.37 * (j * j) as f64),
        ];
        let mut worst = f64::NEG_INFINITY;
        let mut admissible = 0;
        for law in builtin_laws() {
            for s in &schemes {
                for n in [100, 400, 1600] {
                    for &xi in &xis {
                        let g = clt::gaussian_limit_gap(&law, s, n, &[xi], 1.0);
                        match g {
                            Ok(g) if g.admissible => {
                                admissible += 1;
                                worst = worst.max(g.gap - g.bound);
                            }
                            Ok(_) => {}
                            Err(Error::Branch(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
        Ok((worst.max(0.0), format!("{admissible} admissible cases")))
    });

    r.check("bound-scaling", 0.1, || {
        let law = clt::haar_circle_law();
        let s = CoefficientScheme::ones();
        let b = |n| clt::gaussian_limit_gap(&law, &s, n, &[one], 1.0).map(|g| g.bound);
        let (b1, b2, b3) = (b(100)?, b(400)?, b(1600)?);
        let v = ((b2 / b1 - 0.5).abs()).max((b3 / b2 - 0.5).abs()) / 0.5;
        Ok((v, format!("bounds {b1:.5}, {b2:.5}, {b3:.5}")))
    });

    r.check("phase-invariance", 1e-12, || {
        let base = CoefficientScheme::linear();
        let tw = base.twisted(|j| 1.3 * (j as f64).sqrt());
        let mut worst = 0.0f64;
        for n in [50, 500] {
            let (a, b) = (
                clt::lyapunov_normalizer(&base, n)?,
                clt::lyapunov_normalizer(&tw, n)?,
            );
            worst = worst
                .max((a.normalizer / b.normalizer - 1.0).abs())
                .max((a.lyapunov_sum / b.lyapunov_sum - 1.0).abs());
            let xi = Complex64::new(0.6, -0.5);
            for law in builtin_laws() {
                let (ga, gb) = (
                    clt::gaussian_limit_gap(&law, &base, n, &[xi], 1.0)?,
                    clt::gaussian_limit_gap(&law, &tw, n, &[xi], 1.0)?,
                );
                worst = worst
                    .max((ga.bound / gb.bound - 1.0).abs())
                    .max((ga.quadratic_form / gb.quadratic_form - 1.0).abs());
                if law.name == "haar-circle" || law.name == "complex-gaussian" {
                    // rotation-invariant laws: |phi_N| is unchanged as well
                    worst = worst.max((ga.log_phi.0 - gb.log_phi.0).abs() / ga.log_phi.0.abs());
                }
            }
        }
        Ok((
            worst,
            "s_N, Lyapunov sum, |U_j| and the bound under b_j -> e^(i w_j) b_j".into(),
        ))
    });

    r.check("indicator-equivalence", 0.0, || {
        let schemes = [
            CoefficientScheme::ones(),
            CoefficientScheme::linear(),
            CoefficientScheme::geometric(),
            CoefficientScheme::scalar("sqrt", |j, _| Complex64::new((j as f64).sqrt(), 0.0)),
        ];
        let mut bad = 0;
        let mut parts = Vec::new();
        for s in &schemes {
            let st: Vec<_> = [10, 100, 1000, 10_000]
                .iter()
                .map(|&n| clt::lyapunov_normalizer(s, n))
                .collect::<Result<_>>()?;
            let sums: Vec<f64> = st.iter().map(|x| x.lyapunov_sum).collect();
            let ratios: Vec<f64> = st.iter().map(|x| x.max_ratio).collect();
            let (a, b) = (tends_to_zero(&sums), tends_to_zero(&ratios));
            if a != b {
                bad += 1;
            }
            parts.push(format!("{s:?}: {a}"));
        }
        Ok((bad as f64, parts.join(", ")))
    });

    let mc = MonteCarloConfig {
        seed: opts.seed,
        samples: opts.clt_samples,
    };
    r.check(
        "real-marginal-path",
        2.0 * 1.36 / (opts.clt_samples as f64).sqrt(),
        || {
            let law = clt::uniform_square_law();
            let n = 100;
            let v = clt::vector_statistic(&law, &CoefficientScheme::ones(), n, mc, &[0.0])?;
            let a = 3f64.sqrt();
            let (_, ks_real) = clt::real_statistic(
                move |rng| a * (2.0 * crate::rng::uniform01(rng) - 1.0),
                law.beta2,
                |_, _| 1.0,
                n,
                MonteCarloConfig {
                    seed: opts.seed ^ 1,
                    samples: opts.clt_samples,
                },
            )?;
            Ok((
                (v.ks[0].0 - ks_real).abs(),
                format!(
                    "KS complex-path real part {:.4}, real path {ks_real:.4}",
                    v.ks[0].0
                ),
            ))
        },
    );

    let haar = clt::haar_circle_law();
    let stat = clt::vector_statistic(
        &haar,
        &CoefficientScheme::ones(),
        400,
        mc,
        &esseen1d::linspace(-1.5, 1.5, 7),
    );
    r.check("haar-ks", 0.01, || {
        let s = stat.as_ref().map_err(Clone::clone)?;
        Ok((
            s.ks[0].0.max(s.ks[0].1),
            format!(
                "N = 400, {} replicas; rectangle gap {:.4}",
                s.samples, s.rectangle_gap[0]
            ),
        ))
    });
    r.check("haar-covariance", 4.0, || {
        let s = stat.as_ref().map_err(Clone::clone)?;
        let e = s.covariance[0];
        let dev = (Complex64::new(e.value.0, e.value.1) - s.covariance_target[0]).norm();
        Ok((
            dev / e.std_error,
            format!("E|T|^2 = {:.5} +- {:.5}", e.value.0, e.std_error),
        ))
    });
    r.check("analytic-second-moment", 4.0, || {
        let s = stat.as_ref().map_err(Clone::clone)?;
        let e = s.analytic_covariance[0];
        Ok((
            Complex64::new(e.value.0, e.value.1).norm() / e.std_error,
            format!("E T^2 = ({:.2e}, {:.2e})", e.value.0, e.value.1),
        ))
    });

    let alt = CoefficientScheme::alternating_pair();
    let ns = [11, 101, 1001, 10_001];
    r.check("vector-matrix-residual", 0.1, || {
        let res: Vec<f64> = ns
            .iter()
            .map(|&n| {
                clt::lyapunov_normalizer(&alt, n)
                    .map(|s| s.matrix_residual.unwrap_or(f64::INFINITY))
            })
            .collect::<Result<_>>()?;
        let mono = res.windows(2).all(|w| w[1] <= w[0]);
        let v = if mono { res[3] / res[0] } else { f64::INFINITY };
        Ok((v, format!("residuals {}", sci(&res))))
    });
    r.check("vector-lyapunov", 0.1, || {
        let sums: Vec<f64> = ns
            .iter()
            .map(|&n| clt::lyapunov_normalizer(&alt, n).map(|s| s.lyapunov_sum))
            .collect::<Result<_>>()?;
        let mono = sums.windows(2).all(|w| w[1] <= w[0]);
        let v = if mono {
            sums[3] / sums[0]
        } else {
            f64::INFINITY
        };
        Ok((v, format!("sums {}", sci(&sums))))
    });
    r.check("vector-gap", 0.0, || {
        let mut rng = r_rng(opts, 32);
        let mut worst = f64::NEG_INFINITY;
        let mut count = 0;
        for law in [
            clt::haar_circle_law(),
            clt::complex_gaussian_law(1.0)?,
            clt::uniform_square_law(),
        ] {
            for n in [100, 400, 1600] {
                for _ in 0..20 {
                    let xi = [random_xi(&mut rng, 1.0), random_xi(&mut rng, 1.0)];
                    let g = clt::gaussian_limit_gap(&law, &alt, n, &xi, 1.0)?;
                    if g.admissible {
                        count += 1;
                        worst = worst.max(g.gap - g.bound);
                    }
                }
            }
        }
        Ok((
            worst.max(0.0),
            format!("{count} admissible (law, N, xi) triples"),
        ))
    });

    let names = [
        "taylor",
        "taylor-min",
        "log",
        "power-means",
        "lyapunov",
        "taylor-fractional",
        "norm-ratios",
        "decay",
        "power-sum-ratio",
    ];
    for (i, name) in names.iter().enumerate() {
        r.check(&format!("toolbox-{name}"), 0.0, || {
            let mut rng = r_rng(opts, 40 + i as u64);
            let mut bad = 0;
            for _ in 0..500 {
                let ineq = toolbox_instances(&mut rng, i);
                if !clt::inequality_toolbox(&ineq)?.holds {
                    bad += 1;
                }
            }
            Ok((bad as f64, "violations over 500 random instances".into()))
        });
    }

    r.out
}

/// Pass when every check passes.
pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
