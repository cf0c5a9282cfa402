//! Band-limited reconstruction from nodal data and the classical identities
//! behind it.
//!
//! A function of exponential type `2 pi alpha` is recovered from its values
//! on `Z / 2alpha` by the cardinal series, or from values and first
//! derivatives on `Z / alpha` by the squared-sine formula. Each summand is
//! rewritten as a `sinc` or Fejer factor centred on its node, so evaluation
//! at or near a node needs no special treatment beyond the stored-data
//! shortcut.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{fejer_k, fejer_k_prime, sin_pi_over_pi_sq, KernelConfig};
use crate::quad::{integrate, QuadOptions};
use crate::special::trigamma_with_bound;

/// Distance below which a point is treated as sitting on a node.
pub const NODE_WINDOW: f64 = 1e-6;

/// Nodal data for a band-limited function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub alpha: f64,
    /// Nodes run over `k = -m ..= m`.
    pub m: usize,
    /// `f(k h)` with `h = 1/(2 alpha)` for cardinal data, `h = 1/alpha` for
    /// value-derivative data. Index `k + m`.
    pub values: Vec<f64>,
    /// `f'(k / alpha)`, present for value-derivative data.
    pub derivatives: Option<Vec<f64>>,
    /// `(f(0), f'(0))` for the extended cardinal form.
    pub origin: Option<(f64, f64)>,
    /// Assumed decay exponent `p` in `|f(k h)| <= C |k|^-p` beyond the data.
    pub decay: f64,
    /// Truncation estimates above this are reported as non-convergence.
    pub tol: f64,
}

/// A value with its truncation estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err_est: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CardinalMode {
    Basic,
    Extended,
}

impl SampleSet {
    /// Cardinal data `f(k / 2alpha)`, `|k| <= m`.
    pub fn cardinal<F: Fn(f64) -> f64>(alpha: f64, m: usize, f: F) -> Result<Self> {
        let h = 0.5 / alpha;
        let values = (-(m as i64)..=m as i64).map(|k| f(k as f64 * h)).collect();
        let s = Self {
            alpha,
            m,
            values,
            derivatives: None,
            origin: None,
            decay: 2.0,
            tol: 1e-6,
        };
        s.validate()?;
        Ok(s)
    }

    /// Value-derivative data `(f(k/alpha), f'(k/alpha))`, `|k| <= m`.
    pub fn vaaler<F, D>(alpha: f64, m: usize, f: F, df: D) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let h = 1.0 / alpha;
        let ks = -(m as i64)..=m as i64;
        let values = ks.clone().map(|k| f(k as f64 * h)).collect();
        let derivatives = Some(ks.map(|k| df(k as f64 * h)).collect());
        let s = Self {
            alpha,
            m,
            values,
            derivatives,
            origin: None,
            decay: 2.0,
            tol: 1e-6,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_origin(mut self, f0: f64, df0: f64) -> Self {
        self.origin = Some((f0, df0));
        self
    }

    pub fn with_decay(mut self, p: f64) -> Self {
        self.decay = p;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidInput("alpha must be positive".into()));
        }
        if self.m < 1 {
            return Err(Error::InvalidInput(
                "need at least one node on each side".into(),
            ));
        }
        let n = 2 * self.m + 1;
        if self.values.len() != n {
            return Err(Error::InvalidInput(format!(
                "expected {n} values, got {}",
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("sample values must be finite".into()));
        }
        if let Some(d) = &self.derivatives {
            if d.len() != n || d.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("derivative data malformed".into()));
            }
        }
        Ok(())
    }

    fn value(&self, k: i64) -> f64 {
        self.values[(k + self.m as i64) as usize]
    }

    /// Empirical constant `C` in `|f_k| <= C |k|^-p`, from the outer half of
    /// the data.
    fn decay_constant(&self, data: &[f64], p: f64) -> f64 {
        let m = self.m as i64;
        (-m..=m)
            .filter(|k| 2 * k.abs() >= m)
            .map(|k| data[(k + m) as usize].abs() * (k.abs() as f64).powf(p))
            .fold(0.0, f64::max)
    }
}

/// `sin(pi u) / (pi u)`.
fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let p2 = (PI * u).powi(2);
        return 1.0 - p2 / 6.0 + p2 * p2 / 120.0;
    }
    (PI * u).sin() / (PI * u)
}

fn check_estimate(what: &str, value: f64, err: f64, tol: f64) -> Result<Estimate> {
    if !err.is_finite() || err > tol {
        return Err(Error::NonConvergence {
            what: what.into(),
            achieved: err,
        });
    }
    Ok(Estimate {
        value,
        err_est: err,
    })
}

/// Cardinal series reconstruction at `z`.
pub fn cardinal_series(samples: &SampleSet, z: f64, mode: CardinalMode) -> Result<Estimate> {
    samples.validate()?;
    if !z.is_finite() {
        return Err(Error::Domain("evaluation point must be finite".into()));
    }
    let a = samples.alpha;
    let h = 0.5 / a;
    let m = samples.m as i64;
    let p = samples.decay;
    // outermost node must lie beyond z for the tail estimate
    if !(2.0 * a * z.abs() < (m + 1) as f64) {
        return Err(Error::InvalidInput(
            "evaluation point outside the sampled range".into(),
        ));
    }
    let s_over = (2.0 * PI * a * z).sin() / (2.0 * PI * a);
    match mode {
        CardinalMode::Basic => {
            // the summands are written as sinc factors, so points inside the
            // node window need no shortcut except exact hits
            let nearest = (z / h).round() as i64;
            if nearest.abs() <= m && z == nearest as f64 * h {
                return Ok(Estimate {
                    value: samples.value(nearest),
                    err_est: 0.0,
                });
            }
            let mut sum = 0.0;
            for k in (-m..=m).rev() {
                // (-1)^k sin(2 pi a z) / (2 pi a (z - k h)) = sinc(2a(z - kh))
                sum += samples.value(k) * sinc(2.0 * a * (z - k as f64 * h));
            }
            if !(p > 1.0) {
                return Err(Error::NonConvergence {
                    what: "cardinal series (decay exponent <= 1)".into(),
                    achieved: f64::INFINITY,
                });
            }
            let c = samples.decay_constant(&samples.values, p);
            let gap = (m + 1) as f64 - 2.0 * a * z.abs();
            let err = s_over.abs() * 2.0 * c * 2.0 * a / gap * (m as f64).powf(1.0 - p) / (p - 1.0);
            check_estimate("cardinal series", sum, err, samples.tol)
        }
        CardinalMode::Extended => {
            let (f0, df0) = samples.origin.ok_or_else(|| {
                Error::InvalidInput("extended mode needs origin data (f(0), f'(0))".into())
            })?;
            let mut sum = 0.0;
            for k in (1..=m).rev() {
                for kk in [k, -k] {
                    let xk = kk as f64 * h;
                    let sign = if kk % 2 == 0 { 1.0 } else { -1.0 };
                    sum += samples.value(kk) * (sinc(2.0 * a * (z - xk)) + sign * s_over / xk);
                }
            }
            sum += df0 * s_over + f0 * sinc(2.0 * a * z);
            if !(p > -1.0) {
                return Err(Error::NonConvergence {
                    what: "extended cardinal series (decay exponent <= -1)".into(),
                    achieved: f64::INFINITY,
                });
            }
            let c = samples.decay_constant(&samples.values, p);
            let r = 1.0 - 2.0 * a * z.abs() / (m + 1) as f64;
            let err = s_over.abs() * 2.0 * c * z.abs() * 4.0 * a * a / r
                * (m as f64).powf(-p - 1.0)
                / (p + 1.0);
            check_estimate("extended cardinal series", sum, err, samples.tol)
        }
    }
}

/// Reconstruction from values and first derivatives on `Z / alpha`.
pub fn vaaler_interpolation(samples: &SampleSet, z: f64) -> Result<Estimate> {
    samples.validate()?;
    let der = samples
        .derivatives
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("value-derivative data required".into()))?;
    if !z.is_finite() {
        return Err(Error::Domain("evaluation point must be finite".into()));
    }
    let a = samples.alpha;
    let h = 1.0 / a;
    let m = samples.m as i64;
    if !(a * z.abs() < (m + 1) as f64) {
        return Err(Error::InvalidInput(
            "evaluation point outside the sampled range".into(),
        ));
    }
    let nearest = (z / h).round() as i64;
    let d0 = z - nearest as f64 * h;
    if nearest.abs() <= m && d0.abs() < NODE_WINDOW {
        let i = (nearest + m) as usize;
        // local form f + f' (z - node); the remainder is O(d^2)
        let value = samples.values[i] + der[i] * d0;
        return Ok(Estimate {
            value,
            err_est: 10.0 * d0 * d0 * (1.0 + samples.values[i].abs()),
        });
    }
    let mut sum = 0.0;
    for k in (-m..=m).rev() {
        let i = (k + m) as usize;
        let d = z - k as f64 * h;
        let kk = fejer_k(a * d);
        sum += samples.values[i] * kk + der[i] * d * kk;
    }
    let p = samples.decay;
    if !(p > 1.0) {
        return Err(Error::NonConvergence {
            what: "value-derivative series (decay exponent <= 1)".into(),
            achieved: f64::INFINITY,
        });
    }
    let c = samples
        .decay_constant(&samples.values, p)
        .max(samples.decay_constant(der, p));
    let dmin = ((m + 1) as f64 - a * z.abs()) / a;
    let s2 = sin_pi_over_pi_sq(a * z) / (a * a);
    let per = s2 * (1.0 / (dmin * dmin) + 1.0 / dmin);
    let err = 2.0 * c * per * (m as f64).powf(1.0 - p) / (p - 1.0);
    check_estimate("value-derivative series", sum, err, samples.tol)
}

/// Which classical identity to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Identity {
    /// `pi / sin(pi w) = 1/w + sum_{k != 0} (-1)^k (1/(w-k) + 1/k)`.
    Csc,
    /// `1 = (sin(pi x)/pi)^2 sum_n (x-n)^-2`.
    Fejer,
    /// `1/w - 1/w^2 < sum_{n>=1} (n+w)^-2 < 1/w`.
    Sandwich,
    /// `1/w - 1/(2w^2) < sum_{n>=1} (n+w)^-2 < 1/w`.
    RefinedSandwich,
    /// `sum_k exp(-pi a k^2) = a^-1/2 sum_m exp(-pi m^2 / a)`.
    Poisson,
    /// `(1/2alpha) sum |f(k/2alpha)|^2 = int |f|^2` for `f(x) = K(alpha x)`.
    ParsevalSampling,
    /// `|f^(m)| <= sqrt(2alpha) (2 pi alpha)^m / sqrt(1+2m) ||f||_2` for
    /// `f = K`, `alpha = 1`, with `m` the argument.
    Bernstein,
}

/// Outcome of an identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: Identity,
    pub arg: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|`, or for inequalities the (negated when violated) slack.
    pub residual: f64,
    /// Certified bound on the truncation error in `lhs`.
    pub tail_bound: f64,
    pub holds: bool,
}

/// Terms used by the truncated-sum identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityConfig {
    pub terms: usize,
    pub tol: f64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            terms: 10_000,
            tol: 1e-8,
        }
    }
}

pub fn classical_identity_residual(
    which: Identity,
    arg: f64,
    cfg: &IdentityConfig,
) -> Result<IdentityReport> {
    if !arg.is_finite() {
        return Err(Error::Domain("identity argument must be finite".into()));
    }
    let m = cfg.terms;
    let kc = KernelConfig::default();
    let report = |lhs: f64, rhs: f64, tail: f64, holds: bool| IdentityReport {
        identity: which,
        arg,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        tail_bound: tail,
        holds,
    };
    match which {
        Identity::Csc => {
            let w = arg;
            if w == w.round() {
                return Err(Error::Domain(
                    "csc identity needs a non-integer argument".into(),
                ));
            }
            let mut s = 0.0;
            for k in (1..=m).rev() {
                let kf = k as f64;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                // pairs k and -k: 1/(w-k) + 1/(w+k)
                s += sign * 2.0 * w / ((w - kf) * (w + kf));
            }
            s += 1.0 / w;
            let next = (2.0 * w / (((m + 1) as f64).powi(2) - w * w)).abs();
            let rhs = PI / (PI * w).sin();
            let holds = (s - rhs).abs() <= next + 1e-14 * rhs.abs();
            Ok(report(s, rhs, next, holds))
        }
        Identity::Fejer => {
            let x = arg;
            let s2 = sin_pi_over_pi_sq(x);
            let n = x.round() as i64;
            let mut sum = 0.0;
            for k in (-(m as i64)..=m as i64).rev() {
                let d = x - k as f64;
                sum += if k == n { fejer_k(d) } else { s2 / (d * d) };
            }
            let mf = m as f64;
            if !(mf > x.abs() + 1.0) {
                return Err(Error::InvalidInput("too few terms for the argument".into()));
            }
            // exact tails: sum_{n>m} (n - x)^-2 = trigamma(m + 1 - x)
            let (tp, ep) = trigamma_with_bound(mf + 1.0 - x, kc.crossover_x0, kc.asymptotic_pairs)?;
            let (tm, em) = trigamma_with_bound(mf + 1.0 + x, kc.crossover_x0, kc.asymptotic_pairs)?;
            let lhs = sum + s2 * (tp + tm);
            let tail = s2 * (ep + em) + 1e-16 * (2 * m) as f64;
            let holds = (lhs - 1.0).abs() <= cfg.tol;
            Ok(report(lhs, 1.0, tail, holds))
        }
        Identity::Sandwich | Identity::RefinedSandwich => {
            let w = arg;
            if !(w > 0.0) {
                return Err(Error::Domain("sandwich needs w > 0".into()));
            }
            let (mid, err) = trigamma_with_bound(w + 1.0, kc.crossover_x0, kc.asymptotic_pairs)?;
            let lower = if which == Identity::Sandwich {
                1.0 / w - 1.0 / (w * w)
            } else {
                1.0 / w - 0.5 / (w * w)
            };
            let upper = 1.0 / w;
            let slack = (mid - lower).min(upper - mid);
            Ok(IdentityReport {
                identity: which,
                arg,
                lhs: mid,
                rhs: upper,
                residual: slack,
                tail_bound: err,
                holds: slack > err,
            })
        }
        Identity::Poisson => {
            let a = arg;
            if !(a > 0.0) {
                return Err(Error::Domain("Poisson check needs a > 0".into()));
            }
            let side = |c: f64| {
                let mut s = 0.0;
                let mut k = 1.0f64;
                loop {
                    let t = (-PI * c * k * k).exp();
                    if t < 1e-300 || k > 1e6 {
                        break;
                    }
                    s += t;
                    k += 1.0;
                }
                1.0 + 2.0 * s
            };
            let lhs = side(a);
            let rhs = side(1.0 / a) / a.sqrt();
            let holds = (lhs - rhs).abs() <= 1e-12 * lhs.abs();
            Ok(report(lhs, rhs, 0.0, holds))
        }
        Identity::ParsevalSampling => {
            let alpha = arg;
            if !(alpha > 0.0) {
                return Err(Error::Domain("alpha must be positive".into()));
            }
            let f = |x: f64| fejer_k(alpha * x);
            let h = 0.5 / alpha;
            let mut s = 0.0;
            for k in (1..=m).rev() {
                let v = f(k as f64 * h);
                s += 2.0 * v * v;
            }
            s += 1.0;
            let lhs = s / (2.0 * alpha);
            // |f(k h)| <= 4/(pi^2 k^2): tail <= (1/2alpha) 2 sum_{k>m} 16/(pi^4 k^4)
            let tail = 16.0 / (PI.powi(4) * 3.0 * (m as f64).powi(3)) / alpha;
            let x = 200.0 / alpha;
            let breaks: Vec<f64> = (-200i64..=200).map(|j| j as f64 / alpha).collect();
            let q = integrate(|t| f(t) * f(t), -x, x, &breaks, QuadOptions::abs(1e-13))?;
            // sin^4 averages 3/8 over the tail
            let rhs = q.value + 1.0 / (4.0 * PI.powi(4) * (alpha * x).powi(3)) / alpha;
            let holds = (lhs - rhs).abs() <= cfg.tol;
            Ok(report(lhs, rhs, tail + q.error, holds))
        }
        Identity::Bernstein => {
            let order = arg;
            if !(order == 0.0 || order == 1.0) {
                return Err(Error::InvalidInput(
                    "Bernstein check supports m in {0, 1}".into(),
                ));
            }
            let norm = (2.0f64 / 3.0).sqrt();
            let bound = 2f64.sqrt() * (2.0 * PI).powf(order) / (1.0 + 2.0 * order).sqrt() * norm;
            let npts = 1000;
            let sup = (0..npts)
                .map(|i| -5.0 + 10.0 * i as f64 / (npts - 1) as f64)
                .map(|x| {
                    if order == 0.0 {
                        fejer_k(x)
                    } else {
                        fejer_k_prime(x).abs()
                    }
                })
                .fold(0.0, f64::max);
            Ok(IdentityReport {
                identity: which,
                arg,
                lhs: sup,
                rhs: bound,
                residual: bound - sup,
                tail_bound: 0.0,
                holds: sup <= bound,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_samples(alpha: f64, m: usize) -> SampleSet {
        SampleSet::cardinal(alpha, m, |x| if x == 0.0 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn single_node_cardinal() {
        let s = delta_samples(1.0, 20);
        let e = cardinal_series(&s, 0.25, CardinalMode::Basic).unwrap();
        assert!((e.value - 2.0 / PI).abs() < 1e-15);
        assert_eq!(e.err_est, 0.0);
    }

    #[test]
    fn cardinal_reconstructs_fejer() {
        let s = SampleSet::cardinal(1.0, 10_000, fejer_k).unwrap();
        for &z in &[0.3, -1.7, 4.1] {
            let e = cardinal_series(&s, z, CardinalMode::Basic).unwrap();
            let direct = fejer_k(z);
            assert!((e.value - direct).abs() <= e.err_est + 1e-14, "z={z}");
            assert!(e.err_est < 1e-8);
        }
    }

    #[test]
    fn cardinal_at_node_returns_data() {
        let s = SampleSet::cardinal(1.0, 50, fejer_k).unwrap();
        let e = cardinal_series(&s, 0.5, CardinalMode::Basic).unwrap();
        assert_eq!(e.value, fejer_k(0.5));
        let near = cardinal_series(&s, 0.5 + 1e-9, CardinalMode::Basic).unwrap();
        assert!((near.value - fejer_k(0.5)).abs() < 1e-8);
    }

    #[test]
    fn extended_mode_with_unit_function_is_csc_identity() {
        let s = SampleSet::cardinal(0.5, 20_000, |_| 1.0)
            .unwrap()
            .with_origin(1.0, 0.0)
            .with_decay(0.0)
            .with_tol(1e-3);
        let e = cardinal_series(&s, 0.5, CardinalMode::Extended).unwrap();
        assert!((e.value - 1.0).abs() <= e.err_est.max(1e-12), "{}", e.value);
    }

    #[test]
    fn extended_mode_on_zf_matches_basic() {
        // applying the extended form to z K(z) recovers the basic form on K
        let basic = SampleSet::cardinal(1.0, 4000, fejer_k).unwrap();
        let ext = SampleSet::cardinal(1.0, 4000, |x| x * fejer_k(x))
            .unwrap()
            .with_origin(0.0, 1.0)
            .with_decay(1.0)
            .with_tol(1e-3);
        for &z in &[0.3, 1.2, -2.6] {
            let b = cardinal_series(&basic, z, CardinalMode::Basic).unwrap();
            let e = cardinal_series(&ext, z, CardinalMode::Extended).unwrap();
            assert!((e.value / z - b.value).abs() < 1e-6, "z={z}");
        }
    }

    #[test]
    fn non_decaying_data_is_rejected() {
        let s = SampleSet::cardinal(1.0, 100, |_| 1.0)
            .unwrap()
            .with_decay(0.5);
        assert!(matches!(
            cardinal_series(&s, 0.3, CardinalMode::Basic),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn vaaler_single_node_is_fejer() {
        let s = SampleSet::vaaler(1.0, 10, |x| if x == 0.0 { 1.0 } else { 0.0 }, |_| 0.0).unwrap();
        let e = vaaler_interpolation(&s, 0.37).unwrap();
        assert!((e.value - fejer_k(0.37)).abs() < 1e-16);
    }

    #[test]
    fn vaaler_two_nodes() {
        let f = |x: f64| fejer_k(x) + fejer_k(x - 1.0);
        let df = |x: f64| fejer_k_prime(x) + fejer_k_prime(x - 1.0);
        let s = SampleSet::vaaler(1.0, 10, f, df).unwrap();
        let e = vaaler_interpolation(&s, 0.5).unwrap();
        assert!((e.value - 8.0 / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn vaaler_local_taylor_behaviour() {
        let f = |x: f64| fejer_k(x) + fejer_k(x - 1.0);
        let df = |x: f64| fejer_k_prime(x) + fejer_k_prime(x - 1.0);
        let s = SampleSet::vaaler(1.0, 10, f, df).unwrap();
        let h = 1e-3;
        let at = |z: f64| vaaler_interpolation(&s, z).unwrap().value;
        assert!((at(2.0) - f(2.0)).abs() < 1e-15);
        let d = (at(2.0 + h) - at(2.0 - h)) / (2.0 * h);
        assert!((d - df(2.0)).abs() < 1e-5);
    }

    #[test]
    fn vaaler_reconstructs_smooth_function() {
        // K(x/2)^2 has type 2pi and decays like x^-4
        let f = |x: f64| fejer_k(0.5 * x).powi(2);
        let df = |x: f64| fejer_k(0.5 * x) * fejer_k_prime(0.5 * x);
        let s = SampleSet::vaaler(1.0, 400, f, df).unwrap().with_decay(4.0);
        for &z in &[0.25, 1.6, -3.3] {
            let e = vaaler_interpolation(&s, z).unwrap();
            assert!((e.value - f(z)).abs() <= e.err_est + 1e-14, "z={z}");
        }
    }

    #[test]
    fn identities() {
        let cfg = IdentityConfig::default();
        let fe = classical_identity_residual(Identity::Fejer, 0.37, &cfg).unwrap();
        assert!(fe.residual <= 1e-8 && fe.holds);
        let cs = classical_identity_residual(Identity::Csc, 0.5, &cfg).unwrap();
        assert!((cs.rhs - PI).abs() < 1e-15);
        assert!(cs.residual <= cs.tail_bound + 1e-14 && cs.holds);
        let sw = classical_identity_residual(Identity::Sandwich, 2.0, &cfg).unwrap();
        assert!((sw.lhs - (PI * PI / 6.0 - 1.25)).abs() < 1e-14);
        assert!(sw.holds);
        assert!(
            classical_identity_residual(Identity::RefinedSandwich, 2.0, &cfg)
                .unwrap()
                .holds
        );
        let po = classical_identity_residual(Identity::Poisson, 2.0, &cfg).unwrap();
        assert!(po.residual < 1e-12);
        let pa = classical_identity_residual(Identity::ParsevalSampling, 1.0, &cfg).unwrap();
        assert!((pa.lhs - 2.0 / 3.0).abs() < 1e-8 && (pa.rhs - 2.0 / 3.0).abs() < 1e-8);
        let be = classical_identity_residual(Identity::Bernstein, 1.0, &cfg).unwrap();
        assert!(be.holds);
    }
}
