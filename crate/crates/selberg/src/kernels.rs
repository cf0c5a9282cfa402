//! The Fejer kernel `K`, the Beurling-Selberg functions `W`, `B`, `b`, the
//! interval majorant and minorant `S_l`, `sigma_l`, the Fourier profile `Q`
//! and the smoothing constant `lambda`.
//!
//! `W` has two evaluation routes. The oracle sums the defining partial
//! fraction series directly and brackets the tail. The fast route uses
//! oddness, a Taylor expansion in odd zeta values near the origin and the
//! trigamma identity
//!
//! `W(x) = 1 - 2 (sin(pi x)/pi)^2 [1/(2x^2) + trigamma(x+1) - 1/x]`
//!
//! everywhere else.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions, Quadrature};
use crate::special::{odd_zeta_cached, trigamma_with_bound};

/// Evaluation policy for the kernel evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Terms summed by the direct-series oracle for `W`.
    pub series_terms: usize,
    /// Bernoulli pairs in the trigamma asymptotic series.
    pub asymptotic_pairs: usize,
    /// Trigamma arguments are shifted up to this point before the
    /// asymptotic series is used.
    pub crossover_x0: f64,
    /// `|x|` below which `W` uses the odd-zeta Taylor series.
    pub taylor_radius: f64,
    /// Number of odd-zeta terms in that series.
    pub taylor_terms: usize,
    pub tol: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            series_terms: 1_000_000,
            asymptotic_pairs: 10,
            crossover_x0: 8.0,
            taylor_radius: 0.4,
            taylor_terms: 20,
            tol: 1e-14,
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.series_terms < 10 {
            return Err(Error::InvalidInput("series_terms must be >= 10".into()));
        }
        if !(1..=30).contains(&self.asymptotic_pairs) {
            return Err(Error::InvalidInput(
                "asymptotic_pairs must lie in 1..=30".into(),
            ));
        }
        if !(self.crossover_x0 >= 1.0) {
            return Err(Error::InvalidInput("crossover_x0 must be >= 1".into()));
        }
        if !(self.taylor_radius > 0.0 && self.taylor_radius <= 0.5) {
            return Err(Error::InvalidInput(
                "taylor_radius must lie in (0, 0.5]".into(),
            ));
        }
        if self.taylor_terms == 0 || self.taylor_terms > 40 {
            return Err(Error::InvalidInput(
                "taylor_terms must lie in 1..=40".into(),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        Ok(())
    }
}

/// Which member of the kernel family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelKind {
    K,
    W,
    /// Majorant of `sgn`.
    B,
    /// Minorant of `sgn`.
    Bminus,
    /// Majorant of the indicator of `[0, l]`.
    S(f64),
    /// Minorant of the indicator of `[0, l]`.
    Sigma(f64),
}

impl KernelKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelKind::S(l) | KernelKind::Sigma(l) if !(l > 0.0 && l.is_finite()) => Err(
                Error::InvalidInput(format!("interval length must be positive, got {l}")),
            ),
            _ => Ok(()),
        }
    }
}

/// `W` evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WMode {
    Fast,
    Oracle,
}

/// `sgn` with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Indicator of the closed interval `[0, l]`.
pub fn chi_interval(l: f64, x: f64) -> f64 {
    if (0.0..=l).contains(&x) {
        1.0
    } else {
        0.0
    }
}

/// `(sin(pi x) / pi)^2` with the argument reduced to `[-1/2, 1/2]` first.
pub fn sin_pi_over_pi_sq(x: f64) -> f64 {
    let r = x - x.round();
    let s = (PI * r).sin() / PI;
    s * s
}

/// Fejer kernel `(sin(pi x) / (pi x))^2`.
pub fn fejer_k(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let p = PI * x;
        let p2 = p * p;
        return 1.0 - p2 / 3.0 + 2.0 * p2 * p2 / 45.0;
    }
    if !x.is_finite() {
        return 0.0;
    }
    sin_pi_over_pi_sq(x) / (x * x)
}

/// Derivative of the Fejer kernel.
pub fn fejer_k_prime(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let p2 = PI * PI;
        return -2.0 * p2 * x / 3.0 + 8.0 * p2 * p2 * x * x * x / 45.0;
    }
    let s = (PI * x).sin();
    let c = (PI * x).cos();
    2.0 * s * (PI * x * c - s) / (PI * PI * x * x * x)
}

/// Trigamma `sum_{n >= 0} (x + n)^-2` for `x > 0`.
pub fn trigamma(x: f64, cfg: &KernelConfig) -> Result<f64> {
    let (v, bound) = trigamma_with_bound(x, cfg.crossover_x0, cfg.asymptotic_pairs)?;
    if bound > cfg.tol * v.abs().max(1.0) {
        return Err(Error::NonConvergence {
            what: "trigamma asymptotic series".into(),
            achieved: bound,
        });
    }
    Ok(v)
}

fn w_taylor(x: f64, cfg: &KernelConfig) -> f64 {
    let zeta = odd_zeta_cached();
    let x2 = x * x;
    let mut p = x * x2;
    let mut s = 2.0 * x;
    for m in 1..=cfg.taylor_terms {
        s += 4.0 * m as f64 * zeta.get(m) * p;
        p *= x2;
    }
    fejer_k(x) * s
}

fn w_shift(x: f64, cfg: &KernelConfig) -> f64 {
    // x > taylor_radius here, so x + 1 > 1 and the trigamma call cannot fail
    let (t, _) = trigamma_with_bound(x + 1.0, cfg.crossover_x0, cfg.asymptotic_pairs)
        .expect("argument is positive");
    1.0 - 2.0 * sin_pi_over_pi_sq(x) * (0.5 / (x * x) + t - 1.0 / x)
}

/// `W(x)` by the fast route.
pub fn w_fast(x: f64, cfg: &KernelConfig) -> f64 {
    if x < 0.0 {
        return -w_fast(-x, cfg);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= cfg.taylor_radius {
        w_taylor(x, cfg)
    } else {
        w_shift(x, cfg)
    }
}

/// A value together with a rigorous radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub value: f64,
    pub radius: f64,
}

impl Bracket {
    pub fn contains(&self, y: f64, slack: f64) -> bool {
        (y - self.value).abs() <= self.radius + slack
    }
}

/// Bracket for `sum_{n >= 1} (n + w)^-2`, `w > 0`: the point estimate
/// `1/w - 1/(2w^2) + 1/(6w^3)` lies inside `(1/w - 1/(2w^2), 1/w)`.
fn tail_bracket(w: f64) -> (f64, f64) {
    let lo = 1.0 / w - 0.5 / (w * w);
    let hi = 1.0 / w;
    let est = lo + 1.0 / (6.0 * w * w * w);
    (est, (est - lo).max(hi - est))
}

/// `W(x)` by the direct partial-fraction series with a bracketed tail.
pub fn w_oracle(x: f64, cfg: &KernelConfig) -> Result<Bracket> {
    let m = cfg.series_terms;
    if !(x.abs() + 2.0 < m as f64) {
        return Err(Error::InvalidInput(format!(
            "|x| = {} too large for series_terms = {m}",
            x.abs()
        )));
    }
    let s2 = sin_pi_over_pi_sq(x);
    let n = x.round() as i64;
    let mut sum = 0.0;
    for k in (1..=m as i64).rev() {
        let kf = k as f64;
        if k == n {
            // pole at x = k: s2 / (x - k)^2 = K(x - k)
            sum += fejer_k(x - kf) - s2 / ((x + kf) * (x + kf));
        } else if -k == n {
            sum += s2 / ((x - kf) * (x - kf)) - fejer_k(x + kf);
        } else {
            let d = (kf - x) * (kf + x);
            sum += s2 * 4.0 * kf * x / (d * d);
        }
    }
    // 2/x term: s2 * 2/x = 2 x K(x)
    sum += 2.0 * x * fejer_k(x);
    let (tp, rp) = tail_bracket(m as f64 - x);
    let (tm, rm) = tail_bracket(m as f64 + x);
    let value = sum + s2 * (tp - tm);
    let radius = s2 * (rp + rm) + 1e-16 * (m as f64).sqrt() * value.abs().max(1.0);
    Ok(Bracket { value, radius })
}

/// `W(x)` by the requested route.
pub fn w_eval(x: f64, cfg: &KernelConfig, mode: WMode) -> Result<f64> {
    match mode {
        WMode::Fast => Ok(w_fast(x, cfg)),
        WMode::Oracle => w_oracle(x, cfg).map(|b| b.value),
    }
}

fn b_upper(x: f64, cfg: &KernelConfig) -> f64 {
    w_fast(x, cfg) + fejer_k(x)
}

fn b_lower(x: f64, cfg: &KernelConfig) -> f64 {
    w_fast(x, cfg) - fejer_k(x)
}

/// Evaluate one member of the kernel family (fast route for `W`).
pub fn kernel_family_eval(kind: KernelKind, x: f64, cfg: &KernelConfig) -> Result<f64> {
    kind.validate()?;
    if !x.is_finite() {
        return Err(Error::Domain("kernel argument must be finite".into()));
    }
    Ok(match kind {
        KernelKind::K => fejer_k(x),
        KernelKind::W => w_fast(x, cfg),
        KernelKind::B => b_upper(x, cfg),
        KernelKind::Bminus => b_lower(x, cfg),
        KernelKind::S(l) => 0.5 * (b_upper(x, cfg) + b_upper(l - x, cfg)),
        KernelKind::Sigma(l) => 0.5 * (b_lower(x, cfg) + b_lower(l - x, cfg)),
    })
}

/// `(sin(pi z)/pi)^2 { sum_{k=0}^{l} (z-k)^-2 + a/z + b/(l-z) }` for integer
/// `l`, written with Fejer kernels so that the nodes are regular points.
pub fn interpolatory_format(l: u32, a: f64, b: f64, z: f64) -> f64 {
    let lf = l as f64;
    let mut s: f64 = (0..=l).map(|k| fejer_k(z - k as f64)).sum();
    s += a * z * fejer_k(z) + b * (lf - z) * fejer_k(lf - z);
    s
}

/// `1/pi - y cot(pi y)` for `|y| <= 1/2`, even in `y`.
fn cot_defect(y: f64) -> f64 {
    let y = y.abs();
    if y < 1e-2 {
        let p = PI * y;
        let p2 = p * p;
        // pi y^2/3 + pi^3 y^4/45 + 2 pi^5 y^6/945 + pi^7 y^8/4725
        return (p2 / 3.0
            + p2 * p2 / 45.0
            + 2.0 * p2 * p2 * p2 / 945.0
            + p2 * p2 * p2 * p2 / 4725.0)
            / PI;
    }
    1.0 / PI - y / (PI * y).tan()
}

/// Fourier profile `Q(v) = |v|/pi + (1-|v|) v cot(pi v)` on `[-1, 1]`, zero
/// outside. Evaluated through `Q = 1/pi - (1-|v|) c(v) = |v| c(1-|v|)` with
/// `c(y) = 1/pi - y cot(pi y)`, which keeps both endpoints regular.
pub fn q_eval(v: f64) -> f64 {
    let a = v.abs();
    if a > 1.0 || !v.is_finite() {
        return 0.0;
    }
    if a <= 0.5 {
        1.0 / PI - (1.0 - a) * cot_defect(a)
    } else {
        a * cot_defect(1.0 - a)
    }
}

/// `T(v) = (Q(v) - Q(0)) / v`, with `T(0) = 0`.
pub fn t_profile(v: f64) -> f64 {
    let a = v.abs();
    if a > 1.0 {
        return -1.0 / (PI * v);
    }
    if v == 0.0 {
        return 0.0;
    }
    if a < 1e-2 {
        let p = PI * a;
        let p2 = p * p;
        let c_over_y = PI * a / 3.0 + PI * p2 * a / 45.0 + 2.0 * PI * p2 * p2 * a / 945.0;
        return -(1.0 - a) * c_over_y * v.signum();
    }
    (q_eval(v) - 1.0 / PI) / v
}

/// `R_B(v) = -i T(v) + (1 - |v|)` as (real, imaginary) parts.
pub fn r_upper(v: f64) -> (f64, f64) {
    (1.0 - v.abs().min(1.0), -t_profile(v))
}

/// `R_b(v) = -i T(v) - (1 - |v|)`.
pub fn r_lower(v: f64) -> (f64, f64) {
    (-(1.0 - v.abs().min(1.0)), -t_profile(v))
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn grid_then_golden<F: Fn(f64) -> f64 + Copy>(f: F, n: usize, xtol: f64) -> (f64, f64) {
    let mut best = (0.0, f(0.0));
    for i in 1..=n {
        let x = i as f64 / n as f64;
        let y = f(x);
        if y > best.1 {
            best = (x, y);
        }
    }
    let h = 1.0 / n as f64;
    let a = (best.0 - h).max(0.0);
    let b = (best.0 + h).min(1.0);
    let refined = golden_max(f, a, b, xtol);
    if refined.1 >= best.1 {
        refined
    } else {
        best
    }
}

/// `lambda = sup_{0 <= xi <= 1} sqrt(Q(xi)^2 + xi^2 (1 - xi)^2)`.
pub fn lambda_constant(tol: f64) -> f64 {
    let f = |x: f64| (q_eval(x).powi(2) + (x * (1.0 - x)).powi(2)).sqrt();
    let xtol = tol.clamp(1e-12, 1e-3).sqrt() * 1e-3;
    grid_then_golden(f, 2000, xtol.max(1e-10)).1
}

/// `sup |R_B| = sup |R_b|` over `[-1, 1]`.
pub fn rho_r() -> f64 {
    let f = |v: f64| {
        let (re, im) = r_upper(v);
        (re * re + im * im).sqrt()
    };
    grid_then_golden(f, 4000, 1e-10).1
}

/// `int_{-1}^{1} (Q(v)/v) sin(2 pi x v) dv`, which reproduces `W(x)`.
pub fn fourier_w_check(x: f64, cfg: &KernelConfig) -> Result<Quadrature<f64>> {
    if !x.is_finite() {
        return Err(Error::Domain("argument must be finite".into()));
    }
    if x == 0.0 {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let g = |v: f64| {
        let s = (2.0 * PI * x * v).sin();
        2.0 * q_eval(v) * s / v
    };
    let breaks: Vec<f64> = (1..(2.0 * x.abs()).ceil() as usize)
        .map(|i| i as f64 / (2.0 * x.abs()))
        .collect();
    let q = integrate(g, 0.0, 1.0, &breaks, QuadOptions::abs(cfg.tol.max(1e-13)))?;
    Ok(q)
}

/// Outcome of [`extremal_family_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub l: u32,
    pub eta: f64,
    /// Number of grid points where `F_eta < chi` (beyond rounding).
    pub violations: usize,
    /// `min (F_eta - chi)` over the grid.
    pub min_margin: f64,
    /// `int_{-R}^{R}` of the perturbation, with quadrature error.
    pub extra_integral: f64,
    pub extra_error: f64,
    pub radius: f64,
}

/// The perturbation `(sin(pi x)/pi)^2 l / (x (l - x))` for integer `l`.
pub fn extremal_perturbation(l: u32, x: f64) -> f64 {
    let lf = l as f64;
    // partial fractions: l/(x(l-x)) = 1/x + 1/(l-x)
    x * fejer_k(x) + (lf - x) * fejer_k(lf - x)
}

/// Check `F_eta = S_l + eta (sin(pi x)/pi)^2 l/(x(l-x)) >= chi_[0,l]` on a
/// grid and integrate the perturbation over `[-R, R]`.
pub fn extremal_family_check(
    l: u32,
    eta: f64,
    grid: &[f64],
    radius: f64,
    cfg: &KernelConfig,
) -> Result<ExtremalReport> {
    if l == 0 {
        return Err(Error::InvalidInput("l must be a positive integer".into()));
    }
    let lf = l as f64;
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for &x in grid {
        let f = kernel_family_eval(KernelKind::S(lf), x, cfg)? + eta * extremal_perturbation(l, x);
        let margin = f - chi_interval(lf, x);
        if margin < -1e-13 {
            violations += 1;
        }
        min_margin = min_margin.min(margin);
    }
    let r = radius.abs();
    let breaks: Vec<f64> = ((-r).ceil() as i64..=r.floor() as i64)
        .map(|k| k as f64)
        .collect();
    let q = integrate(
        |x| extremal_perturbation(l, x),
        -r,
        r,
        &breaks,
        QuadOptions::abs(1e-11),
    )?;
    Ok(ExtremalReport {
        l,
        eta,
        violations,
        min_margin,
        extra_integral: q.value,
        extra_error: q.error,
        radius: r,
    })
}

/// `max |W(x) - sgn(x)| x^3` over the given points.
pub fn w_decay_diagnostic(xs: &[f64], cfg: &KernelConfig) -> f64 {
    xs.iter()
        .map(|&x| (w_fast(x, cfg) - sgn(x)).abs() * x.abs().powi(3))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> KernelConfig {
        KernelConfig {
            series_terms: 200_000,
            ..KernelConfig::default()
        }
    }

    #[test]
    fn fejer_values() {
        assert_eq!(fejer_k(0.0), 1.0);
        assert!(fejer_k(1.0).abs() < 1e-32);
        assert!((fejer_k(0.5) - 4.0 / (PI * PI)).abs() < 1e-16);
        // the small-argument branch joins the direct formula
        let x = 1e-4;
        let direct = ((PI * x).sin() / (PI * x)).powi(2);
        assert!((fejer_k(x * 0.999_999) - direct).abs() < 1e-12);
    }

    #[test]
    fn fejer_derivative_matches_finite_difference() {
        for &x in &[0.3, 1.7, -2.2, 5e-5] {
            let h = 1e-6;
            let fd = (fejer_k(x + h) - fejer_k(x - h)) / (2.0 * h);
            assert!((fejer_k_prime(x) - fd).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn trigamma_shift_identity() {
        let c = KernelConfig::default();
        for &x in &[0.1, 0.7, 3.3, 12.0] {
            let d = trigamma(x, &c).unwrap() - trigamma(x + 1.0, &c).unwrap();
            assert!((d - 1.0 / (x * x)).abs() < 1e-13 * (1.0 / (x * x)).max(1.0));
        }
        assert!(trigamma(-0.5, &c).is_err());
    }

    #[test]
    fn w_closed_forms() {
        let c = cfg();
        assert_eq!(w_fast(0.0, &c), 0.0);
        assert!((w_fast(0.5, &c) - 8.0 / (PI * PI)).abs() < 1e-15);
        for k in 1..6 {
            assert!((w_fast(k as f64, &c) - 1.0).abs() < 1e-15);
            let o = w_oracle(k as f64, &c).unwrap();
            assert!((o.value - 1.0).abs() < 1e-12);
            let near = w_oracle(k as f64 + 1e-6, &c).unwrap();
            assert!((near.value - 1.0).abs() < 1e-9);
        }
        let o = w_oracle(0.5, &c).unwrap();
        assert!(o.contains(8.0 / (PI * PI), 1e-14));
    }

    #[test]
    fn w_fast_agrees_with_oracle() {
        let c = cfg();
        for i in -40..=40 {
            let x = i as f64 * 0.37 + 0.01;
            let o = w_oracle(x, &c).unwrap();
            assert!((w_fast(x, &c) - o.value).abs() <= o.radius + 1e-13, "x={x}");
        }
    }

    #[test]
    fn taylor_and_shift_routes_meet() {
        let c = KernelConfig::default();
        for &x in &[0.2, 0.3, 0.39, 0.4] {
            let t = w_taylor(x, &c);
            let s = w_shift(x, &c);
            assert!((t - s).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn taylor_remainder_is_bounded_by_next_term() {
        let c = KernelConfig::default();
        let zeta = odd_zeta_cached();
        let m = 6;
        for &x in &[0.1f64, 0.25, 0.4] {
            let mut s = 2.0 * x;
            for j in 1..=m {
                s += 4.0 * j as f64 * zeta.get(j) * x.powi(2 * j as i32 + 1);
            }
            let resid = (w_shift(x, &c) / fejer_k(x) - s).abs();
            let next = 4.0 * (m + 1) as f64 * zeta.get(m + 1) * x.powi(2 * m as i32 + 3);
            assert!(resid <= 1.5 * next + 1e-14, "x={x}: {resid} vs {next}");
        }
    }

    #[test]
    fn family_values() {
        let c = cfg();
        assert!((kernel_family_eval(KernelKind::B, 0.0, &c).unwrap() - 1.0).abs() < 1e-15);
        assert!((kernel_family_eval(KernelKind::Bminus, 0.0, &c).unwrap() + 1.0).abs() < 1e-15);
        let s = kernel_family_eval(KernelKind::S(1.0), 0.5, &c).unwrap();
        assert!((s - 12.0 / (PI * PI)).abs() < 1e-15);
        assert!(kernel_family_eval(KernelKind::S(-1.0), 0.5, &c).is_err());
    }

    #[test]
    fn s_matches_interpolatory_format_for_integer_l() {
        let c = cfg();
        for l in 1..=4u32 {
            for i in -30..=30 {
                let z = i as f64 * 0.29 + 0.013;
                let s = kernel_family_eval(KernelKind::S(l as f64), z, &c).unwrap();
                let f = interpolatory_format(l, 1.0, 1.0, z);
                assert!((s - f).abs() < 1e-13, "l={l}, z={z}");
            }
        }
    }

    #[test]
    fn q_values_and_identities() {
        assert!((q_eval(0.0) - 1.0 / PI).abs() < 1e-16);
        assert_eq!(q_eval(1.0), 0.0);
        assert!((q_eval(0.5) - 0.5 / PI).abs() < 1e-16);
        assert_eq!(q_eval(1.5), 0.0);
        for i in 0..=100 {
            let v = i as f64 / 100.0;
            assert!((q_eval(v) + q_eval(1.0 - v) - 1.0 / PI).abs() < 1e-15);
            // direct formula away from the removable points
            if i > 0 && i < 100 {
                let direct = v / PI + (1.0 - v) * v / (PI * v).tan();
                assert!((q_eval(v) - direct).abs() < 1e-14);
            }
        }
        let h = 1e-5;
        let d2 = (q_eval(h) - 2.0 * q_eval(0.0) + q_eval(-h)) / (h * h);
        assert!((d2 + 2.0 * PI / 3.0).abs() < 1e-3);
    }

    #[test]
    fn t_profile_is_continuous_at_switch() {
        for &v in &[0.009_999_9, 0.010_000_1] {
            let direct = (q_eval(v) - 1.0 / PI) / v;
            assert!((t_profile(v) - direct).abs() < 1e-12);
        }
        assert_eq!(t_profile(0.0), 0.0);
        assert!((t_profile(1.0) + 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn lambda_brackets() {
        let l = lambda_constant(5e-8);
        assert!((l - 0.326_359_8).abs() < 5e-8);
        assert!(l >= 1.0 / PI && l < 0.5);
    }

    #[test]
    fn rho_r_is_one() {
        assert!((rho_r() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fourier_route_reproduces_w() {
        let c = KernelConfig::default();
        for &x in &[0.5, -0.5, 1.3, 2.0, -3.7] {
            let q = fourier_w_check(x, &c).unwrap();
            assert!((q.value - w_fast(x, &c)).abs() < 1e-10, "x={x}");
        }
        assert_eq!(fourier_w_check(0.0, &c).unwrap().value, 0.0);
    }

    #[test]
    fn extremal_family() {
        let c = cfg();
        let grid: Vec<f64> = (0..10_000)
            .map(|i| -10.0 + 20.0 * i as f64 / 9999.0)
            .collect();
        let r0 = extremal_family_check(1, 0.0, &grid, 10.5, &c).unwrap();
        assert_eq!(r0.violations, 0);
        let r = extremal_family_check(1, 0.05, &grid, 10.5, &c).unwrap();
        assert_eq!(r.violations, 0);
        let r1 = extremal_family_check(1, 0.05, &[], 40.5, &c).unwrap();
        let r2 = extremal_family_check(1, 0.05, &[], 160.5, &c).unwrap();
        assert!(r2.extra_integral.abs() < r1.extra_integral.abs());
        assert!(r2.extra_integral.abs() < 1e-2);
    }

    #[test]
    fn w_decay_is_cubic() {
        let c = KernelConfig::default();
        let xs: Vec<f64> = (0..=950).map(|i| 5.0 + i as f64 * 0.1).collect();
        let d = w_decay_diagnostic(&xs, &c);
        assert!(d <= 1.0 / (3.0 * PI * PI) + 1e-6, "{d}");
    }
}
