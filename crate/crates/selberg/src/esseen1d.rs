//! One-variable smoothing inequality
//!
//! `sup |F - G| <= c1 pv int_{-W}^{W} |phi - psi| / |z| dz + c2 m / W`
//!
//! with `(c1, c2) = (1/4, pi)`, together with the principal-value integral,
//! the majorant/minorant Fourier representations it rests on, Gaussian
//! mollification and CDF distance measurement.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{self, KernelConfig, KernelKind};
use crate::quad::{integrate, QuadOptions};
use crate::special::{binomial_pmf, normal_cdf, normal_pdf};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type CfFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
type Sampler = Arc<dyn Fn(&mut ChaCha8Rng) -> f64 + Send + Sync>;

/// `int |x|^alpha dF = value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub alpha: f64,
    pub value: f64,
}

/// A one-dimensional law (or a signed comparison function with the same
/// interface): right-continuous CDF, characteristic function, optional
/// density bound, moment record and declared jump points.
#[derive(Clone)]
pub struct Distribution1D {
    pub name: String,
    cdf: RealFn,
    cdf_left: Option<RealFn>,
    cf: CfFn,
    sampler: Option<Sampler>,
    pub density_bound: Option<f64>,
    pub moment: Option<Moment>,
    pub atoms: Vec<f64>,
}

/// The comparison side of the smoothing inequality. `G` may be signed as
/// long as `G(-inf) = 0`, `G(inf) = 1` and `|G'| <= m`.
pub type ComparisonTarget = Distribution1D;

impl fmt::Debug for Distribution1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distribution1D")
            .field("name", &self.name)
            .field("density_bound", &self.density_bound)
            .field("moment", &self.moment)
            .field("atoms", &self.atoms.len())
            .finish()
    }
}

impl Distribution1D {
    pub fn new<C, P>(name: impl Into<String>, cdf: C, cf: P) -> Self
    where
        C: Fn(f64) -> f64 + Send + Sync + 'static,
        P: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            cdf: Arc::new(cdf),
            cdf_left: None,
            cf: Arc::new(cf),
            sampler: None,
            density_bound: None,
            moment: None,
            atoms: Vec::new(),
        }
    }

    pub fn with_left_limit<C: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, f: C) -> Self {
        self.cdf_left = Some(Arc::new(f));
        self
    }

    pub fn with_sampler<S: Fn(&mut ChaCha8Rng) -> f64 + Send + Sync + 'static>(
        mut self,
        s: S,
    ) -> Self {
        self.sampler = Some(Arc::new(s));
        self
    }

    pub fn with_density_bound(mut self, m: f64) -> Self {
        self.density_bound = Some(m);
        self
    }

    pub fn with_moment(mut self, alpha: f64, value: f64) -> Self {
        self.moment = Some(Moment { alpha, value });
        self
    }

    pub fn with_atoms(mut self, atoms: Vec<f64>) -> Self {
        self.atoms = atoms;
        self
    }

    pub fn cdf(&self, t: f64) -> f64 {
        (self.cdf)(t)
    }

    /// `F(t - 0)`.
    pub fn cdf_left(&self, t: f64) -> f64 {
        match &self.cdf_left {
            Some(f) => f(t),
            None => (self.cdf)(t),
        }
    }

    pub fn cf(&self, zeta: f64) -> Complex64 {
        (self.cf)(zeta)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Option<f64> {
        self.sampler.as_ref().map(|s| s(rng))
    }

    /// Normal law `N(mu, sigma^2)`.
    pub fn normal(mu: f64, sigma: f64) -> Self {
        let m = 1.0 / (sigma * (2.0 * PI).sqrt());
        // E|X|^2 for the moment record
        let second = mu * mu + sigma * sigma;
        Self::new(
            format!("normal({mu}, {sigma})"),
            move |t| normal_cdf((t - mu) / sigma),
            move |z| Complex64::new(-0.5 * sigma * sigma * z * z, mu * z).exp(),
        )
        .with_sampler(move |r| {
            let y: f64 = StandardNormal.sample(r);
            mu + sigma * y
        })
        .with_density_bound(m)
        .with_moment(2.0, second)
    }

    /// Unit mass at `x0`.
    pub fn point_mass(x0: f64) -> Self {
        Self::new(
            format!("point_mass({x0})"),
            move |t| if t >= x0 { 1.0 } else { 0.0 },
            move |z| Complex64::new(0.0, z * x0).exp(),
        )
        .with_left_limit(move |t| if t > x0 { 1.0 } else { 0.0 })
        .with_sampler(move |_| x0)
        .with_moment(2.0, x0 * x0)
        .with_atoms(vec![x0])
    }

    /// `(S - n p) / sqrt(n p (1-p))` for `S ~ Binomial(n, p)`.
    pub fn binomial_standardized(n: u64, p: f64) -> Result<Self> {
        if n == 0 || !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidInput(
                "binomial needs n >= 1 and 0 < p < 1".into(),
            ));
        }
        if n > i32::MAX as u64 {
            return Err(Error::InvalidInput("binomial n too large".into()));
        }
        let nf = n as f64;
        let ni = n as i32;
        let mean = nf * p;
        let sd = (nf * p * (1.0 - p)).sqrt();
        let pmf = binomial_pmf(n, p);
        let atoms: Vec<f64> = (0..=n).map(|k| (k as f64 - mean) / sd).collect();
        let mut cum = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for q in &pmf {
            acc += q;
            cum.push(acc.min(1.0));
        }
        let cum = Arc::new(cum);
        let cum_l = Arc::clone(&cum);
        // index of the last atom <= t
        let idx = move |t: f64| -> Option<usize> {
            let k = (t * sd + mean + 1e-9).floor();
            if k < 0.0 {
                None
            } else {
                Some((k as usize).min(n as usize))
            }
        };
        let idx_l = move |t: f64| -> Option<usize> {
            let k = (t * sd + mean - 1e-9).ceil() - 1.0;
            if k < 0.0 {
                None
            } else {
                Some((k as usize).min(n as usize))
            }
        };
        let cdf = move |t: f64| idx(t).map_or(0.0, |k| cum[k]);
        let cdf_left = move |t: f64| idx_l(t).map_or(0.0, |k| cum_l[k]);
        let cf = move |z: f64| {
            let step = Complex64::new(0.0, z / sd).exp();
            let base = Complex64::new(1.0 - p, 0.0) + step * p;
            Complex64::new(0.0, -z * mean / sd).exp() * base.powi(ni)
        };
        let cf = move |z: f64| {
            if p == 0.5 {
                // symmetric case: a real power of a cosine
                Complex64::new((z / (2.0 * sd)).cos().powi(ni), 0.0)
            } else {
                cf(z)
            }
        };
        Ok(Self::new(format!("binomial_std({n}, {p})"), cdf, cf)
            .with_left_limit(cdf_left)
            .with_sampler(move |r: &mut ChaCha8Rng| {
                let mut s = 0u64;
                for _ in 0..n {
                    if r.random::<f64>() < p {
                        s += 1;
                    }
                }
                (s as f64 - mean) / sd
            })
            .with_moment(2.0, 1.0)
            .with_atoms(atoms))
    }

    /// Sum of `n` uniforms on `[-1/2, 1/2]`, scaled to unit variance. The
    /// CDF is the exact Irwin-Hall polynomial, `n <= 16`.
    pub fn irwin_hall_standardized(n: u32) -> Result<Self> {
        if !(1..=16).contains(&n) {
            return Err(Error::InvalidInput(
                "Irwin-Hall family supported for 1 <= n <= 16".into(),
            ));
        }
        let nf = n as f64;
        let scale = (nf / 12.0).sqrt();
        let binom: Vec<f64> = (0..=n).map(|k| binom_f64(n, k)).collect();
        let fact: f64 = (1..=n).map(f64::from).product();
        let raw = move |x: f64| -> f64 {
            // P(U_1 + ... + U_n <= x) for uniforms on [0, 1]
            if x <= 0.0 {
                return 0.0;
            }
            if x >= nf {
                return 1.0;
            }
            let mut s = 0.0;
            for k in 0..=(x.floor() as u32) {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * binom[k as usize] * (x - k as f64).powi(n as i32);
            }
            s / fact
        };
        let cdf = move |t: f64| {
            let x = t * scale + 0.5 * nf;
            // use the shorter side of the symmetric law
            if x <= 0.5 * nf {
                raw(x)
            } else {
                1.0 - raw(nf - x)
            }
        };
        let cf = move |z: f64| {
            let u = 0.5 * z / scale;
            let s = if u.abs() < 1e-8 {
                1.0 - u * u / 6.0
            } else {
                u.sin() / u
            };
            Complex64::new(s.powi(n as i32), 0.0)
        };
        Ok(Self::new(format!("irwin_hall_std({n})"), cdf, cf)
            .with_sampler(move |r: &mut ChaCha8Rng| {
                let s: f64 = (0..n).map(|_| r.random::<f64>() - 0.5).sum();
                s / scale
            })
            .with_moment(2.0, 1.0))
    }
}

fn binom_f64(n: u32, k: u32) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

/// Constants and tolerances for the smoothing bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsseenConfig {
    pub c1: f64,
    pub c2: f64,
    /// Budget for the excluded neighbourhood of the origin.
    pub tol: f64,
    /// Absolute tolerance of the main quadrature.
    pub quad_tol: f64,
}

impl Default for EsseenConfig {
    fn default() -> Self {
        Self {
            c1: 0.25,
            c2: PI,
            tol: 1e-8,
            quad_tol: 1e-9,
        }
    }
}

/// The pieces of one smoothing bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsseenReport {
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    /// `int_{eps <= |z| <= W} |phi - psi| / |z|`.
    pub integral: f64,
    pub integral_error: f64,
    pub exclusion_radius: f64,
    /// Certified bound on `c1` times the excluded part of the integral.
    pub exclusion_error: f64,
    /// `c2 m / W`.
    pub tail_term: f64,
    pub total: f64,
}

fn holder_data(f: &Distribution1D, g: &Distribution1D) -> Result<(f64, f64)> {
    let (mf, mg) = match (f.moment, g.moment) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("both laws need a moment record".into())),
    };
    if !(mf.alpha > 0.0 && mg.alpha > 0.0) || mf.value < 0.0 || mg.value < 0.0 {
        return Err(Error::InvalidInput(
            "moment records need alpha > 0 and value >= 0".into(),
        ));
    }
    let at = mf.alpha.min(mg.alpha).min(1.0);
    // Lyapunov: E|X|^at <= (E|X|^alpha)^(at/alpha)
    let msum = mf.value.powf(at / mf.alpha) + mg.value.powf(at / mg.alpha);
    Ok((at, msum))
}

/// Smoothing bound at a fixed `W = omega`.
pub fn esseen_bound_1d(
    f: &Distribution1D,
    g: &ComparisonTarget,
    omega: f64,
    cfg: &EsseenConfig,
) -> Result<EsseenReport> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidInput("omega must be positive".into()));
    }
    let m = g
        .density_bound
        .ok_or_else(|| Error::InvalidInput("comparison law needs a density bound".into()))?;
    let (at, msum) = holder_data(f, g)?;
    // |phi - psi|(z) <= 2 msum |z|^at, so the part |z| < eps contributes
    // at most c1 * 4 msum eps^at / at
    let eps = if msum > 0.0 {
        ((cfg.tol / 10.0) * at / (4.0 * cfg.c1 * msum)).powf(1.0 / at)
    } else {
        1e-12
    }
    .min(omega * 1e-3);
    let exclusion_error = cfg.c1 * 4.0 * msum * eps.powf(at) / at;

    let diff = |z: f64| (f.cf(z) - g.cf(z)).norm();
    let mut z = eps;
    while z < 1.0 {
        let budget = 2.0 * msum * z.powf(at);
        if diff(z) > budget * (1.0 + 1e-9) + 1e-14 || diff(-z) > budget * (1.0 + 1e-9) + 1e-14 {
            return Err(Error::InvalidInput(format!(
                "characteristic functions exceed the Holder budget at z = {z:.3e}; moment declaration inconsistent"
            )));
        }
        z *= 10.0;
    }

    let integrand = |z: f64| (diff(z) + diff(-z)) / z;
    let mut breaks = Vec::new();
    let mut b = eps * 2.0;
    while b < omega.min(1.0) {
        breaks.push(b);
        b *= 2.0;
    }
    let mut u = 1.0;
    while u < omega {
        breaks.push(u);
        u += 1.0;
    }
    let opts = QuadOptions {
        abs_tol: cfg.quad_tol,
        rel_tol: 0.0,
        max_segments: 200_000,
    };
    let q = integrate(integrand, eps, omega, &breaks, opts)?;
    let tail_term = cfg.c2 * m / omega;
    let total = cfg.c1 * (q.value + q.error) + exclusion_error + tail_term;
    Ok(EsseenReport {
        omega,
        c1: cfg.c1,
        c2: cfg.c2,
        integral: q.value,
        integral_error: q.error,
        exclusion_radius: eps,
        exclusion_error,
        tail_term,
        total,
    })
}

/// Best bound over `W in {2^j : j_min <= j <= j_max}`.
pub fn optimize_omega(
    f: &Distribution1D,
    g: &ComparisonTarget,
    j_range: std::ops::RangeInclusive<i32>,
    cfg: &EsseenConfig,
) -> Result<EsseenReport> {
    let reports: Vec<Result<EsseenReport>> = j_range
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&j| esseen_bound_1d(f, g, 2f64.powi(j), cfg))
        .collect();
    let mut best: Option<EsseenReport> = None;
    for r in reports {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.total < b.total) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::InvalidInput("empty omega range".into()))
}

/// Result of a principal-value integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvResult {
    pub re: f64,
    pub im: f64,
    pub error: f64,
}

impl PvResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `lim_{eps -> 0} int_{eps <= |v| <= a} h(v) dv`, pairing `v` with `-v` on
/// the dyadic shells `[a 4^-(j+1), a 4^-j]`.
pub fn pv_integral<H: Fn(f64) -> Complex64>(h: H, a: f64, tol: f64) -> Result<PvResult> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput("upper limit must be positive".into()));
    }
    let paired = |v: f64| h(v) + h(-v);
    let opts = QuadOptions::abs(tol * 1e-2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut hi = a;
    let mut prev = f64::INFINITY;
    let mut quiet = 0;
    let mut stalled = 0;
    for _ in 0..60 {
        let lo = hi * 0.25;
        let q = integrate(paired, lo, hi, &[], opts)?;
        total += q.value;
        err += q.error;
        let size = q.value.norm();
        if size <= tol * 1e-2 {
            quiet += 1;
            if quiet >= 3 {
                // shells shrink at least geometrically from here on
                return Ok(PvResult {
                    re: total.re,
                    im: total.im,
                    error: err + size,
                });
            }
        } else {
            quiet = 0;
        }
        if size > 0.5 * prev && size > tol * 1e-2 {
            stalled += 1;
            if stalled >= 4 {
                // no geometric decay: the odd part does not cancel
                return Err(Error::NonConvergence {
                    what: "principal-value integral (paired shells do not shrink)".into(),
                    achieved: size,
                });
            }
        } else {
            stalled = 0;
        }
        prev = size;
        hi = lo;
    }
    Err(Error::NonConvergence {
        what: "principal-value integral".into(),
        achieved: prev,
    })
}

/// `pv int_{-1}^{1} [1/(pi i v) + R(v)] e^{2 pi i x v} dv`, which equals
/// `B(x)` for the majorant profile and `b(x)` for the minorant profile.
pub fn smoothing_representation(x: f64, upper: bool, tol: f64) -> Result<f64> {
    let h = move |v: f64| {
        let (re, im) = if upper {
            kernels::r_upper(v)
        } else {
            kernels::r_lower(v)
        };
        let core = Complex64::new(re, im) + Complex64::new(0.0, -1.0 / (PI * v));
        core * Complex64::new(0.0, 2.0 * PI * x * v).exp()
    };
    let r = pv_integral(h, 1.0, tol)?;
    Ok(r.re)
}

/// Target value for [`smoothing_representation`].
pub fn representation_target(x: f64, upper: bool) -> f64 {
    let kind = if upper {
        KernelKind::B
    } else {
        KernelKind::Bminus
    };
    kernels::kernel_family_eval(kind, x, &KernelConfig::default()).expect("finite argument")
}

fn abs_moment_std_normal(alpha: f64) -> f64 {
    2f64.powf(alpha / 2.0) * statrs::function::gamma::gamma((alpha + 1.0) / 2.0) / PI.sqrt()
}

/// `N_eps * F`: convolution with a centred normal of standard deviation `eps`.
pub fn gaussian_mollify(f: &Distribution1D, eps: f64) -> Result<Distribution1D> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let base = f.clone();
    let base_cf = f.clone();
    let base_s = f.clone();
    let atoms = f.atoms.clone();
    let cdf = move |t: f64| {
        // E F(t - eps Y); F jumps where y = (t - x_k)/eps
        let breaks: Vec<f64> = atoms
            .iter()
            .map(|x| (t - x) / eps)
            .filter(|y| y.abs() < 12.0)
            .collect();
        let g = |y: f64| base.cdf(t - eps * y) * normal_pdf(y);
        let q = integrate(
            g,
            -12.0,
            12.0,
            &breaks,
            QuadOptions {
                abs_tol: 1e-13,
                rel_tol: 0.0,
                max_segments: 100_000,
            },
        );
        q.map(|q| q.value.clamp(0.0, 1.0)).unwrap_or(f64::NAN)
    };
    let cf = move |z: f64| base_cf.cf(z) * (-0.5 * eps * eps * z * z).exp();
    let own = 1.0 / (eps * (2.0 * PI).sqrt());
    let m = f.density_bound.map_or(own, |m| m.min(own));
    let mut out = Distribution1D::new(format!("mollified({}, {eps})", f.name), cdf, cf)
        .with_density_bound(m)
        .with_sampler(move |r: &mut ChaCha8Rng| {
            let y: f64 = StandardNormal.sample(r);
            base_s.sample(r).unwrap_or(f64::NAN) + eps * y
        });
    if let Some(mo) = f.moment {
        let ey = abs_moment_std_normal(mo.alpha) * eps.powf(mo.alpha);
        let value = if mo.alpha >= 1.0 {
            // Minkowski
            (mo.value.powf(1.0 / mo.alpha) + ey.powf(1.0 / mo.alpha)).powf(mo.alpha)
        } else {
            mo.value + ey
        };
        out = out.with_moment(mo.alpha, value);
    }
    Ok(out)
}

/// `max |F(t) - G(t)|` over the grid, including both one-sided limits at
/// every declared jump point of either function.
pub fn sup_cdf_distance(f: &Distribution1D, g: &Distribution1D, grid: &[f64]) -> f64 {
    let mut best = grid
        .iter()
        .map(|&t| (f.cdf(t) - g.cdf(t)).abs())
        .fold(0.0, f64::max);
    for &a in f.atoms.iter().chain(&g.atoms) {
        best = best.max((f.cdf(a) - g.cdf(a)).abs());
        best = best.max((f.cdf_left(a) - g.cdf_left(a)).abs());
    }
    best
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// One row of [`convergence_harness_1d`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessRow {
    pub index: usize,
    pub sup_distance: f64,
    pub bound: EsseenReport,
    /// `max |phi_n(z + h) - phi_n(z)|` over a mesh on `[-20, 20]`.
    pub cf_increment: f64,
}

pub fn convergence_harness_1d<Fam>(
    family: Fam,
    g: &ComparisonTarget,
    indices: &[usize],
    grid: &[f64],
    cfg: &EsseenConfig,
) -> Result<Vec<HarnessRow>>
where
    Fam: Fn(usize) -> Result<Distribution1D> + Sync,
{
    indices
        .par_iter()
        .map(|&n| {
            let f = family(n)?;
            let sup_distance = sup_cdf_distance(&f, g, grid);
            let bound = optimize_omega(&f, g, -2..=9, cfg)?;
            let h = 0.05;
            let cf_increment = linspace(-20.0, 20.0 - h, 800)
                .into_iter()
                .map(|z| (f.cf(z + h) - f.cf(z)).norm())
                .fold(0.0, f64::max);
            Ok(HarnessRow {
                index: n,
                sup_distance,
                bound,
                cf_increment,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sine_integral;

    #[test]
    fn pv_examples() {
        let r = pv_integral(|v| Complex64::new(1.0 / v, 0.0), 1.0, 1e-10).unwrap();
        assert!(r.value().norm() < 1e-14);
        let r = pv_integral(|v: f64| Complex64::new(v.signum() * v * v, 0.0), 1.0, 1e-10).unwrap();
        assert!(r.value().norm() < 1e-14);
        let h = |v: f64| Complex64::new(0.0, 2.0 * PI * v).exp() / Complex64::new(0.0, PI * v);
        let r = pv_integral(h, 1.0, 1e-10).unwrap();
        let expected = 2.0 / PI * sine_integral(2.0 * PI);
        assert!((r.re - expected).abs() < 1e-9, "{} vs {expected}", r.re);
        assert!(r.im.abs() < 1e-12);
    }

    #[test]
    fn pv_detects_even_singularity() {
        let r = pv_integral(|v: f64| Complex64::new(1.0 / v.abs(), 0.0), 1.0, 1e-8);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn representation_reproduces_majorant() {
        for &x in &[0.3, 1.7, -2.4] {
            let up = smoothing_representation(x, true, 1e-9).unwrap();
            assert!((up - representation_target(x, true)).abs() < 1e-6, "x={x}");
            let lo = smoothing_representation(x, false, 1e-9).unwrap();
            assert!((lo - representation_target(x, false)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn identical_laws_give_tail_term_only() {
        let n = Distribution1D::normal(0.0, 1.0);
        let r = esseen_bound_1d(&n, &n, 10.0, &EsseenConfig::default()).unwrap();
        assert_eq!(r.integral, 0.0);
        let expected = PI / (10.0 * (2.0 * PI).sqrt());
        assert!((r.tail_term - expected).abs() < 1e-15);
        assert!((r.total - expected).abs() < 1e-8);
    }

    #[test]
    fn binomial_cdf_and_limits() {
        let b = Distribution1D::binomial_standardized(4, 0.5).unwrap();
        // atoms at -2, -1, 0, 1, 2
        assert_eq!(b.cdf(-2.0), 1.0 / 16.0);
        assert_eq!(b.cdf_left(-2.0), 0.0);
        assert!((b.cdf(0.0) - 11.0 / 16.0).abs() < 1e-15);
        assert!((b.cdf_left(0.0) - 5.0 / 16.0).abs() < 1e-15);
        assert_eq!(b.cdf(2.0), 1.0);
        assert!((b.cf(0.7) - Complex64::new(0.35f64.cos().powi(4), 0.0)).norm() < 1e-15);
        let g = Distribution1D::binomial_standardized(10, 0.3).unwrap();
        assert!((g.cf(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((g.cf(-1.3) - g.cf(1.3).conj()).norm() < 1e-14);
    }

    #[test]
    fn binomial_bound_dominates_distance() {
        let f = Distribution1D::binomial_standardized(100, 0.5).unwrap();
        let g = Distribution1D::normal(0.0, 1.0);
        let grid = linspace(-5.0, 5.0, 2001);
        let d = sup_cdf_distance(&f, &g, &grid);
        let r = esseen_bound_1d(&f, &g, 20.0, &EsseenConfig::default()).unwrap();
        assert!(r.total >= d, "{} < {d}", r.total);
        assert!(d > 0.035 && d < 0.045);
    }

    #[test]
    fn irwin_hall_matches_small_cases() {
        let u = Distribution1D::irwin_hall_standardized(1).unwrap();
        let s = 12f64.sqrt();
        // single uniform on [-1/2, 1/2], scaled by sqrt(12)
        assert!((u.cdf(0.25 * s) - 0.75).abs() < 1e-15);
        let t = Distribution1D::irwin_hall_standardized(2).unwrap();
        // triangular law on [-1, 1]: P(X <= 1/2) = 7/8
        let scale = (2.0f64 / 12.0).sqrt();
        assert!((t.cdf(0.5 / scale) - 0.875).abs() < 1e-15);
        assert!((t.cdf(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mollification() {
        let p = Distribution1D::point_mass(0.0);
        let m = gaussian_mollify(&p, 1.0).unwrap();
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-12);
        let z = 0.8;
        let expect = p.cf(z) * (-0.5 * z * z).exp();
        assert!((m.cf(z) - expect).norm() < 1e-12);
        let b = Distribution1D::binomial_standardized(16, 0.5).unwrap();
        let t = 0.25; // between atoms 0 and 0.5
        let mut prev = f64::INFINITY;
        for &eps in &[0.1, 0.01, 0.001] {
            let e = (gaussian_mollify(&b, eps).unwrap().cdf(t) - b.cdf(t)).abs();
            assert!(e <= prev);
            prev = e;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn distances() {
        let f = Distribution1D::normal(0.0, 1.0);
        let g = Distribution1D::normal(0.1, 1.0);
        let d = sup_cdf_distance(&f, &g, &linspace(-6.0, 6.0, 100_001));
        let expected = normal_cdf(0.05) - normal_cdf(-0.05);
        assert!((d - expected).abs() < 1e-9);
        let p = Distribution1D::point_mass(0.0);
        assert!((sup_cdf_distance(&p, &f, &[-1.0, 1.0]) - 0.5).abs() < 1e-15);
        assert_eq!(sup_cdf_distance(&f, &f, &[0.0, 1.0]), 0.0);
    }

    #[test]
    fn inconsistent_moment_is_flagged() {
        let f = Distribution1D::normal(5.0, 1.0).with_moment(2.0, 1e-6);
        let g = Distribution1D::normal(0.0, 1.0).with_moment(2.0, 1e-6);
        assert!(esseen_bound_1d(&f, &g, 4.0, &EsseenConfig::default()).is_err());
    }
}
