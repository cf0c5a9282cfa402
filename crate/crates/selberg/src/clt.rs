//! Central limit theorem for weighted sums of complex random variables.
//!
//! A law `F` on `C` with `E z = 0`, `E|z|^2 = 2 beta^2`, `E z^2 = 0` and
//! `E|z|^3 = rho^3` has characteristic function
//! `phi(xi) = E exp(i Re(conj(xi) z))`. For coefficients `b_j` the sum
//! `T_N = s_N^-1 sum b_j X_j` satisfies
//!
//! `|log phi_N(xi) + beta^2 |xi|^2 / 2| <= (2/3) rho^3 A^3 sum |b_j|^3 / s_N^3`
//!
//! on `|xi| <= A` once the admissibility condition holds. The vector form
//! replaces `b_j` by rows `b_n in C^J` and `s_N` by a caller-supplied
//! `sigma_N`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, uniform01};
use crate::special::{bessel_j0, bessel_j0_minus_one, normal_cdf};

/// Angular quadrature nodes for `J0`.
pub const J0_NODES: usize = 64;

type Sampler = Arc<dyn Fn(&mut ChaCha8Rng) -> Complex64 + Send + Sync>;
type CfFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A law on `C` with its sampler, characteristic function and the moment
/// constants `beta^2 = E|z|^2 / 2` and `rho^3 = E|z|^3`.
#[derive(Clone)]
pub struct ComplexLawSpec {
    pub name: String,
    sampler: Sampler,
    cf: CfFn,
    /// `phi(xi) - 1` without cancellation near `xi = 0`.
    cf_minus_one: CfFn,
    pub beta2: f64,
    pub rho3: f64,
}

impl fmt::Debug for ComplexLawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexLawSpec")
            .field("name", &self.name)
            .field("beta2", &self.beta2)
            .field("rho3", &self.rho3)
            .finish()
    }
}

impl ComplexLawSpec {
    /// Declares a centred law with `E z^2 = 0`. Rejects `beta <= 0` and
    /// moment pairs violating `2 beta^2 <= rho^2`.
    pub fn new<S, C, M>(
        name: impl Into<String>,
        sampler: S,
        cf: C,
        cf_minus_one: M,
        beta2: f64,
        rho3: f64,
    ) -> Result<Self>
    where
        S: Fn(&mut ChaCha8Rng) -> Complex64 + Send + Sync + 'static,
        C: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        M: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        if !(beta2 > 0.0 && beta2.is_finite() && rho3.is_finite()) {
            return Err(Error::InvalidInput(
                "need beta > 0 and a finite third moment".into(),
            ));
        }
        if 2.0 * beta2 > rho3.powf(2.0 / 3.0) * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(
                "moments violate E|z|^2 <= (E|z|^3)^(2/3)".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            sampler: Arc::new(sampler),
            cf: Arc::new(cf),
            cf_minus_one: Arc::new(cf_minus_one),
            beta2,
            rho3,
        })
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        (self.sampler)(rng)
    }

    pub fn beta(&self) -> f64 {
        self.beta2.sqrt()
    }

    pub fn rho(&self) -> f64 {
        self.rho3.cbrt()
    }

    /// Principal `Log phi(xi)`; fails when `|phi(xi) - 1| >= 1`.
    pub fn log_cf(&self, xi: Complex64) -> Result<Complex64> {
        let w = (self.cf_minus_one)(xi);
        if w.norm() >= 1.0 {
            return Err(Error::Branch(format!(
                "|phi - 1| = {} at xi = {xi}",
                w.norm()
            )));
        }
        let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
        Ok(Complex64::new(re, w.im.atan2(1.0 + w.re)))
    }
}

/// `phi(xi) = E exp(i Re(conj(xi) z))`.
pub fn complex_cf(law: &ComplexLawSpec, xi: Complex64) -> Complex64 {
    (law.cf)(xi)
}

/// Uniform law on the unit circle: `phi(xi) = J0(|xi|)`, `beta^2 = 1/2`,
/// `rho^3 = 1`.
pub fn haar_circle_law() -> ComplexLawSpec {
    ComplexLawSpec::new(
        "haar-circle",
        |rng| Complex64::from_polar(1.0, 2.0 * PI * uniform01(rng)),
        |xi| Complex64::new(bessel_j0(xi.norm(), J0_NODES).0, 0.0),
        |xi| Complex64::new(bessel_j0_minus_one(xi.norm(), 2 * J0_NODES), 0.0),
        0.5,
        1.0,
    )
    .expect("valid moments")
}

/// `(e1 + i e2)` with independent signs: `phi(xi) = cos(Re xi) cos(Im xi)`,
/// `beta^2 = 1`, `rho^3 = 2^(3/2)`.
pub fn rademacher_product_law() -> ComplexLawSpec {
    let sign = |rng: &mut ChaCha8Rng| if uniform01(rng) < 0.5 { -1.0 } else { 1.0 };
    ComplexLawSpec::new(
        "rademacher-product",
        move |rng| Complex64::new(sign(rng), sign(rng)),
        |xi| Complex64::new(xi.re.cos() * xi.im.cos(), 0.0),
        |xi| {
            let (sa, sb) = ((0.5 * xi.re).sin().powi(2), (0.5 * xi.im).sin().powi(2));
            Complex64::new(-2.0 * sa - 2.0 * sb + 4.0 * sa * sb, 0.0)
        },
        1.0,
        2f64.powf(1.5),
    )
    .expect("valid moments")
}

/// `sin(u)/u - 1`, by its series near zero.
fn sinc_minus_one(u: f64) -> f64 {
    if u.abs() < 1.0 {
        let (u2, mut term, mut sum) = (u * u, 1.0, 0.0);
        for k in 1..12 {
            term *= -u2 / ((2 * k) * (2 * k + 1)) as f64;
            sum += term;
        }
        sum
    } else {
        u.sin() / u - 1.0
    }
}

/// `x + i y` with `x, y` independent and uniform on `[-sqrt 3, sqrt 3]`:
/// `phi(xi) = sinc(sqrt3 Re xi) sinc(sqrt3 Im xi)`, `beta^2 = 1`.
pub fn uniform_square_law() -> ComplexLawSpec {
    let a = 3f64.sqrt();
    // E|z|^3 = a^3 int_{[0,1]^2} (u^2 + v^2)^(3/2)
    let cube = (7.0 * 2f64.sqrt() + 3.0 * 1f64.asinh()) / 20.0;
    ComplexLawSpec::new(
        "uniform-square",
        move |rng| {
            let x = a * (2.0 * uniform01(rng) - 1.0);
            let y = a * (2.0 * uniform01(rng) - 1.0);
            Complex64::new(x, y)
        },
        move |xi| {
            let (s, t) = (sinc_minus_one(a * xi.re), sinc_minus_one(a * xi.im));
            Complex64::new((1.0 + s) * (1.0 + t), 0.0)
        },
        move |xi| {
            let (s, t) = (sinc_minus_one(a * xi.re), sinc_minus_one(a * xi.im));
            Complex64::new(s + t + s * t, 0.0)
        },
        1.0,
        a.powi(3) * cube,
    )
    .expect("valid moments")
}

/// Rotation-invariant Gaussian with `E|z|^2 = 2 beta^2`; `rho^3 = 3 sqrt(pi/2) beta^3`.
pub fn complex_gaussian_law(beta: f64) -> Result<ComplexLawSpec> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput("beta must be positive".into()));
    }
    let b2 = beta * beta;
    ComplexLawSpec::new(
        "complex-gaussian",
        move |rng| {
            let x: f64 = StandardNormal.sample(rng);
            let y: f64 = StandardNormal.sample(rng);
            Complex64::new(beta * x, beta * y)
        },
        move |xi| Complex64::new((-0.5 * b2 * xi.norm_sqr()).exp(), 0.0),
        move |xi| Complex64::new((-0.5 * b2 * xi.norm_sqr()).exp_m1(), 0.0),
        b2,
        3.0 * (PI / 2.0).sqrt() * b2 * beta,
    )
}

type ScalarCoef = Arc<dyn Fn(usize, usize) -> Complex64 + Send + Sync>;
type VectorCoef = Arc<dyn Fn(usize, usize) -> Vec<Complex64> + Send + Sync>;

/// Coefficients `b(j, N)`, `1 <= j <= N`. Stage `N` may be rescaled by any
/// positive factor depending on `N` alone; every reported quantity is
/// scale free (in vector mode `sigma(N)` must carry the same factor).
#[derive(Clone)]
pub enum CoefficientScheme {
    Scalar {
        name: String,
        b: ScalarCoef,
    },
    Vector {
        name: String,
        dim: usize,
        b: VectorCoef,
        sigma: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
        targets: Vec<f64>,
    },
}

impl fmt::Debug for CoefficientScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientScheme::Scalar { name, .. } => write!(f, "Scalar({name})"),
            CoefficientScheme::Vector {
                name, dim, targets, ..
            } => write!(f, "Vector({name}, J={dim}, {targets:?})"),
        }
    }
}

impl CoefficientScheme {
    pub fn scalar<B: Fn(usize, usize) -> Complex64 + Send + Sync + 'static>(
        name: impl Into<String>,
        b: B,
    ) -> Self {
        CoefficientScheme::Scalar {
            name: name.into(),
            b: Arc::new(b),
        }
    }

    pub fn vector<B, S>(
        name: impl Into<String>,
        dim: usize,
        b: B,
        sigma: S,
        targets: Vec<f64>,
    ) -> Result<Self>
    where
        B: Fn(usize, usize) -> Vec<Complex64> + Send + Sync + 'static,
        S: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 || targets.len() != dim || targets.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::InvalidInput("need J >= 1 positive targets".into()));
        }
        Ok(CoefficientScheme::Vector {
            name: name.into(),
            dim,
            b: Arc::new(b),
            sigma: Arc::new(sigma),
            targets,
        })
    }

    /// `b_j = 1`.
    pub fn ones() -> Self {
        Self::scalar("ones", |_, _| Complex64::new(1.0, 0.0))
    }

    /// `b_j = j`.
    pub fn linear() -> Self {
        Self::scalar("linear", |j, _| Complex64::new(j as f64, 0.0))
    }

    /// `b_j = 2^j`, stored as `2^(j - N)`.
    pub fn geometric() -> Self {
        Self::scalar("geometric", |j, n| {
            Complex64::new(2f64.powi(j as i32 - n as i32), 0.0)
        })
    }

    /// `b_j = exp(i omega_j) c_j` for the scalar scheme `c`.
    pub fn twisted<W: Fn(usize) -> f64 + Send + Sync + 'static>(&self, omega: W) -> Self {
        match self {
            CoefficientScheme::Scalar { name, b } => {
                let b = Arc::clone(b);
                Self::scalar(format!("{name}-twisted"), move |j, n| {
                    b(j, n) * Complex64::from_polar(1.0, omega(j))
                })
            }
            CoefficientScheme::Vector {
                name,
                dim,
                b,
                sigma,
                targets,
            } => {
                let b = Arc::clone(b);
                CoefficientScheme::Vector {
                    name: format!("{name}-twisted"),
                    dim: *dim,
                    b: Arc::new(move |j, n| {
                        let p = Complex64::from_polar(1.0, omega(j));
                        b(j, n).into_iter().map(|x| x * p).collect()
                    }),
                    sigma: Arc::clone(sigma),
                    targets: targets.clone(),
                }
            }
        }
    }

    /// Rows `(1, 0)` and `(0, 1)` alternating, `sigma_N = sqrt N`, targets `1/2`.
    pub fn alternating_pair() -> Self {
        Self::vector(
            "alternating",
            2,
            |n, _| {
                if n % 2 == 1 {
                    vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
                } else {
                    vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
                }
            },
            |n| (n as f64).sqrt(),
            vec![0.5, 0.5],
        )
        .expect("valid scheme")
    }

    /// Component count `J` (1 in scalar mode).
    pub fn dim(&self) -> usize {
        match self {
            CoefficientScheme::Scalar { .. } => 1,
            CoefficientScheme::Vector { dim, .. } => *dim,
        }
    }

    /// Rows `b_1 .. b_N` (length-one rows in scalar mode), the normalizer
    /// and the target variances `beta_j`.
    fn stage(&self, n: usize) -> Result<(Vec<Vec<Complex64>>, f64, Vec<f64>)> {
        if n == 0 {
            return Err(Error::InvalidInput("N must be positive".into()));
        }
        let (rows, norm, targets) = match self {
            CoefficientScheme::Scalar { b, .. } => {
                let rows: Vec<Vec<Complex64>> = (1..=n).map(|j| vec![b(j, n)]).collect();
                let s = rows.iter().map(|r| r[0].norm_sqr()).sum::<f64>().sqrt();
                (rows, s, vec![1.0])
            }
            CoefficientScheme::Vector {
                dim,
                b,
                sigma,
                targets,
                ..
            } => {
                let rows: Vec<Vec<Complex64>> = (1..=n).map(|j| b(j, n)).collect();
                if rows.iter().any(|r| r.len() != *dim) {
                    return Err(Error::InvalidInput(
                        "coefficient row of the wrong length".into(),
                    ));
                }
                (rows, sigma(n), targets.clone())
            }
        };
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidInput(
                "coefficients vanish or the normalizer is not positive".into(),
            ));
        }
        Ok((rows, norm, targets))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovStats {
    pub n: usize,
    /// `s_N` or `sigma_N`.
    pub normalizer: f64,
    /// `sum |b_j|^3 / s_N^3`, or `sum_n sum_j |b_nj|^3 / sigma_N^3`.
    pub lyapunov_sum: f64,
    /// `B_N / s_N`, or `D_N / sigma_N` with `D_N = max_n |b_n|_1`.
    pub max_ratio: f64,
    /// Max-entry distance of `sigma_N^-2 sum b_n b_n^*` from `diag(beta_j)`.
    pub matrix_residual: Option<f64>,
}

pub fn lyapunov_normalizer(scheme: &CoefficientScheme, n: usize) -> Result<LyapunovStats> {
    let (rows, norm, targets) = scheme.stage(n)?;
    let lyapunov_sum = rows
        .iter()
        .flatten()
        .map(|b| (b.norm() / norm).powi(3))
        .sum();
    let max_ratio = rows
        .iter()
        .map(|r| r.iter().map(|b| b.norm()).sum::<f64>())
        .fold(0.0, f64::max)
        / norm;
    let matrix_residual = match scheme {
        CoefficientScheme::Scalar { .. } => None,
        CoefficientScheme::Vector { dim, .. } => {
            let mut worst = 0.0f64;
            for j in 0..*dim {
                for l in 0..*dim {
                    let s: Complex64 =
                        rows.iter().map(|r| r[j] * r[l].conj()).sum::<Complex64>() / (norm * norm);
                    let target = if j == l { targets[j] } else { 0.0 };
                    worst = worst.max((s - target).norm());
                }
            }
            Some(worst)
        }
    };
    Ok(LyapunovStats {
        n,
        normalizer: norm,
        lyapunov_sum,
        max_ratio,
        matrix_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub n: usize,
    /// `log phi_N` as a sum of principal logarithms of the factors.
    pub log_phi: (f64, f64),
    /// `beta^2 sum |U_n|^2 / 2`.
    pub quadratic_form: f64,
    /// `|log phi_N + quadratic_form|`.
    pub gap: f64,
    /// `(2/3) rho^3 A^3 * lyapunov_sum`.
    pub bound: f64,
    /// Left side of the admissibility condition; admissible when `< 1`.
    pub admissibility: f64,
    pub admissible: bool,
    /// `|quadratic_form - beta^2 sum beta_j |xi_j|^2 / 2|`.
    pub limit_form_gap: f64,
}

impl GapReport {
    /// The proven inequality, required only when admissible.
    pub fn holds(&self) -> bool {
        !self.admissible || self.gap <= self.bound
    }
}

/// Gap between `log phi_N(xi)` and the Gaussian exponent on the disk
/// (or polydisk) of radius `a`. `xi` has one entry per component.
pub fn gaussian_limit_gap(
    law: &ComplexLawSpec,
    scheme: &CoefficientScheme,
    n: usize,
    xi: &[Complex64],
    a: f64,
) -> Result<GapReport> {
    if xi.len() != scheme.dim() {
        return Err(Error::InvalidInput(
            "xi needs one entry per component".into(),
        ));
    }
    if !(a > 0.0) || xi.iter().any(|x| !(x.norm() <= a)) {
        return Err(Error::InvalidInput(
            "every |xi_j| must lie in [0, A]".into(),
        ));
    }
    let stats = lyapunov_normalizer(scheme, n)?;
    let (rows, norm, targets) = scheme.stage(n)?;
    let (b2, rho) = (law.beta2, law.rho());
    // the proof's admissibility condition, with C_n = |b_n|_1
    let c: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().map(|b| b.norm()).sum::<f64>() / norm)
        .collect();
    let cmax = c.iter().copied().fold(0.0, f64::max);
    let admissibility =
        4.0 * b2 * (a * cmax).powi(2) + 2.0 * c.iter().map(|x| (rho * a * x).powi(3)).sum::<f64>();
    let mut log_phi = Complex64::new(0.0, 0.0);
    let mut sum_u2 = 0.0;
    for r in &rows {
        let u: Complex64 = r
            .iter()
            .zip(xi)
            .map(|(b, x)| b.conj() * x)
            .sum::<Complex64>()
            / norm;
        sum_u2 += u.norm_sqr();
        log_phi += law.log_cf(u)?;
    }
    let quadratic_form = 0.5 * b2 * sum_u2;
    let limit = 0.5
        * b2
        * targets
            .iter()
            .zip(xi)
            .map(|(t, x)| t * x.norm_sqr())
            .sum::<f64>();
    let lyap_c3: f64 = match scheme {
        CoefficientScheme::Scalar { .. } => stats.lyapunov_sum,
        CoefficientScheme::Vector { .. } => c.iter().map(|x| x.powi(3)).sum(),
    };
    Ok(GapReport {
        n,
        log_phi: (log_phi.re, log_phi.im),
        quadratic_form,
        gap: (log_phi + quadratic_form).norm(),
        bound: 2.0 / 3.0 * law.rho3 * a.powi(3) * lyap_c3,
        admissibility,
        admissible: admissibility < 1.0,
        limit_form_gap: (quadratic_form - limit).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub seed: u64,
    pub samples: usize,
}

/// An estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: (f64, f64),
    pub std_error: f64,
}

impl Estimate {
    fn from_samples(xs: &[Complex64]) -> Self {
        let n = xs.len() as f64;
        let mean = ordered_sum(xs) / n;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean).norm_sqr()).collect();
        let var = pairwise_sum(&dev) / (n - 1.0).max(1.0);
        Estimate {
            value: (mean.re, mean.im),
            std_error: (var / n).sqrt(),
        }
    }

    /// `|estimate - target| <= z * std_error + slack`.
    pub fn within(&self, target: Complex64, z: f64, slack: f64) -> bool {
        (Complex64::new(self.value.0, self.value.1) - target).norm() <= z * self.std_error + slack
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn ordered_sum(xs: &[Complex64]) -> Complex64 {
    let re: Vec<f64> = xs.iter().map(|x| x.re).collect();
    let im: Vec<f64> = xs.iter().map(|x| x.im).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// Monte Carlo estimates of `E z`, `E z^2`, `E|z|^2`, `E|z|^3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimates {
    pub mean: Estimate,
    pub analytic_second: Estimate,
    pub abs_second: Estimate,
    pub abs_third: Estimate,
}

pub fn moment_estimates(law: &ComplexLawSpec, mc: MonteCarloConfig) -> Result<MomentEstimates> {
    if mc.samples < 2 {
        return Err(Error::InvalidInput("need at least two draws".into()));
    }
    let z: Vec<Complex64> = (0..mc.samples)
        .into_par_iter()
        .map(|r| law.sample(&mut stream(mc.seed, r as u64)))
        .collect();
    let map = |f: &dyn Fn(Complex64) -> Complex64| {
        Estimate::from_samples(&z.iter().map(|&x| f(x)).collect::<Vec<_>>())
    };
    Ok(MomentEstimates {
        mean: map(&|x| x),
        analytic_second: map(&|x| x * x),
        abs_second: map(&|x| Complex64::new(x.norm_sqr(), 0.0)),
        abs_third: map(&|x| Complex64::new(x.norm().powi(3), 0.0)),
    })
}

/// Kolmogorov distance of the empirical law of sorted `samples` from `cdf`.
pub fn ks_distance<C: Fn(f64) -> f64>(samples: &[f64], cdf: C) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    if samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput(
            "samples must be sorted ascending".into(),
        ));
    }
    let n = samples.len() as f64;
    Ok(samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorStatistic {
    pub n: usize,
    pub samples: usize,
    /// Per component: KS distance of the real part and of the imaginary
    /// part from `N(0, beta_j beta^2)`.
    pub ks: Vec<(f64, f64)>,
    /// `E(w_j conj(w_l))` estimates, row-major `J x J`.
    pub covariance: Vec<Estimate>,
    /// Limit values `2 beta_j beta^2 delta_jl`, row-major.
    pub covariance_target: Vec<f64>,
    /// `E(w_j w_l)` estimates, row-major; the limit is zero.
    pub analytic_covariance: Vec<Estimate>,
    /// Per component: max over the rectangle grid of
    /// `|Pr{Re w_j <= x, Im w_j <= y} - Phi(x/s) Phi(y/s)|`.
    pub rectangle_gap: Vec<f64>,
}

/// Draw `mc.samples` replicas of `T_N`; replica `r` uses stream `r`.
pub fn sample_statistic(
    law: &ComplexLawSpec,
    scheme: &CoefficientScheme,
    n: usize,
    mc: MonteCarloConfig,
) -> Result<Vec<Vec<Complex64>>> {
    let (rows, norm, _) = scheme.stage(n)?;
    let dim = scheme.dim();
    Ok((0..mc.samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(mc.seed, r as u64);
            let mut t = vec![Complex64::new(0.0, 0.0); dim];
            for row in &rows {
                let x = law.sample(&mut rng);
                for (tj, b) in t.iter_mut().zip(row) {
                    *tj += b * x;
                }
            }
            t.into_iter().map(|x| x / norm).collect()
        })
        .collect())
}

/// Monte Carlo comparison of `T_N` with its Gaussian limit. Rectangle
/// probabilities use the grid `grid x grid` per component.
pub fn vector_statistic(
    law: &ComplexLawSpec,
    scheme: &CoefficientScheme,
    n: usize,
    mc: MonteCarloConfig,
    grid: &[f64],
) -> Result<VectorStatistic> {
    if mc.samples < 1000 {
        return Err(Error::InvalidInput(
            "Monte Carlo comparisons need at least 1000 samples".into(),
        ));
    }
    let draws = sample_statistic(law, scheme, n, mc)?;
    let (_, _, targets) = scheme.stage(n)?;
    let dim = scheme.dim();
    let mut ks = Vec::new();
    let mut rectangle_gap = Vec::new();
    for (j, t) in targets.iter().enumerate() {
        let sd = (t * law.beta2).sqrt();
        let cdf = |x: f64| normal_cdf(x / sd);
        let mut re: Vec<f64> = draws.iter().map(|d| d[j].re).collect();
        let mut im: Vec<f64> = draws.iter().map(|d| d[j].im).collect();
        re.sort_by(f64::total_cmp);
        im.sort_by(f64::total_cmp);
        ks.push((ks_distance(&re, cdf)?, ks_distance(&im, cdf)?));
        let m = draws.len() as f64;
        let mut worst = 0.0f64;
        for &x in grid {
            for &y in grid {
                let count = draws
                    .iter()
                    .filter(|d| d[j].re <= x && d[j].im <= y)
                    .count() as f64;
                worst = worst.max((count / m - cdf(x) * cdf(y)).abs());
            }
        }
        rectangle_gap.push(worst);
    }
    let mut covariance = Vec::new();
    let mut analytic_covariance = Vec::new();
    let mut covariance_target = Vec::new();
    for j in 0..dim {
        for l in 0..dim {
            let p: Vec<Complex64> = draws.iter().map(|d| d[j] * d[l].conj()).collect();
            let q: Vec<Complex64> = draws.iter().map(|d| d[j] * d[l]).collect();
            covariance.push(Estimate::from_samples(&p));
            analytic_covariance.push(Estimate::from_samples(&q));
            covariance_target.push(if j == l {
                2.0 * targets[j] * law.beta2
            } else {
                0.0
            });
        }
    }
    Ok(VectorStatistic {
        n,
        samples: mc.samples,
        ks,
        covariance,
        covariance_target,
        analytic_covariance,
        rectangle_gap,
    })
}

/// Real form: `T_N = s_N^-1 sum b_j X_j` with real `b_j` and real draws.
/// Returns the sorted sample and its KS distance from `N(0, beta^2)`.
pub fn real_statistic<S, B>(
    sampler: S,
    beta2: f64,
    b: B,
    n: usize,
    mc: MonteCarloConfig,
) -> Result<(Vec<f64>, f64)>
where
    S: Fn(&mut ChaCha8Rng) -> f64 + Sync,
    B: Fn(usize, usize) -> f64,
{
    if n == 0 || mc.samples == 0 || !(beta2 > 0.0) {
        return Err(Error::InvalidInput(
            "need N >= 1, samples >= 1, beta > 0".into(),
        ));
    }
    let coef: Vec<f64> = (1..=n).map(|j| b(j, n)).collect();
    let s = coef.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidInput("coefficients vanish".into()));
    }
    let mut t: Vec<f64> = (0..mc.samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(mc.seed, r as u64);
            coef.iter().map(|c| c * sampler(&mut rng)).sum::<f64>() / s
        })
        .collect();
    t.sort_by(f64::total_cmp);
    let sd = beta2.sqrt();
    let d = ks_distance(&t, |x| normal_cdf(x / sd))?;
    Ok((t, d))
}

/// The elementary inequalities, each with its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Inequality {
    /// `|e^{it} - sum_{k<=n} (it)^k/k!| <= |t|^{n+1}/(n+1)!`.
    Taylor { n: u32, t: f64 },
    /// Same remainder against `min(|t|^{n+1}/(n+1)!, 2|t|^n/n!)`.
    TaylorMin { n: u32, t: f64 },
    /// `|Log(1+z) - z| <= |z|^2` for `|z| <= 1/2`.
    Log { z: (f64, f64) },
    /// `B_m <= |x|_lambda <= |x|_1 <= m^{1-1/lambda} |x|_lambda <= m B_m`.
    PowerMeans { x: Vec<f64>, lambda: f64 },
    /// `(B_N/s_N)^3 <= sum x^3 / s_N^3 <= B_N/s_N`.
    Lyapunov { x: Vec<f64> },
    /// Taylor remainder `<= 2^{1-w} |t|^{n+w} / (1 (1+w) .. (n+w))`, `0 <= w < 1`.
    TaylorFractional { n: u32, t: f64, omega: f64 },
    /// `1/J <= |w|_inf/|w|_1 <= |w|_lambda/|w|_1 <= 1`.
    NormRatios { w: Vec<(f64, f64)>, lambda: f64 },
    /// `|t|^n exp(-beta |t|^{2/(q-1)} / 2) <= c(n, beta, q)`.
    Decay { n: u32, beta: f64, q: f64, t: f64 },
    /// `c2(k, psi) <= (sum |t_j|^n)^psi / sum |t_j|^{n psi} <= c3(k, psi)`.
    PowerSumRatio { t: Vec<f64>, n: u32, psi: f64 },
}

impl Inequality {
    pub fn id(&self) -> &'static str {
        match self {
            Inequality::Taylor { .. } => "taylor",
            Inequality::TaylorMin { .. } => "taylor-min",
            Inequality::Log { .. } => "log",
            Inequality::PowerMeans { .. } => "power-means",
            Inequality::Lyapunov { .. } => "lyapunov",
            Inequality::TaylorFractional { .. } => "taylor-fractional",
            Inequality::NormRatios { .. } => "norm-ratios",
            Inequality::Decay { .. } => "decay",
            Inequality::PowerSumRatio { .. } => "power-sum-ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub id: String,
    pub holds: bool,
    /// Smallest `right - left` over the links of the chain.
    pub slack: f64,
}

/// `|e^{it} - sum_{k<=n} (it)^k / k!|`, by the tail series when it is
/// well conditioned.
fn taylor_remainder(n: u32, t: f64) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    if t.abs() <= 1.0 + 0.5 * n as f64 {
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..=n + 1 {
            term = term * i * t / k as f64;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut k = n + 1;
        while term.norm() > 1e-18 * sum.norm().max(f64::MIN_POSITIVE) && k < n + 400 {
            sum += term;
            k += 1;
            term = term * i * t / k as f64;
        }
        sum.norm()
    } else {
        let mut term = Complex64::new(1.0, 0.0);
        let mut partial = term;
        for k in 1..=n {
            term = term * i * t / k as f64;
            partial += term;
        }
        (Complex64::from_polar(1.0, t) - partial).norm()
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Chain `a_0 <= a_1 <= ..`; holds when every link holds up to a relative
/// rounding allowance.
fn chain(id: &str, xs: &[f64]) -> InequalityCheck {
    let mut slack = f64::INFINITY;
    let mut holds = true;
    for w in xs.windows(2) {
        let s = w[1] - w[0];
        slack = slack.min(s);
        if s < -1e-13 * (1.0 + w[0].abs().max(w[1].abs())) {
            holds = false;
        }
    }
    InequalityCheck {
        id: id.into(),
        holds,
        slack,
    }
}

/// `max_t |t|^n exp(-beta |t|^{2/(q-1)} / 2)`, attained at
/// `|t|^{2/(q-1)} = n (q-1) / beta`.
pub fn decay_constant(n: u32, beta: f64, q: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let e = n as f64 * (q - 1.0) / 2.0;
    (2.0 * e / (beta * std::f64::consts::E)).powf(e)
}

pub fn inequality_toolbox(ineq: &Inequality) -> Result<InequalityCheck> {
    let id = ineq.id();
    let bad = |m: &str| Err(Error::Domain(format!("{id}: {m}")));
    match ineq {
        Inequality::Taylor { n, t } => {
            if !t.is_finite() {
                return bad("t must be finite");
            }
            let rhs = t.abs().powi(*n as i32 + 1) / factorial(n + 1);
            Ok(chain(id, &[taylor_remainder(*n, *t), rhs]))
        }
        Inequality::TaylorMin { n, t } => {
            if !t.is_finite() {
                return bad("t must be finite");
            }
            let a = t.abs().powi(*n as i32 + 1) / factorial(n + 1);
            let b = 2.0 * t.abs().powi(*n as i32) / factorial(*n);
            Ok(chain(id, &[taylor_remainder(*n, *t), a.min(b)]))
        }
        Inequality::Log { z } => {
            let z = Complex64::new(z.0, z.1);
            if !(z.norm() <= 0.5) {
                return bad("needs |z| <= 1/2");
            }
            Ok(chain(id, &[((1.0 + z).ln() - z).norm(), z.norm_sqr()]))
        }
        Inequality::PowerMeans { x, lambda } => {
            if x.len() < 2
                || x.iter().any(|v| !(*v >= 0.0 && v.is_finite()))
                || !(*lambda >= 1.0 && lambda.is_finite())
            {
                return bad("needs m >= 2 nonnegative x and finite lambda >= 1");
            }
            let m = x.len() as f64;
            let bm = x.iter().copied().fold(0.0, f64::max);
            let nl = x
                .iter()
                .map(|v| v.powf(*lambda))
                .sum::<f64>()
                .powf(1.0 / lambda);
            let n1: f64 = x.iter().sum();
            Ok(chain(
                id,
                &[bm, nl, n1, m.powf(1.0 - 1.0 / lambda) * nl, m * bm],
            ))
        }
        Inequality::Lyapunov { x } => {
            if x.is_empty() || x.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return bad("needs nonnegative x");
            }
            let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if s == 0.0 {
                return bad("needs s_N != 0");
            }
            let r = x.iter().copied().fold(0.0, f64::max) / s;
            let mid = x.iter().map(|v| (v / s).powi(3)).sum::<f64>();
            Ok(chain(id, &[r.powi(3), mid, r]))
        }
        Inequality::TaylorFractional { n, t, omega } => {
            if !t.is_finite() || !(0.0..1.0).contains(omega) {
                return bad("needs finite t and 0 <= omega < 1");
            }
            let den: f64 = (1..=*n).map(|k| k as f64 + omega).product();
            let rhs = 2f64.powf(1.0 - omega) * t.abs().powf(*n as f64 + omega) / den;
            Ok(chain(id, &[taylor_remainder(*n, *t), rhs]))
        }
        Inequality::NormRatios { w, lambda } => {
            if w.is_empty() || !(*lambda >= 1.0 && lambda.is_finite()) {
                return bad("needs J >= 1 and finite lambda >= 1");
            }
            let a: Vec<f64> = w.iter().map(|(x, y)| x.hypot(*y)).collect();
            let n1: f64 = a.iter().sum();
            if n1 == 0.0 {
                return bad("needs w != 0");
            }
            let inf = a.iter().copied().fold(0.0, f64::max);
            let nl = a
                .iter()
                .map(|v| v.powf(*lambda))
                .sum::<f64>()
                .powf(1.0 / lambda);
            Ok(chain(id, &[1.0 / a.len() as f64, inf / n1, nl / n1, 1.0]))
        }
        Inequality::Decay { n, beta, q, t } => {
            if !(*beta > 0.0 && *q >= 3.0 && t.is_finite()) {
                return bad("needs beta > 0, q >= 3, finite t");
            }
            let lhs = t.abs().powi(*n as i32) * (-0.5 * beta * t.abs().powf(2.0 / (q - 1.0))).exp();
            let c = decay_constant(*n, *beta, *q);
            Ok(chain(id, &[0.0, lhs, c]))
        }
        Inequality::PowerSumRatio { t, n, psi } => {
            if t.is_empty() || !(*psi > 0.0 && psi.is_finite()) || t.iter().any(|x| !x.is_finite())
            {
                return bad("needs k >= 1 finite t and psi > 0");
            }
            let x: Vec<f64> = t.iter().map(|v| v.abs().powi(*n as i32)).collect();
            let den: f64 = x.iter().map(|v| v.powf(*psi)).sum();
            if den == 0.0 {
                return bad("needs t != 0");
            }
            let ratio = x.iter().sum::<f64>().powf(*psi) / den;
            let kp = (t.len() as f64).powf(psi - 1.0);
            Ok(chain(id, &[0.0, kp.min(1.0), ratio, kp.max(1.0)]))
        }
    }
}
