//! Special functions: Bernoulli numbers, odd zeta values, trigamma, the
//! normal law, the sine integral and the Bessel function `J0`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact Bernoulli numbers `B_0 .. B_n` (convention `B_1 = -1/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliTable {
    pub exact: Vec<BigRational>,
    pub values: Vec<f64>,
}

impl BernoulliTable {
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Bernoulli numbers from the recurrence `sum_{j<=m} C(m+1, j) B_j = 0`.
pub fn bernoulli_numbers(n: usize) -> Result<BernoulliTable> {
    if n < 2 {
        return Err(Error::InvalidInput("bernoulli_numbers needs n >= 2".into()));
    }
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // binomial coefficients C(m+1, j) built incrementally
        let mut c = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(c.clone()) * bj;
            c = c * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    let values = b.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
    Ok(BernoulliTable { exact: b, values })
}

/// Bernoulli numbers up to `B_64`, built once.
pub fn bernoulli_cached() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| bernoulli_numbers(64).expect("n >= 2"))
}

/// Riemann zeta at an integer `s >= 2`, by direct summation with an
/// Euler-Maclaurin tail.
pub fn zeta_int(s: u32) -> f64 {
    assert!(s >= 2, "zeta_int needs s >= 2");
    let n = 12usize;
    let sf = s as f64;
    let mut sum = 0.0;
    for k in (1..n).rev() {
        sum += (k as f64).powf(-sf);
    }
    let nf = n as f64;
    let mut tail = nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powf(-sf);
    let bern = bernoulli_cached();
    // rising factorial s (s+1) ... (s+2k-2) / (2k)!
    let mut coef = sf;
    let mut fact = 2.0;
    for k in 1..=12usize {
        let term = bern.get(2 * k) / fact * coef * nf.powf(-sf - 2.0 * k as f64 + 1.0);
        tail += term;
        coef *= (sf + 2.0 * k as f64 - 1.0) * (sf + 2.0 * k as f64);
        fact *= (2 * k + 1) as f64 * (2 * k + 2) as f64;
    }
    sum + tail
}

/// `zeta(3), zeta(5), ..., zeta(2 m_max + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OddZetaTable {
    pub values: Vec<f64>,
}

impl OddZetaTable {
    pub fn new(m_max: usize) -> Self {
        Self {
            values: (1..=m_max).map(|m| zeta_int(2 * m as u32 + 1)).collect(),
        }
    }

    /// `zeta(2m + 1)` for `m >= 1`.
    pub fn get(&self, m: usize) -> f64 {
        self.values[m - 1]
    }
}

pub fn odd_zeta_cached() -> &'static OddZetaTable {
    static TABLE: OnceLock<OddZetaTable> = OnceLock::new();
    TABLE.get_or_init(|| OddZetaTable::new(40))
}

/// Trigamma with an explicit bound on the truncation of the asymptotic
/// series. `pairs` Bernoulli terms are used once the argument has been
/// shifted past `crossover`.
pub fn trigamma_with_bound(x: f64, crossover: f64, pairs: usize) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("trigamma needs x > 0, got {x}")));
    }
    let bern = bernoulli_cached();
    if 2 * pairs + 2 >= bern.len() {
        return Err(Error::InvalidInput("too many asymptotic pairs".into()));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < crossover {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv * inv2;
    for k in 1..=pairs {
        series += bern.get(2 * k) * p;
        p *= inv2;
    }
    let value = shift + inv + 0.5 * inv2 + series;
    let bound = 2.0 * bern.get(2 * pairs + 2).abs() * p;
    Ok((value, bound))
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Sine integral `Si(x) = int_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.abs() <= 8.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0usize;
        loop {
            n += 1;
            let k = (2 * n) as f64;
            term *= -x2 / (k * (k + 1.0));
            let add = term / (k + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    let tail = crate::quad::integrate(
        |t: f64| t.sin() / t,
        8.0f64.copysign(x),
        x,
        &[],
        crate::quad::QuadOptions::abs(1e-14),
    )
    .map(|q| q.value)
    .unwrap_or(f64::NAN);
    sine_integral(8.0f64.copysign(x)) + tail
}

/// `J0(r)` by the periodic trapezoid rule on `(1/2pi) int exp(i r cos t) dt`,
/// with the node-doubling difference as error estimate.
pub fn bessel_j0(r: f64, nodes: usize) -> (f64, f64) {
    let rule = |n: usize| -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            let c = (2.0 * PI * j as f64 / n as f64).cos();
            s += (r * c).cos();
        }
        s / n as f64
    };
    let a = rule(nodes);
    let b = rule(2 * nodes);
    (b, (a - b).abs())
}

/// `J0(r) - 1` evaluated without cancellation, via `cos u - 1 = -2 sin^2(u/2)`.
pub fn bessel_j0_minus_one(r: f64, nodes: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..nodes {
        let c = (2.0 * PI * j as f64 / nodes as f64).cos();
        let h = (0.5 * r * c).sin();
        s -= 2.0 * h * h;
    }
    s / nodes as f64
}

/// Binomial(n, p) probabilities, computed in log space.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let lp = p.ln();
    let lq = (1.0 - p).ln();
    (0..=n)
        .map(|k| {
            (statrs::function::factorial::ln_binomial(n, k) + k as f64 * lp + (n - k) as f64 * lq)
                .exp()
        })
        .collect()
}
