//! Quadrature: Gauss-Legendre rules, adaptive Gauss-Kronrod (7, 15) and
//! panelled tensor grids.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod (7, 15) panel: Kronrod value and |Kronrod - Gauss|.
pub fn gk15<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).magnitude())
}

/// Result of a quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_segments: 4000,
        }
    }
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }
}

/// Globally adaptive Gauss-Kronrod quadrature over `[a, b]`, first split at
/// the supplied interior `breaks` (points of reduced smoothness).
pub fn integrate<T: Scalar, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<Quadrature<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(
            "integration limits must be finite".into(),
        ));
    }
    if a == b {
        return Ok(Quadrature {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    let mut evals = 0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        evals += 15;
        total = total + v;
        err += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    while err > opts.abs_tol.max(opts.rel_tol * total.magnitude()) {
        if heap.len() >= opts.max_segments {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature".into(),
                achieved: err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature".into(),
                achieved: err,
            });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evals += 30;
        total = total - worst.value + v1 + v2;
        err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Recompute from the leaves so rounding in the running sum does not drift.
    let mut value = T::zero();
    let mut error = 0.0;
    let mut leaves: Vec<Segment<T>> = heap.into_vec();
    leaves.sort_by(|x, y| x.a.total_cmp(&y.a));
    for s in &leaves {
        value = value + s.value;
        error += s.error;
    }
    Ok(Quadrature {
        value: value * sign,
        error,
        evaluations: evals,
    })
}

/// Fixed one-dimensional node set built from Gauss-Legendre panels.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Nodes and weights of a half-order rule on the same panels, used for
    /// an error estimate.
    pub coarse: Vec<(f64, f64)>,
}

/// Panel layout for tensor quadrature on `[-omega, omega]`.
#[derive(Debug, Clone, Copy)]
pub struct PanelSpec {
    pub width: f64,
    pub order: usize,
    /// Number of dyadic panels `[2^-j, 2^-j+1]` inserted between 0 and the
    /// first regular panel on each side.
    pub dyadic_levels: usize,
}

impl Default for PanelSpec {
    fn default() -> Self {
        Self {
            width: 0.5,
            order: 10,
            dyadic_levels: 8,
        }
    }
}

fn panel_edges_positive(omega: f64, spec: PanelSpec, extra: &[f64]) -> Vec<f64> {
    let mut edges = vec![0.0];
    let first = spec.width.min(omega);
    for j in (1..=spec.dyadic_levels).rev() {
        let e = first * 0.5f64.powi(j as i32);
        edges.push(e);
    }
    let n = (omega / spec.width).ceil().max(1.0) as usize;
    for i in 1..=n {
        edges.push((omega * i as f64 / n as f64).min(omega));
    }
    for &x in extra {
        if x > 0.0 && x < omega {
            edges.push(x);
        }
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    edges
}

/// Symmetric node set on `[-omega, omega]`, graded toward zero, with extra
/// panel breaks at `+-extra`.
pub fn symmetric_nodes(omega: f64, spec: PanelSpec, extra: &[f64]) -> NodeSet {
    let (x, w) = gauss_legendre(spec.order);
    let low = spec.order / 2;
    let (xl, wl) = gauss_legendre(low.max(1));
    let edges = panel_edges_positive(omega, spec, extra);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut coarse = Vec::new();
    for side in [-1.0, 1.0] {
        for e in edges.windows(2) {
            let (a, b) = (e[0], e[1]);
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(side * (c + h * xi));
                weights.push(h * wi);
            }
            for (xi, wi) in xl.iter().zip(&wl) {
                coarse.push((side * (c + h * xi), h * wi));
            }
        }
    }
    NodeSet {
        nodes,
        weights,
        coarse,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_order_rule_has_center_node() {
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_smooth_and_breaks() {
        let q = integrate(
            |x: f64| x.sin(),
            0.0,
            std::f64::consts::PI,
            &[],
            QuadOptions::default(),
        )
        .unwrap();
        assert!((q.value - 2.0).abs() < 1e-13);
        let q = integrate(|x: f64| x.abs(), -1.0, 2.0, &[0.0], QuadOptions::default()).unwrap();
        assert!((q.value - 2.5).abs() < 1e-13);
    }

    #[test]
    fn adaptive_reverses_orientation() {
        let q = integrate(|x: f64| x, 1.0, 0.0, &[], QuadOptions::default()).unwrap();
        assert!((q.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn complex_integrand() {
        let q = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            &[],
            QuadOptions::default(),
        )
        .unwrap();
        assert!((q.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn symmetric_nodes_cover_box() {
        let ns = symmetric_nodes(3.0, PanelSpec::default(), &[1.0]);
        let total: f64 = ns.weights.iter().sum();
        assert!((total - 6.0).abs() < 1e-12);
        let q: f64 = ns
            .nodes
            .iter()
            .zip(&ns.weights)
            .map(|(x, w)| w * x * x)
            .sum();
        assert!((q - 18.0).abs() < 1e-11);
        assert!(ns.nodes.iter().all(|x| *x != 0.0));
    }
}
