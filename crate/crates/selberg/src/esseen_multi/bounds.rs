//! Partition-sum smoothing bound and its truncated variants.
//!
//! For a partition `B | C | D` of the coordinates the plain bound integrates
//!
//! `|D_C (phi - psi)| prod_C 1/|v_j| prod_D (1/W_j + |sin(t_j v_j)|/|v_j|)`
//!
//! over the `C` and `D` coordinates with the `B` coordinates set to zero
//! (the Dirac convention). `D_C (phi - psi)` is odd in every `C` variable,
//! so the quotient is bounded and tensor Gauss nodes, which never touch the
//! hyperplanes `v_j = 0`, integrate it without any exclusion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{symmetric_nodes, NodeSet, PanelSpec};

use super::{LawK, MultiConfig, PartitionP};

/// Which inequality a report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundVariant {
    Plain,
    TruncatedA,
    TruncatedB,
    Slab,
}

/// How the factors `1/|v_j|` are tamed near zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// `1/|v.| = min(Delta, 1/|v|)`.
    Bullet,
    /// The larger `Delta/|v^| = Delta min(1, 1/|v|)`.
    Triangle,
}

/// Cut-off `Delta > 1` and the transform applied to the frequency weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationMap {
    pub delta: f64,
    pub transform: Transform,
}

impl TruncationMap {
    pub fn variant_a(delta: f64) -> Self {
        Self {
            delta,
            transform: Transform::Bullet,
        }
    }

    /// Box variant with side lengths at most `d`: `Delta = 1 + d`.
    pub fn variant_b(d: f64) -> Self {
        Self {
            delta: 1.0 + d,
            transform: Transform::Bullet,
        }
    }

    pub fn with_transform(mut self, t: Transform) -> Self {
        self.transform = t;
        self
    }

    /// The weight replacing `1/|v|`.
    pub fn weight(&self, v: f64) -> f64 {
        let a = v.abs();
        match self.transform {
            Transform::Bullet => {
                if a * self.delta <= 1.0 {
                    self.delta
                } else {
                    1.0 / a
                }
            }
            Transform::Triangle => self.delta * if a <= 1.0 { 1.0 } else { 1.0 / a },
        }
    }

    fn kink(&self) -> f64 {
        match self.transform {
            Transform::Bullet => 1.0 / self.delta,
            Transform::Triangle => 1.0,
        }
    }
}

/// Variant of the truncated inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TruncatedMode {
    /// Uniform in `t`.
    A,
    /// Measure of the box `(a, b]`.
    B { a: Vec<f64>, b: Vec<f64> },
}

/// One partition's contribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionTerm {
    pub partition: String,
    pub value: f64,
    pub error: f64,
}

/// A computed bound with its pieces and the constants used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiBoundReport {
    pub variant: BoundVariant,
    pub k: usize,
    pub omegas: Vec<f64>,
    pub t: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub constants: Vec<(String, f64)>,
    pub terms: Vec<PartitionTerm>,
    pub integral: f64,
    pub integral_error: f64,
    /// `c sum m_l / W_l`.
    pub tail_term: f64,
    pub truncation_term: f64,
    pub total: f64,
}

/// Sum of `f` over the tensor grid of `axes`, with a second pass on the
/// half-order rules for an error estimate. The first axis is split across
/// threads and partial sums are added in a fixed order.
pub(crate) fn tensor_integrate<F>(axes: &[NodeSet], f: &F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if axes.is_empty() {
        return (f(&[]), 0.0);
    }
    let fine: Vec<Vec<(f64, f64)>> = axes
        .iter()
        .map(|a| {
            a.nodes
                .iter()
                .copied()
                .zip(a.weights.iter().copied())
                .collect()
        })
        .collect();
    let coarse: Vec<Vec<(f64, f64)>> = axes.iter().map(|a| a.coarse.clone()).collect();
    let hi = grid_sum(&fine, f);
    let lo = grid_sum(&coarse, f);
    (hi, (hi - lo).abs())
}

fn grid_sum<F>(axes: &[Vec<(f64, f64)>], f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dims = axes.len();
    let partial: Vec<f64> = axes[0]
        .par_iter()
        .map(|&(x0, w0)| {
            let mut p = vec![0.0; dims];
            p[0] = x0;
            if dims == 1 {
                return w0 * f(&p);
            }
            let mut idx = vec![0usize; dims - 1];
            let mut acc = 0.0;
            loop {
                let mut w = w0;
                for d in 1..dims {
                    let (x, wx) = axes[d][idx[d - 1]];
                    p[d] = x;
                    w *= wx;
                }
                acc += w * f(&p);
                let mut d = 0;
                loop {
                    if d == dims - 1 {
                        return acc;
                    }
                    idx[d] += 1;
                    if idx[d] < axes[d + 1].len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
            }
        })
        .collect();
    partial.iter().sum()
}

/// `D_C h(v) = 2^-|C| sum_{s in {+-1}^C} (prod s) h(s o v)`.
pub(crate) fn d_c<H>(h: &H, c_set: &[usize], v: &[f64]) -> Complex64
where
    H: Fn(&[f64]) -> Complex64 + ?Sized,
{
    let mut w = v.to_vec();
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 0..(1usize << c_set.len()) {
        let mut sign = 1.0;
        for (a, &j) in c_set.iter().enumerate() {
            if mask & (1 << a) != 0 {
                w[j] = -v[j];
                sign = -sign;
            } else {
                w[j] = v[j];
            }
        }
        total += h(&w) * sign;
    }
    total / (1u64 << c_set.len()) as f64
}

pub(crate) fn check_pair(f: &LawK, g: &LawK, omegas: &[f64], k_max: usize) -> Result<Vec<f64>> {
    let k = f.k;
    if g.k != k || omegas.len() != k {
        return Err(Error::InvalidInput(
            "dimension mismatch between laws and omegas".into(),
        ));
    }
    if k == 0 || k > k_max {
        return Err(Error::InvalidInput(format!(
            "dimension must be 1..={k_max}"
        )));
    }
    if omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidInput("omegas must be positive".into()));
    }
    if f.moment.is_none() || g.moment.is_none() {
        return Err(Error::InvalidInput("both laws need a moment record".into()));
    }
    let m = g
        .marginal_bounds
        .clone()
        .ok_or_else(|| Error::InvalidInput("comparison law needs marginal bounds".into()))?;
    if m.len() != k || m.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput(
            "marginal bounds must be k finite nonnegative reals".into(),
        ));
    }
    Ok(m)
}

pub(crate) fn axis_nodes(omega: f64, spec: PanelSpec, extra: &[f64]) -> NodeSet {
    symmetric_nodes(omega, spec, extra)
}

fn sine_breaks(t: f64, omega: f64) -> Vec<f64> {
    if t == 0.0 {
        return vec![];
    }
    let step = PI / t.abs();
    let count = (omega / step).floor() as usize;
    if count > 400 {
        return vec![];
    }
    (1..=count).map(|i| i as f64 * step).collect()
}

fn tail(m: &[f64], omegas: &[f64]) -> f64 {
    m.iter().zip(omegas).map(|(a, w)| a / w).sum()
}

/// Plain bound for `|F(t) - G(t)|`, `k <= 3`.
pub fn esseen_bound_k(
    f: &LawK,
    g: &LawK,
    omegas: &[f64],
    t: &[f64],
    cfg: &MultiConfig,
) -> Result<MultiBoundReport> {
    let m = check_pair(f, g, omegas, 3)?;
    let k = f.k;
    if t.len() != k {
        return Err(Error::InvalidInput("t has the wrong dimension".into()));
    }
    let h = LawK::diff_fn(f, g);
    let mut terms = Vec::new();
    let (mut integral, mut err) = (0.0, 0.0);
    for p in PartitionP::all(k) {
        let free = p.free();
        let axes: Vec<NodeSet> = free
            .iter()
            .map(|&j| {
                let extra = if p.d_set.contains(&j) {
                    sine_breaks(t[j], omegas[j])
                } else {
                    vec![]
                };
                axis_nodes(omegas[j], cfg.panels, &extra)
            })
            .collect();
        let integrand = |u: &[f64]| -> f64 {
            let mut v = vec![0.0; k];
            for (a, &j) in free.iter().enumerate() {
                v[j] = u[a];
            }
            let mut w = d_c(&h, &p.c_set, &v).norm();
            for &j in &p.c_set {
                w /= v[j].abs();
            }
            for &j in &p.d_set {
                w *= 1.0 / omegas[j] + (t[j] * v[j]).sin().abs() / v[j].abs();
            }
            w
        };
        let (val, e) = tensor_integrate(&axes, &integrand);
        integral += val;
        err += e;
        terms.push(PartitionTerm {
            partition: p.to_string(),
            value: val,
            error: e,
        });
    }
    let c = cfg.constants;
    let tail_term = c.c2 * tail(&m, omegas);
    Ok(MultiBoundReport {
        variant: BoundVariant::Plain,
        k,
        omegas: omegas.to_vec(),
        t: Some(t.to_vec()),
        delta: None,
        constants: vec![("c1".into(), c.c1), ("c2".into(), c.c2)],
        terms,
        integral,
        integral_error: err,
        tail_term,
        truncation_term: 0.0,
        total: c.c1 * (integral + err) + tail_term,
    })
}

/// `(alpha, E(max|x|)^alpha for F + same for |g|)` at the common exponent.
pub(crate) fn joint_moment(f: &LawK, g: &LawK) -> (f64, f64) {
    let (mf, mg) = (f.moment.expect("checked"), g.moment.expect("checked"));
    let alpha = mf.alpha.min(mg.alpha);
    (
        alpha,
        mf.value.powf(alpha / mf.alpha) + mg.value.powf(alpha / mg.alpha),
    )
}

/// `t`-free truncated bounds: variant A bounds `sup_t |F(t) - G(t)|`,
/// variant B bounds `|F{(a,b]} - G{(a,b]}|` for boxes with sides at most
/// `Delta - 1`.
pub fn esseen_bound_truncated(
    f: &LawK,
    g: &LawK,
    omegas: &[f64],
    trunc: &TruncationMap,
    mode: &TruncatedMode,
    cfg: &MultiConfig,
) -> Result<MultiBoundReport> {
    let m = check_pair(f, g, omegas, 3)?;
    let k = f.k;
    if omegas.iter().any(|w| *w <= 1.0) {
        return Err(Error::InvalidInput(
            "truncated bounds need every omega > 1".into(),
        ));
    }
    if !(trunc.delta > 1.0 && trunc.delta.is_finite()) {
        return Err(Error::InvalidInput("Delta must exceed 1".into()));
    }
    if let TruncatedMode::B { a, b } = mode {
        if a.len() != k || b.len() != k {
            return Err(Error::InvalidInput(
                "box corners have the wrong dimension".into(),
            ));
        }
        let d = trunc.delta - 1.0;
        for (x, y) in a.iter().zip(b) {
            if !(y - x >= 0.0 && y - x <= d * (1.0 + 1e-12)) {
                return Err(Error::InvalidInput(format!(
                    "box sides must lie in [0, {d}]"
                )));
            }
        }
    }
    let h = LawK::diff_fn(f, g);
    let axes: Vec<NodeSet> = omegas
        .iter()
        .map(|&w| axis_nodes(w, cfg.panels, &[trunc.kink()]))
        .collect();
    let integrand = |v: &[f64]| -> f64 {
        let w: f64 = v.iter().map(|&x| trunc.weight(x)).product();
        (h(v)).norm() * w
    };
    let (integral, err) = tensor_integrate(&axes, &integrand);
    let c = cfg.constants;
    let (variant, cint, ctail, trunc_term) = match mode {
        TruncatedMode::A => {
            let (alpha, mom) = joint_moment(f, g);
            (
                BoundVariant::TruncatedA,
                ("c5", c.c5),
                ("c6", c.c6),
                (k as f64 + 1.0) * trunc.delta.powf(-alpha) * mom,
            )
        }
        TruncatedMode::B { .. } => (BoundVariant::TruncatedB, ("c8", c.c8), ("c9", c.c9), 0.0),
    };
    let tail_term = ctail.1 * tail(&m, omegas);
    Ok(MultiBoundReport {
        variant,
        k,
        omegas: omegas.to_vec(),
        t: None,
        delta: Some(trunc.delta),
        constants: vec![(cint.0.into(), cint.1), (ctail.0.into(), ctail.1)],
        terms: vec![PartitionTerm {
            partition: "full".into(),
            value: integral,
            error: err,
        }],
        integral,
        integral_error: err,
        tail_term,
        truncation_term: trunc_term,
        total: cint.1 * (integral + err) + tail_term + trunc_term,
    })
}

/// `(|F(t) - F(t*)|, k Delta^-alpha E(max|x|)^alpha)` with `t*` the clamp of
/// `t` to `[-Delta, Delta]^k`.
pub fn truncation_check(f: &LawK, t: &[f64], delta: f64) -> Result<(f64, f64)> {
    let mo = f
        .moment
        .ok_or_else(|| Error::InvalidInput("law needs a moment record".into()))?;
    if t.len() != f.k || !(delta > 0.0) {
        return Err(Error::InvalidInput("bad point or cut-off".into()));
    }
    let ts: Vec<f64> = t.iter().map(|x| x.clamp(-delta, delta)).collect();
    let lhs = (f.cdf(t) - f.cdf(&ts)).abs();
    Ok((lhs, f.k as f64 * delta.powf(-mo.alpha) * mo.value))
}

/// Compare the integral of `f` against narrow Gaussians `delta_eps(v_j)`
/// for `j in b_set` with the integral of the zero-section over the other
/// coordinates. Returns `(collapsed, smeared, |difference|)`.
pub fn dirac_collapse_check<F>(
    f: &F,
    omegas: &[f64],
    b_set: &[usize],
    eps: f64,
) -> Result<(f64, f64, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let k = omegas.len();
    if b_set.iter().any(|&j| j >= k) || !(eps > 0.0) {
        return Err(Error::InvalidInput("bad collapse set or width".into()));
    }
    let spec = PanelSpec::default();
    let free: Vec<usize> = (0..k).filter(|j| !b_set.contains(j)).collect();
    let axes: Vec<NodeSet> = free
        .iter()
        .map(|&j| axis_nodes(omegas[j], spec, &[]))
        .collect();
    let collapsed = tensor_integrate(&axes, &|u: &[f64]| {
        let mut v = vec![0.0; k];
        for (a, &j) in free.iter().enumerate() {
            v[j] = u[a];
        }
        f(&v)
    })
    .0;
    let narrow = PanelSpec {
        width: eps,
        order: 12,
        dyadic_levels: 0,
    };
    let all: Vec<NodeSet> = (0..k)
        .map(|j| {
            if b_set.contains(&j) {
                axis_nodes(10.0 * eps, narrow, &[])
            } else {
                axis_nodes(omegas[j], spec, &[])
            }
        })
        .collect();
    let norm = 1.0 / (eps * (2.0 * PI).sqrt());
    let smeared = tensor_integrate(&all, &|v: &[f64]| {
        let mut w = f(v);
        for &j in b_set {
            w *= norm * (-0.5 * (v[j] / eps).powi(2)).exp();
        }
        w
    })
    .0;
    Ok((collapsed, smeared, (collapsed - smeared).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::esseen1d::{esseen_bound_1d, Distribution1D, EsseenConfig};
    use crate::quad::{integrate, QuadOptions};

    #[test]
    fn weights_and_dominance() {
        let tm = TruncationMap::variant_a(10.0);
        let tri = tm.with_transform(Transform::Triangle);
        for &v in &[0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 40.0] {
            assert!(tm.weight(v) <= tri.weight(v) + 1e-15);
            assert!(tm.weight(v) <= 10.0);
        }
        assert_eq!(tm.weight(0.0), 10.0);
        assert_eq!(TruncationMap::variant_b(2.0).delta, 3.0);
    }

    #[test]
    fn identical_laws_reduce_to_tail() {
        let g = LawK::standard_normal(2).unwrap();
        let cfg = MultiConfig::new(2).unwrap();
        let r = esseen_bound_k(&g, &g, &[4.0, 4.0], &[0.3, -0.2], &cfg).unwrap();
        assert_eq!(r.integral, 0.0);
        let m = 1.0 / (2.0 * PI).sqrt();
        assert!((r.total - cfg.constants.c2 * 2.0 * m / 4.0).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_structure() {
        let f = Distribution1D::binomial_standardized(25, 0.3).unwrap();
        let n = Distribution1D::normal(0.0, 1.0);
        let fk = LawK::product(vec![f.clone()]).unwrap();
        let gk = LawK::product(vec![n.clone()]).unwrap();
        let cfg = MultiConfig::new(1).unwrap();
        let r = esseen_bound_k(&fk, &gk, &[8.0], &[0.0], &cfg).unwrap();
        let one = esseen_bound_1d(&f, &n, 8.0, &EsseenConfig::default()).unwrap();
        assert!((r.tail_term - one.tail_term).abs() < 1e-12);
        // C-term against an adaptive one-dimensional oracle
        let odd = |z: f64| ((f.cf(z) - n.cf(z)) - (f.cf(-z) - n.cf(-z))).norm() / z;
        let q = integrate(
            odd,
            0.0,
            8.0,
            &[0.5, 1.0, 2.0, 4.0],
            QuadOptions::abs(1e-12),
        )
        .unwrap();
        let c_term = r
            .terms
            .iter()
            .find(|t| t.partition == "B{} C{1} D{}")
            .unwrap();
        assert!(c_term.value > 0.0);
        assert!(
            (c_term.value - q.value).abs() < 1e-7,
            "{} vs {}",
            c_term.value,
            q.value
        );
        let b_term = r
            .terms
            .iter()
            .find(|t| t.partition == "B{1} C{} D{}")
            .unwrap();
        assert_eq!(b_term.value, 0.0);
    }

    #[test]
    fn dirac_collapse() {
        let f = |v: &[f64]| (-(v[0] * v[0]) - 0.5 * v[1] * v[1]).exp() * (1.0 + v[0]);
        let (c, s, r) = dirac_collapse_check(&f, &[6.0, 6.0], &[0], 1e-3).unwrap();
        assert!(r < 1e-5 * c.abs(), "{c} {s}");
    }

    #[test]
    fn truncation_inequality_binomial() {
        let b = LawK::binomial_product(2, 16, 0.5).unwrap();
        for t in [[3.0, 0.5], [-4.0, 2.5], [2.2, -2.2]] {
            let (lhs, rhs) = truncation_check(&b, &t, 2.0).unwrap();
            assert!(lhs <= rhs, "{lhs} > {rhs}");
        }
    }
}
