//! Commuting idempotents acting on functions of `v in R^k`:
//!
//! * `D_j f = (f(v) - f(v with v_j -> -v_j)) / 2`
//! * `E_j = I - D_j`
//! * `P_j f = f(v with v_j -> 0)`
//! * `Delta_j = I - P_j`
//!
//! with `I = P_j + D_j + E_j Delta_j`, the integral factorizations of
//! `D_1..D_m`, `Delta_1..Delta_m` and `prod E_j Delta_j`, and the derivative
//! bounds that follow from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpKind {
    D,
    E,
    P,
    Delta,
}

/// One operator acting on coordinate `j` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Op {
    pub kind: OpKind,
    pub j: usize,
}

impl Op {
    pub fn d(j: usize) -> Self {
        Op { kind: OpKind::D, j }
    }
    pub fn e(j: usize) -> Self {
        Op { kind: OpKind::E, j }
    }
    pub fn p(j: usize) -> Self {
        Op { kind: OpKind::P, j }
    }
    pub fn delta(j: usize) -> Self {
        Op {
            kind: OpKind::Delta,
            j,
        }
    }
}

/// Evaluate `(W f)(v)` for a word `W`. The operators commute, so the word
/// is applied left to right.
pub fn apply_operator<F>(word: &[Op], f: &F, v: &[f64]) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + ?Sized,
{
    let Some((op, rest)) = word.split_first() else {
        return f(v);
    };
    let mut w = v.to_vec();
    let j = op.j;
    match op.kind {
        OpKind::D | OpKind::E => {
            let a = apply_operator(rest, f, &w);
            w[j] = -w[j];
            let b = apply_operator(rest, f, &w);
            if op.kind == OpKind::D {
                (a - b) * 0.5
            } else {
                (a + b) * 0.5
            }
        }
        OpKind::P => {
            w[j] = 0.0;
            apply_operator(rest, f, &w)
        }
        OpKind::Delta => {
            let a = apply_operator(rest, f, &w);
            w[j] = 0.0;
            a - apply_operator(rest, f, &w)
        }
    }
}

/// Central-difference partial derivative with `orders[j] in {0, 1, 2}`
/// along each coordinate, fourth-order stencils.
pub(crate) fn partial<F>(f: &F, v: &[f64], orders: &[u8], h: f64) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + ?Sized,
{
    const D1: [(f64, f64); 4] = [
        (-2.0, 1.0 / 12.0),
        (-1.0, -8.0 / 12.0),
        (1.0, 8.0 / 12.0),
        (2.0, -1.0 / 12.0),
    ];
    const D2: [(f64, f64); 5] = [
        (-2.0, -1.0 / 12.0),
        (-1.0, 16.0 / 12.0),
        (0.0, -30.0 / 12.0),
        (1.0, 16.0 / 12.0),
        (2.0, -1.0 / 12.0),
    ];
    let active: Vec<(usize, &[(f64, f64)])> = orders
        .iter()
        .enumerate()
        .filter(|(_, o)| **o > 0)
        .map(|(j, o)| (j, if *o == 1 { &D1[..] } else { &D2[..] }))
        .collect();
    let scale: f64 = orders.iter().map(|&o| h.powi(o as i32)).product();
    let mut idx = vec![0usize; active.len()];
    let mut total = Complex64::new(0.0, 0.0);
    let mut w = v.to_vec();
    loop {
        let mut weight = 1.0;
        for (a, (j, st)) in active.iter().enumerate() {
            let (off, c) = st[idx[a]];
            w[*j] = v[*j] + off * h;
            weight *= c;
        }
        total += f(&w) * weight;
        let mut a = 0;
        loop {
            if a == active.len() {
                return total / scale;
            }
            idx[a] += 1;
            if idx[a] < active[a].1.len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

fn fd_step(total_order: u32) -> f64 {
    f64::EPSILON.powf(1.0 / (total_order as f64 + 4.0))
}

/// Which factorization to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factorization {
    /// `D_1..D_m f = 2^-m (prod v) int_{[-1,1]^m} d^m f(v o u) du`.
    Mixed,
    /// `Delta_1..Delta_m f = (prod v) int_{[0,1]^m} d^m f(t o v) dt`.
    Delta,
    /// `prod E_j Delta_j f = prod(v_j^2/2) int_{[-1,1]^m} prod(1-|x_j|) d^{2m} f(x o v) dx`.
    EDelta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub which: Factorization,
    pub m: usize,
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub residual: f64,
    pub quad_error: f64,
    /// Estimated finite-difference error, zero for analytic derivatives.
    pub fd_error: f64,
}

fn tensor_rule(m: usize, order: usize, lo: f64) -> Vec<(Vec<f64>, f64)> {
    let (x, w) = gauss_legendre(order);
    // panels [lo, 0] (if lo < 0) and [0, 1]
    let mut one_d = Vec::new();
    let panels: Vec<(f64, f64)> = if lo < 0.0 {
        vec![(lo, 0.0), (0.0, 1.0)]
    } else {
        vec![(0.0, 1.0)]
    };
    for (a, b) in panels {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (xi, wi) in x.iter().zip(&w) {
            one_d.push((c + h * xi, h * wi));
        }
    }
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * one_d.len());
        for (p, wp) in &out {
            for (x, wx) in &one_d {
                let mut q = p.clone();
                q.push(*x);
                next.push((q, wp * wx));
            }
        }
        out = next;
    }
    out
}

/// `|LHS - RHS|` for one of the factorizations, acting on the first `m`
/// coordinates of `v`. `deriv` is the required partial (`d_1..d_m f` or
/// `d_1^2..d_m^2 f`); when absent it is taken by finite differences and the
/// call fails with [`Error::Inconclusive`] if their noise dominates.
pub fn factorization_residual<F>(
    f: &F,
    deriv: Option<&(dyn Fn(&[f64]) -> Complex64 + Sync)>,
    m: usize,
    which: Factorization,
    v: &[f64],
) -> Result<FactorizationReport>
where
    F: Fn(&[f64]) -> Complex64 + ?Sized,
{
    if m == 0 || m > v.len() || m > 3 {
        return Err(Error::InvalidInput(
            "factorization needs 1 <= m <= min(3, dim)".into(),
        ));
    }
    let word: Vec<Op> = match which {
        Factorization::Mixed => (0..m).map(Op::d).collect(),
        Factorization::Delta => (0..m).map(Op::delta).collect(),
        Factorization::EDelta => (0..m).flat_map(|j| [Op::e(j), Op::delta(j)]).collect(),
    };
    let lhs = apply_operator(&word, f, v);
    let order: u8 = if which == Factorization::EDelta { 2 } else { 1 };
    let mut orders = vec![0u8; v.len()];
    orders[..m].iter_mut().for_each(|o| *o = order);
    let h = fd_step(order as u32 * m as u32);
    let d_at = |p: &[f64], step: f64| -> Complex64 {
        match deriv {
            Some(d) => d(p),
            None => partial(f, p, &orders, step),
        }
    };
    let lo = if which == Factorization::Delta {
        0.0
    } else {
        -1.0
    };
    let weight_of = |x: &[f64]| -> f64 {
        match which {
            Factorization::EDelta => x.iter().map(|t| 1.0 - t.abs()).product(),
            _ => 1.0,
        }
    };
    let prefactor: f64 = match which {
        Factorization::Mixed => v[..m].iter().map(|x| 0.5 * x).product(),
        Factorization::Delta => v[..m].iter().product(),
        Factorization::EDelta => v[..m].iter().map(|x| 0.5 * x * x).product(),
    };
    let integrate = |ord: usize, step: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = v.to_vec();
        for (x, w) in tensor_rule(m, ord, lo) {
            for j in 0..m {
                p[j] = x[j] * v[j];
            }
            acc += d_at(&p, step) * (w * weight_of(&x));
        }
        acc * prefactor
    };
    let fine = integrate(16, h);
    let coarse = integrate(8, h);
    let fd_error = if deriv.is_some() {
        0.0
    } else {
        (integrate(16, 2.0 * h) - fine).norm()
    };
    let quad_error = (fine - coarse).norm();
    if deriv.is_none() && fd_error > 1e-6 * (1.0 + fine.norm()) {
        return Err(Error::Inconclusive(format!(
            "finite-difference noise {fd_error:.2e} dominates the factorization residual"
        )));
    }
    Ok(FactorizationReport {
        which,
        m,
        lhs: (lhs.re, lhs.im),
        rhs: (fine.re, fine.im),
        residual: (lhs - fine).norm(),
        quad_error,
        fd_error,
    })
}

/// Which derivative inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    /// `|D_1..D_m f| <= prod_{j<=l} |v_j|^{h/l} (prod M_sigma)^{1/C(l,h)}`.
    Eq24,
    /// `Delta_1..Delta_n D_{n+1}..D_m` with factor `2^{m-h}`.
    Eq26,
    /// `prod_{j<=n} E_j Delta_j prod_{j>n} D_j` with first partials.
    Eq27,
    /// As `Eq27` with second partials on `j <= n` and `|v_j|^2`.
    Eq28,
}

/// Parameters of a derivative inequality (1-based counts as in the
/// statement; coordinates are 0-based internally).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeSpec {
    pub which: Which,
    pub h: usize,
    pub ell: usize,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub lhs: f64,
    /// Right side with grid-estimated sups (a lower estimate of the true
    /// right side).
    pub rhs: f64,
    /// Right side with every sup inflated by the safety factor.
    pub rhs_inflated: f64,
    pub slack: f64,
    pub holds: bool,
    pub inconclusive: bool,
}

const SAFETY: f64 = 1.5;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |c, j| c * (n - j) as f64 / (j + 1) as f64)
}

fn subsets(pool: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if pool.len() < size {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &x) in pool.iter().enumerate() {
        for mut rest in subsets(&pool[i + 1..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Sup of `g` over `[-1,1]^dims` on grids of `9, 17, 33, ..` points per
/// axis, stopping when successive values agree to 10%.
pub(crate) fn grid_sup<G: FnMut(&[f64]) -> f64>(dims: usize, mut g: G) -> Result<f64> {
    if dims == 0 {
        return Ok(g(&[]));
    }
    let mut prev = f64::NAN;
    let max_points = if dims == 1 {
        257
    } else if dims == 2 {
        65
    } else {
        17
    };
    let mut n = 9usize;
    while n <= max_points {
        let axis: Vec<f64> = (0..n)
            .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
            .collect();
        let mut best = 0.0f64;
        let mut idx = vec![0usize; dims];
        let mut u = vec![0.0; dims];
        'outer: loop {
            for d in 0..dims {
                u[d] = axis[idx[d]];
            }
            best = best.max(g(&u));
            let mut d = 0;
            loop {
                if d == dims {
                    break 'outer;
                }
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
        if prev.is_finite() && (best - prev).abs() <= 0.1 * best.max(1e-300) {
            return Ok(best);
        }
        prev = best;
        n = 2 * n - 1;
    }
    Err(Error::Inconclusive("grid sup did not stabilize".into()))
}

/// Check one of the derivative inequalities at `v`. The sups are estimated
/// on refining grids; "holds" is conclusive because grid sups underestimate
/// the true right side, and the verdict is "inconclusive" when the left side
/// lies between the estimated and the inflated right side.
pub fn derivative_bound_check<F>(f: &F, spec: DerivativeSpec, v: &[f64]) -> Result<DerivativeCheck>
where
    F: Fn(&[f64]) -> Complex64 + ?Sized,
{
    let DerivativeSpec {
        which,
        h,
        ell,
        n,
        m,
        delta,
    } = spec;
    if m == 0 || m > v.len() {
        return Err(Error::InvalidInput("need 1 <= m <= dim".into()));
    }
    let (pool, big_l): (Vec<usize>, usize) = match which {
        Which::Eq24 => {
            if ell == 0 || ell > m || h > ell {
                return Err(Error::InvalidInput(
                    "the product bound needs 0 <= h <= l <= m, l >= 1".into(),
                ));
            }
            ((0..ell).collect(), ell)
        }
        _ => {
            if n == 0 || n > m || ell == 0 || ell > n || delta > m - n || h > ell + delta {
                return Err(Error::InvalidInput(
                    "need 1 <= l <= n <= m, 0 <= delta <= m - n, 0 <= h <= l + delta".into(),
                ));
            }
            ((0..ell).chain(n..n + delta).collect(), ell + delta)
        }
    };
    let word: Vec<Op> = match which {
        Which::Eq24 => (0..m).map(Op::d).collect(),
        Which::Eq26 => (0..n).map(Op::delta).chain((n..m).map(Op::d)).collect(),
        Which::Eq27 | Which::Eq28 => (0..n)
            .flat_map(|j| [Op::e(j), Op::delta(j)])
            .chain((n..m).map(Op::d))
            .collect(),
    };
    let lhs = apply_operator(&word, f, v).norm();

    // sign patterns for the coordinates outside sigma
    let eps_choices = |beta: usize| -> Vec<f64> {
        if which != Which::Eq24 && beta < n {
            vec![-1.0, 0.0, 1.0]
        } else {
            vec![-1.0, 1.0]
        }
    };
    let sup_for = |sigma: &[usize]| -> Result<f64> {
        let others: Vec<usize> = (0..m).filter(|b| !sigma.contains(b)).collect();
        let choices: Vec<Vec<f64>> = others.iter().map(|&b| eps_choices(b)).collect();
        let mut orders = vec![0u8; v.len()];
        for &g in sigma {
            orders[g] = if which == Which::Eq28 && g < n { 2 } else { 1 };
        }
        let total_order: u32 = orders.iter().map(|&o| o as u32).sum();
        let step = fd_step(total_order).max(1e-4);
        let mut best = 0.0f64;
        let mut idx = vec![0usize; others.len()];
        loop {
            let mut base = v.to_vec();
            for (a, &b) in others.iter().enumerate() {
                base[b] = choices[a][idx[a]] * v[b];
            }
            let s = grid_sup(sigma.len(), |u| {
                let mut p = base.clone();
                for (a, &g) in sigma.iter().enumerate() {
                    p[g] = u[a] * v[g];
                }
                if total_order == 0 {
                    f(&p).norm()
                } else {
                    partial(f, &p, &orders, step).norm()
                }
            })?;
            best = best.max(s);
            let mut a = 0;
            loop {
                if a == others.len() {
                    return Ok(best);
                }
                idx[a] += 1;
                if idx[a] < choices[a].len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    };

    let lead = match which {
        Which::Eq24 => 1.0,
        _ => 2f64.powi((m - h) as i32),
    };
    let (rhs, rhs_inflated) = if h == 0 {
        let s = sup_for(&[])?;
        (lead * s, lead * s)
    } else {
        let sigmas = subsets(&pool, h);
        let count = binom(big_l, h);
        let mut log_prod = 0.0;
        for s in &sigmas {
            log_prod += sup_for(s)?.ln();
        }
        let vprod: f64 = pool
            .iter()
            .map(|&j| {
                if which == Which::Eq28 && j < n {
                    v[j].abs().powi(2)
                } else {
                    v[j].abs()
                }
            })
            .product();
        let base = lead * vprod.powf(h as f64 / big_l as f64) * (log_prod / count).exp();
        (base, base * SAFETY)
    };
    let tol = 1e-12 * (1.0 + lhs);
    let holds = lhs <= rhs + tol;
    let inconclusive = !holds && lhs <= rhs_inflated + tol;
    Ok(DerivativeCheck {
        lhs,
        rhs,
        rhs_inflated,
        slack: rhs - lhs,
        holds,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cc(v: &[f64]) -> Complex64 {
        Complex64::new(v[0].cos() * v[1].cos(), 0.0)
    }

    fn trig(v: &[f64]) -> Complex64 {
        let a = Complex64::new(
            0.0,
            0.7 * v[0] - 1.3 * v[1] + 0.4 * v.get(2).unwrap_or(&0.0),
        )
        .exp();
        let b = Complex64::new(0.0, 2.1 * v[0] + 0.2 * v[1]).exp() * Complex64::new(0.3, -0.8);
        a + b + v[0] * v[1] * v[1]
    }

    #[test]
    fn idempotents_and_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            for j in 0..3 {
                let f = |w: &[f64]| trig(w);
                let base = apply_operator(&[], &f, &v);
                let ops = [Op::d(j), Op::e(j), Op::p(j), Op::delta(j)];
                for o in ops {
                    let once = apply_operator(&[o], &f, &v);
                    let twice = apply_operator(&[o, o], &f, &v);
                    assert!((once - twice).norm() < 1e-12);
                }
                let z = |w: &[Op]| apply_operator(w, &f, &v);
                assert!(z(&[Op::d(j), Op::e(j)]).norm() < 1e-12);
                assert!(z(&[Op::d(j), Op::p(j)]).norm() < 1e-12);
                assert!((z(&[Op::d(j), Op::delta(j)]) - z(&[Op::d(j)])).norm() < 1e-12);
                assert!((z(&[Op::e(j), Op::p(j)]) - z(&[Op::p(j)])).norm() < 1e-12);
                assert!(z(&[Op::p(j), Op::delta(j)]).norm() < 1e-12);
                let sum = z(&[Op::p(j)]) + z(&[Op::d(j)]) + z(&[Op::e(j), Op::delta(j)]);
                assert!((sum - base).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn d_kills_even_functions() {
        let f = |w: &[f64]| Complex64::new(w[0].cos() + w[1] * w[1], 0.0);
        assert!(apply_operator(&[Op::d(0)], &f, &[0.8, 1.1]).norm() < 1e-15);
        let lin = |w: &[f64]| Complex64::new(2.0 + 3.0 * w[0], 0.0);
        let r = apply_operator(&[Op::d(0)], &lin, &[0.4]);
        assert!((r.re - 1.2).abs() < 1e-15);
    }

    #[test]
    fn mixed_factorization_analytic() {
        let d = |w: &[f64]| Complex64::new(w[0].sin() * w[1].sin(), 0.0);
        let r =
            factorization_residual(&cc, Some(&d), 2, Factorization::Mixed, &[0.7, -0.3]).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
    }

    #[test]
    fn delta_and_edelta_factorizations() {
        let d = |w: &[f64]| Complex64::new(w[0].sin() * w[1].sin(), 0.0);
        let r =
            factorization_residual(&cc, Some(&d), 2, Factorization::Delta, &[1.2, 0.9]).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        let d4 = |w: &[f64]| Complex64::new(w[0].cos() * w[1].cos(), 0.0);
        let r =
            factorization_residual(&cc, Some(&d4), 2, Factorization::EDelta, &[1.2, 0.9]).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        let r = factorization_residual(&cc, None, 2, Factorization::Mixed, &[0.7, -0.3]).unwrap();
        assert!(r.residual < 1e-7, "{r:?}");
    }

    #[test]
    fn constants_are_annihilated() {
        let one = |_: &[f64]| Complex64::new(1.0, 0.0);
        let zero = |_: &[f64]| Complex64::new(0.0, 0.0);
        for which in [Factorization::Mixed, Factorization::Delta] {
            let r = factorization_residual(&one, Some(&zero), 1, which, &[0.5]).unwrap();
            assert_eq!(r.lhs, (0.0, 0.0));
            assert_eq!(r.rhs, (0.0, 0.0));
        }
    }

    #[test]
    fn sine_bound_slack() {
        let f = |w: &[f64]| Complex64::new(w[0].sin(), 0.0);
        let spec = DerivativeSpec {
            which: Which::Eq24,
            h: 1,
            ell: 1,
            n: 0,
            m: 1,
            delta: 0,
        };
        let v = 1.3;
        let c = derivative_bound_check(&f, spec, &[v]).unwrap();
        assert!(c.holds);
        assert!((c.slack - (v - v.sin())).abs() < 1e-8, "{c:?}");
    }

    #[test]
    fn eq27_and_eq28_hold() {
        let v = [0.5, 2.0];
        for which in [Which::Eq26, Which::Eq27, Which::Eq28] {
            for (h, delta) in [(1, 0), (1, 1), (2, 1), (0, 1)] {
                let spec = DerivativeSpec {
                    which,
                    h,
                    ell: 1,
                    n: 1,
                    m: 2,
                    delta,
                };
                let c = derivative_bound_check(&trig, spec, &v).unwrap();
                assert!(c.holds, "{which:?} h={h} delta={delta}: {c:?}");
            }
        }
        let spec = DerivativeSpec {
            which: Which::Eq27,
            h: 1,
            ell: 1,
            n: 1,
            m: 2,
            delta: 0,
        };
        let c = derivative_bound_check(&cc, spec, &v).unwrap();
        assert!(c.holds && c.slack > 0.0);
    }
}
