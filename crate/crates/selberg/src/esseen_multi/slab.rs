//! Slab norms and the slab form of the smoothing bound.
//!
//! For `C` a set of coordinates and a threshold `tau`, `C_b(v)` holds the
//! `j in C` with `|v_j| >= tau` and `C_s(v)` the rest. The norms maximize
//! `|f|` over sign flips of the `C_b` coordinates when `C_s` is empty, and
//! otherwise the first partials `|d_j f|`, `j in C_s`, over boxes in the
//! `C_s` coordinates: `|xi_j| <= |v_j|` for the bar norm and
//! `|xi_j| <= tau` for the double-bar norm.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::NodeSet;

use super::bounds::{
    axis_nodes, check_pair, tensor_integrate, BoundVariant, MultiBoundReport, PartitionTerm,
};
use super::operators::{grid_sup, partial};
use super::{LawK, MultiConfig, PartitionP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlabFlavor {
    Bar,
    DoubleBar,
}

/// Safety factor applied to sups over continua estimated on grids.
pub const SUP_SAFETY: f64 = 1.5;

fn sup_partials<F>(f: &F, c_s: &[usize], c_b: &[usize], v: &[f64], radii: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> Complex64 + ?Sized,
{
    let h = f64::EPSILON.powf(0.2);
    let mut best = 0.0f64;
    for mask in 0..(1usize << c_b.len()) {
        let mut base = v.to_vec();
        for (a, &j) in c_b.iter().enumerate() {
            if mask & (1 << a) != 0 {
                base[j] = -v[j];
            }
        }
        let s = grid_sup(c_s.len(), |u| {
            let mut p = base.clone();
            for (a, &j) in c_s.iter().enumerate() {
                p[j] = u[a] * radii[a];
            }
            let mut m = 0.0f64;
            for &j in c_s {
                let mut orders = vec![0u8; v.len()];
                orders[j] = 1;
                m = m.max(partial(f, &p, &orders, h).norm());
            }
            m
        })?;
        best = best.max(s);
    }
    Ok(best)
}

/// `|f|_C(v)` or `||f||_C(v)`. Sups over continua are grid estimates times
/// [`SUP_SAFETY`]; the double-bar grid includes the bar grid so that the
/// ordering `bar <= double bar` is preserved.
pub fn slab_norm<F>(f: &F, c_set: &[usize], v: &[f64], tau: f64, flavor: SlabFlavor) -> Result<f64>
where
    F: Fn(&[f64]) -> Complex64 + ?Sized,
{
    if !(tau > 0.0) {
        return Err(Error::InvalidInput("tau must be positive".into()));
    }
    if c_set.iter().any(|&j| j >= v.len()) {
        return Err(Error::InvalidInput(
            "C contains an index outside the point".into(),
        ));
    }
    let c_b: Vec<usize> = c_set
        .iter()
        .copied()
        .filter(|&j| v[j].abs() >= tau)
        .collect();
    let c_s: Vec<usize> = c_set
        .iter()
        .copied()
        .filter(|&j| v[j].abs() < tau)
        .collect();
    if c_s.is_empty() {
        let mut best = 0.0f64;
        let mut w = v.to_vec();
        for mask in 0..(1usize << c_b.len()) {
            for (a, &j) in c_b.iter().enumerate() {
                w[j] = if mask & (1 << a) != 0 { -v[j] } else { v[j] };
            }
            best = best.max(f(&w).norm());
        }
        return Ok(best);
    }
    let bar_radii: Vec<f64> = c_s.iter().map(|&j| v[j].abs()).collect();
    let bar = sup_partials(f, &c_s, &c_b, v, &bar_radii)?;
    let s = match flavor {
        SlabFlavor::Bar => bar,
        SlabFlavor::DoubleBar => bar.max(sup_partials(f, &c_s, &c_b, v, &vec![tau; c_s.len()])?),
    };
    Ok(SUP_SAFETY * s)
}

/// `t`-free slab bound,
///
/// `c1_hat sum_P int ||phi - psi||_C / prod_C |v^_j| prod_D 1/W_j dv + c2 sum m_l / W_l`
///
/// with `1/|v^| = min(1, 1/|v|)`, for `k <= 2` and every `W_j > 1`. The
/// laws must have a first absolute moment (any declared exponent `>= 1`).
pub fn esseen_bound_slab(
    f: &LawK,
    g: &LawK,
    omegas: &[f64],
    cfg: &MultiConfig,
) -> Result<MultiBoundReport> {
    let m = check_pair(f, g, omegas, 2)?;
    let k = f.k;
    if omegas.iter().any(|w| *w <= 1.0) {
        return Err(Error::InvalidInput(
            "slab bound needs every omega > 1".into(),
        ));
    }
    for mo in [f.moment, g.moment].into_iter().flatten() {
        if mo.alpha < 1.0 {
            return Err(Error::InvalidInput(
                "slab bound needs a first absolute moment".into(),
            ));
        }
    }
    let tau = cfg.tau;
    let h = LawK::diff_fn(f, g);
    let mut terms = Vec::new();
    let (mut integral, mut err) = (0.0, 0.0);
    for p in PartitionP::all(k) {
        let free = p.free();
        let axes: Vec<NodeSet> = free
            .iter()
            .map(|&j| axis_nodes(omegas[j], cfg.slab_panels, &[tau]))
            .collect();
        let cache: Mutex<HashMap<(Vec<bool>, Vec<u64>), f64>> = Mutex::new(HashMap::new());
        let failure: Mutex<Option<Error>> = Mutex::new(None);
        let integrand = |u: &[f64]| -> f64 {
            let mut v = vec![0.0; k];
            for (a, &j) in free.iter().enumerate() {
                v[j] = u[a];
            }
            let small: Vec<bool> = p.c_set.iter().map(|&j| v[j].abs() < tau).collect();
            let norm = if small.iter().any(|&s| s) {
                // the double-bar sup no longer depends on the small coordinates
                let key_vals: Vec<u64> = (0..k)
                    .filter(|j| !p.c_set.iter().zip(&small).any(|(c, s)| c == j && *s))
                    .map(|j| v[j].to_bits())
                    .collect();
                let key = (small.clone(), key_vals);
                let hit = cache.lock().expect("cache lock").get(&key).copied();
                match hit {
                    Some(x) => x,
                    None => match slab_norm(&h, &p.c_set, &v, tau, SlabFlavor::DoubleBar) {
                        Ok(x) => {
                            cache.lock().expect("cache lock").insert(key, x);
                            x
                        }
                        Err(e) => {
                            *failure.lock().expect("failure lock") = Some(e);
                            0.0
                        }
                    },
                }
            } else {
                match slab_norm(&h, &p.c_set, &v, tau, SlabFlavor::DoubleBar) {
                    Ok(x) => x,
                    Err(e) => {
                        *failure.lock().expect("failure lock") = Some(e);
                        0.0
                    }
                }
            };
            let mut w = norm;
            for &j in &p.c_set {
                w *= (1.0 / v[j].abs()).min(1.0);
            }
            for &j in &p.d_set {
                w /= omegas[j];
            }
            w
        };
        let (val, e) = tensor_integrate(&axes, &integrand);
        if let Some(e) = failure.into_inner().expect("failure lock") {
            return Err(e);
        }
        integral += val;
        err += e;
        terms.push(PartitionTerm {
            partition: p.to_string(),
            value: val,
            error: e,
        });
    }
    let c = cfg.constants;
    let tail_term = c.c2 * m.iter().zip(omegas).map(|(a, w)| a / w).sum::<f64>();
    Ok(MultiBoundReport {
        variant: BoundVariant::Slab,
        k,
        omegas: omegas.to_vec(),
        t: None,
        delta: None,
        constants: vec![("c1_hat".into(), c.c1_hat), ("c2".into(), c.c2)],
        terms,
        integral,
        integral_error: err,
        tail_term,
        truncation_term: 0.0,
        total: c.c1_hat * (integral + err) + tail_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(v: &[f64]) -> Complex64 {
        Complex64::new(0.0, 0.9 * v[0] - 0.4 * v[1]).exp() * (1.0 + 0.3 * v[0] * v[1])
            - (-v[1] * v[1]).exp()
    }

    #[test]
    fn empty_c_is_abs() {
        let v = [0.3, 1.7];
        for fl in [SlabFlavor::Bar, SlabFlavor::DoubleBar] {
            assert_eq!(slab_norm(&f, &[], &v, 1.0, fl).unwrap(), f(&v).norm());
        }
    }

    #[test]
    fn bar_below_double_bar() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let v = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            for c in [vec![0], vec![1], vec![0, 1]] {
                let a = slab_norm(&f, &c, &v, 1.0, SlabFlavor::Bar).unwrap();
                let b = slab_norm(&f, &c, &v, 1.0, SlabFlavor::DoubleBar).unwrap();
                assert!(a <= b, "{a} > {b} at {v:?}");
            }
        }
    }

    #[test]
    fn even_function_collapses_flips() {
        let e = |v: &[f64]| Complex64::new((v[0] * v[1]).cos() + v[0] * v[0], 0.0);
        let v = [1.5, -2.5];
        let n = slab_norm(&e, &[0, 1], &v, 1.0, SlabFlavor::Bar).unwrap();
        assert_eq!(n, e(&[1.5, 2.5]).norm());
    }

    #[test]
    fn identical_laws_give_tail_only() {
        let g = LawK::standard_normal(2).unwrap();
        let cfg = MultiConfig::new(2).unwrap();
        let r = esseen_bound_slab(&g, &g, &[3.0, 3.0], &cfg).unwrap();
        assert_eq!(r.integral, 0.0);
        assert!((r.total - r.tail_term).abs() < 1e-15);
    }
}
