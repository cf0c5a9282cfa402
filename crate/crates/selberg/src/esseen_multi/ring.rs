//! Symbolic expansion of
//!
//! `(1-k) g_1..g_k + sum_j g_1..f_j..g_k = chi_1..chi_k - S`,
//! `g_1..g_k = chi_1..chi_k + S~`
//!
//! with `f_j = chi_j - delta_j` and `g_j = chi_j + eps_j`, in the
//! commutative ring generated by the symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Chi,
    Eps,
    Delta,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Symbol::Chi => "chi",
            Symbol::Eps => "eps",
            Symbol::Delta => "delta",
        };
        f.write_str(s)
    }
}

/// `omega_1 .. omega_k` with a positive multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub symbols: Vec<Symbol>,
    pub multiplicity: u64,
}

impl Monomial {
    /// Indices carrying `eps` or `delta`.
    pub fn active(&self) -> Vec<usize> {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| **s != Symbol::Chi)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn eval<T: RingValue>(&self, chi: &[T], delta: &[T], eps: &[T]) -> T {
        let mut acc = T::from_count(self.multiplicity);
        for (j, s) in self.symbols.iter().enumerate() {
            let x = match s {
                Symbol::Chi => chi[j].clone(),
                Symbol::Eps => eps[j].clone(),
                Symbol::Delta => delta[j].clone(),
            };
            acc = acc * x;
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplicity != 1 {
            write!(f, "{} ", self.multiplicity)?;
        }
        let parts: Vec<String> = self
            .symbols
            .iter()
            .enumerate()
            .map(|(j, s)| format!("{s}{}", j + 1))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Values the identity can be evaluated in.
pub trait RingValue:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Zero + One
{
    fn from_count(n: u64) -> Self {
        (0..n).fold(Self::zero(), |a, _| a + Self::one())
    }
}

impl RingValue for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }
}

impl RingValue for BigRational {}

type Poly = BTreeMap<Vec<Symbol>, i64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = ma.clone();
            m.extend_from_slice(mb);
            *out.entry(m).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn poly_add(a: &mut Poly, b: &Poly, scale: i64) {
    for (m, c) in b {
        *a.entry(m.clone()).or_insert(0) += scale * c;
    }
    a.retain(|_, c| *c != 0);
}

fn linear(terms: &[(Symbol, i64)]) -> Poly {
    terms.iter().map(|(s, c)| (vec![*s], *c)).collect()
}

fn product(factors: &[Poly]) -> Poly {
    let mut acc: Poly = [(Vec::new(), 1)].into_iter().collect();
    for f in factors {
        acc = poly_mul(&acc, f);
    }
    acc
}

/// Result of the expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingExpansion {
    pub k: usize,
    /// Signed monomials of the left-hand side.
    pub lhs: Vec<(Vec<Symbol>, i64)>,
    pub s: Vec<Monomial>,
    pub s_tilde: Vec<Monomial>,
}

fn to_monomials(p: &Poly) -> Result<Vec<Monomial>> {
    p.iter()
        .map(|(m, c)| {
            if *c <= 0 {
                Err(Error::Domain(format!(
                    "non-positive multiplicity {c} in the expansion"
                )))
            } else {
                Ok(Monomial {
                    symbols: m.clone(),
                    multiplicity: *c as u64,
                })
            }
        })
        .collect()
}

pub(crate) fn expand(k: usize) -> Result<RingExpansion> {
    let f = linear(&[(Symbol::Chi, 1), (Symbol::Delta, -1)]);
    let g = linear(&[(Symbol::Chi, 1), (Symbol::Eps, 1)]);
    let all_g = product(&vec![g.clone(); k]);
    let mut lhs = Poly::new();
    poly_add(&mut lhs, &all_g, 1 - k as i64);
    for j in 0..k {
        let factors: Vec<Poly> = (0..k)
            .map(|i| if i == j { f.clone() } else { g.clone() })
            .collect();
        poly_add(&mut lhs, &product(&factors), 1);
    }
    let chis: Poly = [(vec![Symbol::Chi; k], 1)].into_iter().collect();
    let mut s = chis.clone();
    poly_add(&mut s, &lhs, -1);
    let mut st = all_g;
    poly_add(&mut st, &chis, -1);
    Ok(RingExpansion {
        k,
        lhs: lhs.into_iter().collect(),
        s: to_monomials(&s)?,
        s_tilde: to_monomials(&st)?,
    })
}

/// Expand the left-hand side and return `S` and `S~`, `2 <= k <= 6`.
pub fn selberg_ring_expansion(k: usize) -> Result<RingExpansion> {
    if !(2..=6).contains(&k) {
        return Err(Error::InvalidInput(
            "ring expansion supported for 2 <= k <= 6".into(),
        ));
    }
    expand(k)
}

impl RingExpansion {
    /// `(1-k) prod g + sum_j f_j prod_{i != j} g_i` evaluated directly from
    /// the definitions of `f_j` and `g_j`.
    pub fn lhs_direct<T: RingValue>(&self, chi: &[T], delta: &[T], eps: &[T]) -> T {
        let k = self.k;
        let g: Vec<T> = (0..k).map(|j| chi[j].clone() + eps[j].clone()).collect();
        let f: Vec<T> = (0..k).map(|j| chi[j].clone() - delta[j].clone()).collect();
        let prod_g = g.iter().cloned().fold(T::one(), |a, b| a * b);
        let mut total = T::zero() - T::from_count(k as u64 - 1) * prod_g;
        for j in 0..k {
            let mut term = f[j].clone();
            for (i, gi) in g.iter().enumerate() {
                if i != j {
                    term = term * gi.clone();
                }
            }
            total = total + term;
        }
        total
    }

    /// `lhs - (prod chi - S)` with the left side computed directly.
    pub fn residual<T: RingValue>(&self, chi: &[T], delta: &[T], eps: &[T]) -> T {
        let prod_chi = chi.iter().cloned().fold(T::one(), |a, b| a * b);
        let s = self
            .s
            .iter()
            .fold(T::zero(), |a, m| a + m.eval(chi, delta, eps));
        self.lhs_direct(chi, delta, eps) - (prod_chi - s)
    }

    /// `prod g - (prod chi + S~)`.
    pub fn residual_tilde<T: RingValue>(&self, chi: &[T], eps: &[T]) -> T {
        let prod_g = (0..self.k).fold(T::one(), |a, j| a * (chi[j].clone() + eps[j].clone()));
        let prod_chi = chi.iter().cloned().fold(T::one(), |a, b| a * b);
        let zeros = vec![T::zero(); self.k];
        let st = self
            .s_tilde
            .iter()
            .fold(T::zero(), |a, m| a + m.eval(chi, &zeros, eps));
        prod_g - (prod_chi + st)
    }
}

/// Greedy least-loaded charging of each monomial to one of its active
/// indices. Returns `max_tau n_tau` (monomials counted with multiplicity)
/// and `max_tau sum 2^(c-1)` (`c` the number of active symbols), each
/// maximized over the two expansions.
pub(crate) fn charge_counts(k: usize) -> (f64, f64) {
    let e = expand(k).expect("expansion of a valid k");
    let mut worst_n = 0.0f64;
    let mut worst_w = 0.0f64;
    for set in [&e.s, &e.s_tilde] {
        for weighted in [false, true] {
            let mut items: Vec<&Monomial> = set.iter().collect();
            items.sort_by_key(|m| m.active().len());
            let mut load = vec![0.0f64; k];
            for m in items {
                let act = m.active();
                let w = if weighted {
                    2f64.powi(act.len() as i32 - 1)
                } else {
                    1.0
                } * m.multiplicity as f64;
                let mut best = act[0];
                for &j in &act {
                    if load[j] < load[best] {
                        best = j;
                    }
                }
                load[best] += w;
            }
            let mx = load.iter().copied().fold(0.0, f64::max);
            if weighted {
                worst_w = worst_w.max(mx);
            } else {
                worst_n = worst_n.max(mx);
            }
        }
    }
    (worst_n, worst_w)
}
