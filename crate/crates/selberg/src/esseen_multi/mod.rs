//! Smoothing inequalities in `k` variables.
//!
//! The pieces are the ring expansion behind the multivariate majorant
//! construction ([`ring`]), the commuting difference operators
//! `D_j, E_j, P_j, Delta_j` ([`operators`]), the partition-sum bound and
//! its two truncated variants ([`bounds`]), the slab variant ([`slab`]) and
//! a convergence harness ([`harness`]).
//!
//! All bounds are stated in the frequency variable `v` of
//! `phi(v) = E exp(i v.x)`, integrate over the box `prod [-W_j, W_j]` and
//! echo the constants they were computed with.

pub mod bounds;
pub mod harness;
pub mod operators;
pub mod ring;
pub mod slab;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esseen1d::{Distribution1D, Moment};
use crate::kernels;
use crate::quad::PanelSpec;
use crate::special::{normal_cdf, normal_pdf};

pub use bounds::{
    dirac_collapse_check, esseen_bound_k, esseen_bound_truncated, truncation_check, BoundVariant,
    MultiBoundReport, PartitionTerm, Transform, TruncatedMode, TruncationMap,
};
pub use harness::{convergence_harness_k, sup_distance_k, HarnessRowK, HarnessVariant};
pub use operators::{
    apply_operator, derivative_bound_check, factorization_residual, DerivativeCheck,
    DerivativeSpec, Factorization, FactorizationReport, Op, OpKind, Which,
};
pub use ring::{selberg_ring_expansion, Monomial, RingExpansion, Symbol};
pub use slab::{esseen_bound_slab, slab_norm, SlabFlavor};

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type PointCf = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Disjoint cover `B | C | D` of `{0, .., k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionP {
    pub b_set: Vec<usize>,
    pub c_set: Vec<usize>,
    pub d_set: Vec<usize>,
}

impl PartitionP {
    /// All `3^k` partitions, ordered by the base-3 code of the labels.
    pub fn all(k: usize) -> Vec<PartitionP> {
        let total = 3usize.pow(k as u32);
        (0..total)
            .map(|mut code| {
                let mut p = PartitionP {
                    b_set: vec![],
                    c_set: vec![],
                    d_set: vec![],
                };
                for j in 0..k {
                    match code % 3 {
                        0 => p.b_set.push(j),
                        1 => p.c_set.push(j),
                        _ => p.d_set.push(j),
                    }
                    code /= 3;
                }
                p
            })
            .collect()
    }

    pub fn is_cover(&self, k: usize) -> bool {
        let mut seen = vec![0u8; k];
        for &j in self.b_set.iter().chain(&self.c_set).chain(&self.d_set) {
            if j >= k {
                return false;
            }
            seen[j] += 1;
        }
        seen.iter().all(|&s| s == 1)
    }

    /// Coordinates that are integrated over, in increasing order.
    pub fn free(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self.c_set.iter().chain(&self.d_set).copied().collect();
        f.sort_unstable();
        f
    }
}

impl fmt::Display for PartitionP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &[usize]| {
            s.iter()
                .map(|j| (j + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "B{{{}}} C{{{}}} D{{{}}}",
            show(&self.b_set),
            show(&self.c_set),
            show(&self.d_set)
        )
    }
}

/// A law (or signed comparison measure) on `R^k`: CDF, characteristic
/// function, the marginal density bounds `m_l` and a moment record for
/// `int (max_j |x_j|)^alpha`.
#[derive(Clone)]
pub struct LawK {
    pub name: String,
    pub k: usize,
    cdf: PointFn,
    cf: PointCf,
    density: Option<PointFn>,
    pub marginal_bounds: Option<Vec<f64>>,
    pub moment: Option<Moment>,
    /// Present for product laws; enables one-sided limits at jumps.
    pub marginals: Option<Vec<Distribution1D>>,
}

/// The comparison side `G` of the multivariate inequalities.
pub type SignedMeasureK = LawK;

impl fmt::Debug for LawK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LawK")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("marginal_bounds", &self.marginal_bounds)
            .field("moment", &self.moment)
            .finish()
    }
}

impl LawK {
    pub fn new<C, P>(name: impl Into<String>, k: usize, cdf: C, cf: P) -> Self
    where
        C: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        P: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            k,
            cdf: Arc::new(cdf),
            cf: Arc::new(cf),
            density: None,
            marginal_bounds: None,
            moment: None,
            marginals: None,
        }
    }

    pub fn with_density<D: Fn(&[f64]) -> f64 + Send + Sync + 'static>(mut self, d: D) -> Self {
        self.density = Some(Arc::new(d));
        self
    }

    pub fn with_marginal_bounds(mut self, m: Vec<f64>) -> Self {
        self.marginal_bounds = Some(m);
        self
    }

    pub fn with_moment(mut self, alpha: f64, value: f64) -> Self {
        self.moment = Some(Moment { alpha, value });
        self
    }

    pub fn cdf(&self, t: &[f64]) -> f64 {
        (self.cdf)(t)
    }

    pub fn cf(&self, v: &[f64]) -> Complex64 {
        (self.cf)(v)
    }

    pub fn density(&self, x: &[f64]) -> Option<f64> {
        self.density.as_ref().map(|d| d(x))
    }

    /// CDF with a per-coordinate choice of left limits. Laws without
    /// marginals ignore `left`.
    pub fn cdf_sided(&self, t: &[f64], left: &[bool]) -> f64 {
        match &self.marginals {
            Some(ms) => ms
                .iter()
                .zip(t)
                .zip(left)
                .map(|((m, &x), &l)| if l { m.cdf_left(x) } else { m.cdf(x) })
                .product(),
            None => self.cdf(t),
        }
    }

    /// `F{(a_1, b_1] x .. x (a_k, b_k]}` by inclusion-exclusion over corners.
    pub fn box_measure(&self, a: &[f64], b: &[f64]) -> f64 {
        let k = self.k;
        if let Some(ms) = &self.marginals {
            return ms
                .iter()
                .zip(a.iter().zip(b))
                .map(|(m, (&x, &y))| m.cdf(y) - m.cdf(x))
                .product();
        }
        let mut total = 0.0;
        let mut corner = vec![0.0; k];
        for mask in 0..(1usize << k) {
            let mut sign = 1.0;
            for j in 0..k {
                if mask & (1 << j) != 0 {
                    corner[j] = a[j];
                    sign = -sign;
                } else {
                    corner[j] = b[j];
                }
            }
            total += sign * self.cdf(&corner);
        }
        total
    }

    /// Independent product of one-dimensional laws. The moment record
    /// bounds `E (max |x_j|)^alpha` by `sum_j E |x_j|^alpha`, with `alpha`
    /// the smallest declared exponent.
    pub fn product(marginals: Vec<Distribution1D>) -> Result<Self> {
        let k = marginals.len();
        if k == 0 {
            return Err(Error::InvalidInput(
                "product law needs at least one factor".into(),
            ));
        }
        let name = format!(
            "product[{}]",
            marginals
                .iter()
                .map(|m| m.name.as_str())
                .collect::<Vec<_>>()
                .join(" x ")
        );
        let a = Arc::new(marginals.clone());
        let b = Arc::clone(&a);
        let mut law = LawK::new(
            name,
            k,
            move |t| a.iter().zip(t).map(|(m, &x)| m.cdf(x)).product(),
            move |v| b.iter().zip(v).map(|(m, &z)| m.cf(z)).product(),
        );
        if let Some(m) = marginals
            .iter()
            .map(|m| m.density_bound)
            .collect::<Option<Vec<_>>>()
        {
            law = law.with_marginal_bounds(m);
        }
        if let Some(moms) = marginals
            .iter()
            .map(|m| m.moment)
            .collect::<Option<Vec<_>>>()
        {
            let alpha = moms.iter().map(|m| m.alpha).fold(f64::INFINITY, f64::min);
            let value: f64 = moms.iter().map(|m| m.value.powf(alpha / m.alpha)).sum();
            law = law.with_moment(alpha, value);
        }
        law.marginals = Some(marginals);
        Ok(law)
    }

    /// Independent standard normal vector in `R^k`.
    pub fn standard_normal(k: usize) -> Result<Self> {
        let law = Self::product(vec![Distribution1D::normal(0.0, 1.0); k])?;
        Ok(law.with_density(|x| x.iter().map(|&y| normal_pdf(y)).product()))
    }

    /// Product of `k` copies of the standardized `Binomial(n, p)`.
    pub fn binomial_product(k: usize, n: u64, p: f64) -> Result<Self> {
        let m = Distribution1D::binomial_standardized(n, p)?;
        Self::product(vec![m; k])
    }

    /// Product of `k` copies of the standardized Irwin-Hall law of order `n`.
    pub fn irwin_hall_product(k: usize, n: u32) -> Result<Self> {
        let m = Distribution1D::irwin_hall_standardized(n)?;
        Self::product(vec![m; k])
    }

    pub(crate) fn diff_fn<'a>(
        f: &'a LawK,
        g: &'a LawK,
    ) -> impl Fn(&[f64]) -> Complex64 + Sync + 'a {
        move |v: &[f64]| f.cf(v) - g.cf(v)
    }
}

/// Closed-form product normal CDF, used by tests as an independent oracle.
pub fn product_normal_cdf(t: &[f64]) -> f64 {
    t.iter().map(|&x| normal_cdf(x)).product()
}

/// Constants of the multivariate inequalities, all depending on `k` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiConstants {
    pub c1: f64,
    pub c2: f64,
    pub c5: f64,
    pub c6: f64,
    pub c8: f64,
    pub c9: f64,
    pub c1_hat: f64,
}

impl MultiConstants {
    /// Defaults assembled along the majorant construction:
    ///
    /// * `c1 = (2k-1) 2^-k max(1, rho)^k`: `2k-1` products in the expanded
    ///   minorant/majorant, each coordinate carrying a factor `1/2` and a
    ///   remainder of size at most `rho = sup |R_B|`.
    /// * `c2 = pi max_tau n_tau`: each monomial of `S` or `S~` is charged to
    ///   one non-`chi` index and `int delta = int eps = pi / W`.
    /// * `c5 = (2k-1)(rho + 3/(2 pi))^k`, `c8 = (2k-1)(rho + 1/pi)^k` from the
    ///   box majorants, and `c6 = c9 = 2 pi max_tau sum 2^(c-1)` since the
    ///   box remainders integrate to `2 pi / W` and are bounded by 2.
    /// * `c1_hat = (2k-1) 4^k (2 Si(pi) / pi)^k k^k`.
    pub fn for_dimension(k: usize) -> Result<Self> {
        if k == 0 || k > 6 {
            return Err(Error::InvalidInput(
                "constants are tabulated for 1 <= k <= 6".into(),
            ));
        }
        let rho = kernels::rho_r() * (1.0 + 1e-9);
        let kf = k as f64;
        let kk = k as i32;
        let terms = 2.0 * kf - 1.0;
        let (n_s, w_s) = ring::charge_counts(k);
        let si = crate::special::sine_integral(PI);
        Ok(Self {
            c1: terms * 0.5f64.powi(kk) * rho.max(1.0).powi(kk),
            c2: PI * n_s,
            c5: terms * (rho + 1.5 / PI).powi(kk),
            c6: 2.0 * PI * w_s,
            c8: terms * (rho + 1.0 / PI).powi(kk),
            c9: 2.0 * PI * w_s,
            c1_hat: terms * 4f64.powi(kk) * (2.0 * si / PI).powi(kk) * kf.powi(kk),
        })
    }

    /// Replace constants by `overrides`, refusing to lower any of them
    /// unless `unsafe_ok`.
    pub fn with_overrides(mut self, overrides: &[(String, f64)], unsafe_ok: bool) -> Result<Self> {
        for (name, value) in overrides {
            let slot = match name.as_str() {
                "c1" => &mut self.c1,
                "c2" => &mut self.c2,
                "c5" => &mut self.c5,
                "c6" => &mut self.c6,
                "c8" => &mut self.c8,
                "c9" => &mut self.c9,
                "c1_hat" => &mut self.c1_hat,
                other => return Err(Error::InvalidInput(format!("unknown constant {other}"))),
            };
            if !(value.is_finite() && *value > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "constant {name} must be positive"
                )));
            }
            if *value < *slot && !unsafe_ok {
                return Err(Error::InvalidInput(format!(
                    "lowering {name} from {slot} to {value} needs the unsafe flag"
                )));
            }
            *slot = *value;
        }
        Ok(self)
    }
}

/// Numerical settings shared by the multivariate bounds.
#[derive(Debug, Clone, Copy)]
pub struct MultiConfig {
    pub constants: MultiConstants,
    pub panels: PanelSpec,
    pub slab_panels: PanelSpec,
    /// Slab threshold `tau`.
    pub tau: f64,
}

impl MultiConfig {
    pub fn new(k: usize) -> Result<Self> {
        Ok(Self {
            constants: MultiConstants::for_dimension(k)?,
            panels: PanelSpec::default(),
            slab_panels: PanelSpec {
                width: 1.0,
                order: 4,
                dyadic_levels: 6,
            },
            tau: 1.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_cover() {
        for k in 1..=4 {
            let ps = PartitionP::all(k);
            assert_eq!(ps.len(), 3usize.pow(k as u32));
            assert!(ps.iter().all(|p| p.is_cover(k)));
            let mut uniq = ps.clone();
            uniq.dedup();
            assert_eq!(uniq.len(), ps.len());
        }
    }

    #[test]
    fn constants_match_one_dimensional_anchor() {
        let c = MultiConstants::for_dimension(1).unwrap();
        assert!((c.c2 - PI).abs() < 1e-12);
        let c2 = MultiConstants::for_dimension(2).unwrap();
        assert!((c2.c2 - 3.0 * PI).abs() < 1e-12);
        assert!(c2.c1 >= 0.75 - 1e-12);
    }

    #[test]
    fn overrides_respect_direction() {
        let c = MultiConstants::for_dimension(2).unwrap();
        assert!(c.with_overrides(&[("c1".into(), 10.0)], false).is_ok());
        assert!(c.with_overrides(&[("c1".into(), 0.1)], false).is_err());
        assert!(c.with_overrides(&[("c1".into(), 0.1)], true).is_ok());
        assert!(c.with_overrides(&[("zz".into(), 1.0)], true).is_err());
    }

    #[test]
    fn product_law_pieces() {
        let g = LawK::standard_normal(2).unwrap();
        assert!((g.cdf(&[0.0, 0.0]) - 0.25).abs() < 1e-15);
        assert!((g.cf(&[1.0, 1.0]).re - (-1.0f64).exp()).abs() < 1e-15);
        let m = g.marginal_bounds.clone().unwrap();
        assert!((m[0] - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert_eq!(g.moment.unwrap().value, 2.0);
        let b = LawK::binomial_product(2, 4, 0.5).unwrap();
        // atoms at -2..2 per axis; the box (-0.5, 0.5]^2 holds only (0, 0)
        let p = b.box_measure(&[-0.5, -0.5], &[0.5, 0.5]);
        assert!((p - (6.0f64 / 16.0).powi(2)).abs() < 1e-15);
        let generic = LawK::new(
            "copy",
            2,
            {
                let b = b.clone();
                move |t: &[f64]| b.cdf(t)
            },
            |_| Complex64::new(1.0, 0.0),
        );
        assert!((generic.box_measure(&[-0.5, -0.5], &[0.5, 0.5]) - p).abs() < 1e-14);
        assert!(
            (b.cdf_sided(&[0.0, 0.0], &[true, false]) - (5.0 / 16.0) * (11.0 / 16.0)).abs() < 1e-15
        );
    }
}
