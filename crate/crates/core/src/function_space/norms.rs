//! Norm scales, inner products and the embedding check.

use serde::{Deserialize, Serialize};

use super::state::{Basis, SpectralState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Weight `(2|n| + d)^(2q)` of the Hermite–Sobolev norm of order `q`.
#[inline]
pub fn sobolev_weight<S: Real>(order: usize, d: usize, q: S) -> S {
    S::from_usize_lossy(2 * order + d).powf(S::lit(2.0) * q)
}

/// `sqrt( sum_{|n| <= N} (2|n| + d)^(2q) c_n^2 )`.
pub fn norm_at<S: Real>(state: &SpectralState<S>, q: S) -> Result<S> {
    match state.basis() {
        Basis::Hermite(b) => {
            let d = b.dim();
            Ok(b.indices()
                .iter()
                .zip(state.coeffs())
                .map(|(n, &c)| sobolev_weight(n.order(), d, q) * c * c)
                .sum::<S>()
                .sqrt())
        }
        Basis::Grid { .. } => Err(Error::UnsupportedBasis {
            op: "norm_at",
            basis: "sine_grid",
        }),
    }
}

/// Regularity orders of the triple `(G, H, K)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormScale<S> {
    pub q_g: S,
    pub q_h: S,
    pub q_k: S,
}

impl<S: Real> NormScale<S> {
    pub fn new(q_g: S, q_h: S, q_k: S) -> Result<Self> {
        if !(q_g >= q_h && q_h >= q_k) {
            return Err(Error::InvalidScale(format!(
                "need q_G >= q_H >= q_K, got ({q_g}, {q_h}, {q_k})"
            )));
        }
        Ok(Self { q_g, q_h, q_k })
    }

    /// `G = S_{p+1}`, `H = S_{p+1/2}`, `K = S_p`.
    pub fn hermite_sobolev(p: S) -> Self {
        Self {
            q_g: p + S::one(),
            q_h: p + S::lit(0.5),
            q_k: p,
        }
    }

    pub fn h_metric(&self) -> Metric<S> {
        Metric::HermiteSobolev { q: self.q_h }
    }
}

/// Inner product used for projections and distances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric<S> {
    /// Weighted coefficient inner product of `S_q`.
    HermiteSobolev { q: S },
    /// Discrete L² on the Dirichlet grid: `h * sum u_i v_i`.
    GridL2,
    /// Plain coefficient dot product.
    Euclidean,
}

impl<S: Real> Metric<S> {
    /// Inner product over the common truncation (the shorter vector is
    /// zero-padded). Callers must pass compatible states.
    pub fn inner(&self, u: &SpectralState<S>, v: &SpectralState<S>) -> S {
        debug_assert!(u.check_compatible(v).is_ok());
        let (a, b) = (u.coeffs(), v.coeffs());
        let len = a.len().min(b.len());
        match (self, u.basis()) {
            (Metric::HermiteSobolev { q }, Basis::Hermite(basis)) => {
                let d = basis.dim();
                let mut acc = S::zero();
                let mut k = 0;
                // Weights are constant on each order band.
                for band in 0..=basis.order() {
                    let range = basis.band(band);
                    if range.start >= len {
                        break;
                    }
                    let w = sobolev_weight(band, d, *q);
                    let mut part = S::zero();
                    while k < range.end.min(len) {
                        part += a[k] * b[k];
                        k += 1;
                    }
                    acc += w * part;
                }
                acc
            }
            (Metric::GridL2, Basis::Grid { points }) => {
                let h = S::one() / S::from_usize_lossy(points + 1);
                h * a[..len].iter().zip(&b[..len]).map(|(&x, &y)| x * y).sum::<S>()
            }
            _ => a[..len].iter().zip(&b[..len]).map(|(&x, &y)| x * y).sum(),
        }
    }

    pub fn norm(&self, u: &SpectralState<S>) -> S {
        self.inner(u, u).max(S::zero()).sqrt()
    }

    /// Default H-level metric for a state's basis.
    pub fn for_basis(basis: &Basis, scale: &NormScale<S>) -> Self {
        match basis {
            Basis::Hermite(_) => scale.h_metric(),
            Basis::Grid { .. } => Metric::GridL2,
        }
    }
}

/// Outcome of checking `‖s‖_K <= ‖s‖_H <= ‖s‖_G` over a set of states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// Largest observed `‖s‖_K / ‖s‖_H`; the empirical embedding constant.
    pub max_ratio_k_over_h: f64,
    pub max_ratio_h_over_g: f64,
    /// Indices of states violating either inequality.
    pub violations: Vec<usize>,
    pub passed: bool,
}

pub fn check_embedding<S: Real>(scale: &NormScale<S>, states: &[SpectralState<S>]) -> Result<EmbeddingReport> {
    let mut max_kh = 0.0f64;
    let mut max_hg = 0.0f64;
    let mut violations = Vec::new();
    for (i, s) in states.iter().enumerate() {
        let g = norm_at(s, scale.q_g)?.as_f64();
        let h = norm_at(s, scale.q_h)?.as_f64();
        let k = norm_at(s, scale.q_k)?.as_f64();
        let kh = if h == 0.0 { 0.0 } else { k / h };
        let hg = if g == 0.0 { 0.0 } else { h / g };
        max_kh = max_kh.max(kh);
        max_hg = max_hg.max(hg);
        if kh > 1.0 || hg > 1.0 {
            violations.push(i);
        }
    }
    Ok(EmbeddingReport {
        max_ratio_k_over_h: max_kh,
        max_ratio_h_over_g: max_hg,
        passed: violations.is_empty(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let h0 = SpectralState::<f64>::hermite_function_1d(8, 0);
        assert_eq!(norm_at(&h0, 3.7).unwrap(), 1.0);
        let h2 = SpectralState::<f64>::hermite_function_1d(8, 2);
        assert!((norm_at(&h2, 1.0).unwrap() - 5.0).abs() < 1e-14);
        let s = &SpectralState::<f64>::hermite_function_1d(8, 1) + &SpectralState::hermite_function_1d(8, 3);
        assert!((norm_at(&s, 0.5).unwrap() - 10f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn norm_rejects_grid() {
        let g = SpectralState::<f64>::zeros_grid(4);
        assert!(matches!(norm_at(&g, 0.0), Err(Error::UnsupportedBasis { .. })));
    }

    #[test]
    fn inner_matches_norm_at() {
        let mut s = SpectralState::<f64>::zeros_hermite(2, 3);
        for (k, c) in s.coeffs_mut().iter_mut().enumerate() {
            *c = (k as f64 * 0.37).sin();
        }
        let m = Metric::HermiteSobolev { q: 0.75 };
        assert!((m.norm(&s) - norm_at(&s, 0.75).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn grid_inner_uses_spacing() {
        let s = SpectralState::<f64>::from_grid_values(vec![1.0, 1.0, 1.0]);
        assert!((Metric::GridL2.inner(&s, &s) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn embedding_on_basis_elements() {
        let scale = NormScale::hermite_sobolev(0.0);
        let states: Vec<_> = (0..=10).map(|n| SpectralState::<f64>::hermite_function_1d(10, n)).collect();
        let report = check_embedding(&scale, &states).unwrap();
        assert!(report.passed);
        // Largest ratio is attained at n = 0 where every weight is 1.
        assert_eq!(report.max_ratio_k_over_h, 1.0);
        let zero = check_embedding(&scale, &[SpectralState::zeros_hermite(1, 3)]).unwrap();
        assert!(zero.passed && zero.max_ratio_k_over_h == 0.0);
    }

    #[test]
    fn scale_ordering_enforced() {
        assert!(NormScale::new(0.0, 1.0, 0.5).is_err());
        assert!(NormScale::new(1.0f64, 0.5, 0.0).is_ok());
    }
}
