//! Gauss–Hermite quadrature and projection of functions onto Hermite functions.

use super::basis::hermite_functions;
use super::state::SpectralState;
use crate::linalg::tridiagonal_eigenvalues;
use crate::scalar::Real;

/// Gauss–Hermite rule stored with modified weights `w_i e^{x_i²}`, so that
/// `Σ_i mw_i f(x_i) ≈ ∫ f` for integrands that decay like `e^{-x²}`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    modified_weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes are eigenvalues of the Jacobi matrix with off-diagonal
    /// `sqrt(k/2)`. Weights use the Christoffel identity
    /// `w_i e^{x_i²} = 1 / Σ_{k<n} h_k(x_i)²`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let nodes = tridiagonal_eigenvalues(&vec![0.0; n], &off);
        let modified_weights = nodes
            .iter()
            .map(|&x| 1.0 / hermite_functions(n - 1, x).iter().map(|h| h * h).sum::<f64>())
            .collect();
        Self { nodes, modified_weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn modified_weights(&self) -> &[f64] {
        &self.modified_weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.modified_weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Hermite coefficients `∫ f h_n`, `n <= order`, of a one-dimensional function.
pub fn project_function<S: Real>(order: usize, f: impl Fn(f64) -> f64) -> SpectralState<S> {
    let rule = GaussHermite::new(2 * order + 1);
    let mut coeffs = vec![0.0f64; order + 1];
    for (&x, &w) in rule.nodes().iter().zip(rule.modified_weights()) {
        let fx = f(x);
        for (c, h) in coeffs.iter_mut().zip(hermite_functions(order, x)) {
            *c += w * fx * h;
        }
    }
    SpectralState::from_hermite_coeffs(1, order, coeffs.into_iter().map(S::lit).collect())
        .expect("length matches basis")
}

/// Values of a one-dimensional Hermite state at the given points.
pub fn evaluate_1d<S: Real>(state: &SpectralState<S>, points: &[f64]) -> Vec<f64> {
    let order = state.order();
    points
        .iter()
        .map(|&x| {
            hermite_functions(order, x)
                .iter()
                .zip(state.coeffs())
                .map(|(h, c)| h * c.as_f64())
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_gaussian_moments() {
        let rule = GaussHermite::new(30);
        let pi = std::f64::consts::PI;
        assert!((rule.integrate(|x| (-x * x).exp()) - pi.sqrt()).abs() < 1e-13);
        assert!((rule.integrate(|x| x * x * (-x * x).exp()) - pi.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn projection_recovers_basis_function() {
        let s: SpectralState<f64> = project_function(12, |x| hermite_functions(12, x)[5]);
        for (n, c) in s.coeffs().iter().enumerate() {
            let want = if n == 5 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-12, "n = {n}: {c}");
        }
    }
}
