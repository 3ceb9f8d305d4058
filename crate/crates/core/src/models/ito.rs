use super::SpdeModel;
use crate::error::{Error, Result};
use crate::function_space::{derivative, norm_at, second_derivative, DualField, Metric, NormScale, SpectralState};
use crate::scalar::Real;

/// Hermite–Sobolev SPDE of Itô type:
///
/// `L(y) = ½ Σ_{i,k} (⟨σ,y⟩⟨σ,y⟩ᵀ)_{ik} ∂²_{ik} y − Σ_i ⟨b_i,y⟩ ∂_i y`,
/// `A^j(y) = −Σ_i ⟨σ_i^j,y⟩ ∂_i y`.
#[derive(Clone, Debug)]
pub struct ItoTypeModel<S> {
    order: usize,
    b: Vec<DualField<S>>,
    /// `sigma[j][i]` is `σ_i^j`.
    sigma: Vec<Vec<DualField<S>>>,
    scale: NormScale<S>,
}

impl<S: Real> ItoTypeModel<S> {
    pub fn new(order: usize, b: Vec<DualField<S>>, sigma: Vec<Vec<DualField<S>>>, scale: NormScale<S>) -> Result<Self> {
        let d = b.len();
        if d == 0 {
            return Err(Error::InvalidModel("b must have d >= 1 components".into()));
        }
        for dual in b.iter().chain(sigma.iter().flatten()) {
            if dual.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: dual.dim(),
                });
            }
        }
        if let Some(row) = sigma.iter().find(|row| row.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: row.len(),
            });
        }
        Ok(Self { order, b, sigma, scale })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn scale(&self) -> &NormScale<S> {
        &self.scale
    }

    pub fn b(&self) -> &[DualField<S>] {
        &self.b
    }

    pub fn sigma(&self) -> &[Vec<DualField<S>>] {
        &self.sigma
    }

    /// `⟨σ_i^j, y⟩` as `[j][i]`.
    pub fn sigma_pairings(&self, y: &SpectralState<S>) -> Result<Vec<Vec<S>>> {
        self.sigma
            .iter()
            .map(|row| row.iter().map(|s| s.pair(y)).collect())
            .collect()
    }

    pub fn b_pairings(&self, y: &SpectralState<S>) -> Result<Vec<S>> {
        self.b.iter().map(|b| b.pair(y)).collect()
    }

    /// `(Σ_j Σ_i ‖σ_i^j‖²_{-(p+1)})^{1/2}`; finite for any finite `J`.
    pub fn noise_summability(&self) -> Result<S> {
        let q = -self.scale.q_g;
        let mut acc = S::zero();
        for dual in self.sigma.iter().flatten() {
            let n = norm_at(dual.as_state(), q)?;
            acc += n * n;
        }
        Ok(acc.sqrt())
    }

    pub fn ito_drift(&self, y: &SpectralState<S>) -> Result<SpectralState<S>> {
        let d = self.dim();
        let s = self.sigma_pairings(y)?;
        let beta = self.b_pairings(y)?;
        let mut out = SpectralState::zeros_like(y);
        for i in 0..d {
            for k in i..d {
                let mut c: S = s.iter().map(|row| row[i] * row[k]).sum();
                if i != k {
                    // (SSᵀ)_{ik} and (SSᵀ)_{ki} both multiply ∂²_{ik}.
                    c = c + c;
                }
                if c != S::zero() {
                    out.axpy(S::lit(0.5) * c, &second_derivative(y, (i, k))?)?;
                }
            }
            if beta[i] != S::zero() {
                out.axpy(-beta[i], &derivative(y, i)?)?;
            }
        }
        Ok(out)
    }

    pub fn ito_diffusion(&self, y: &SpectralState<S>) -> Result<Vec<SpectralState<S>>> {
        let s = self.sigma_pairings(y)?;
        let grads: Vec<_> = (0..self.dim()).map(|i| derivative(y, i)).collect::<Result<_>>()?;
        s.iter()
            .map(|row| {
                let mut a = SpectralState::zeros_like(&grads[0]);
                for (c, g) in row.iter().zip(&grads) {
                    a.axpy(-*c, g)?;
                }
                Ok(a)
            })
            .collect()
    }

    /// `DA^j(y) u = −Σ_i ⟨σ_i^j,u⟩ ∂_i y − Σ_i ⟨σ_i^j,y⟩ ∂_i u`.
    pub fn diffusion_directional(&self, j: usize, y: &SpectralState<S>, u: &SpectralState<S>) -> Result<SpectralState<S>> {
        let row = &self.sigma[j];
        let mut out = SpectralState::zeros_like(y);
        for (i, sig) in row.iter().enumerate() {
            let su = sig.pair(u)?;
            let sy = sig.pair(y)?;
            if su != S::zero() {
                out.axpy(-su, &derivative(y, i)?)?;
            }
            if sy != S::zero() {
                out.axpy(-sy, &derivative(u, i)?)?;
            }
        }
        Ok(out)
    }
}

impl<S: Real> SpdeModel<S> for ItoTypeModel<S> {
    fn noise_dim(&self) -> usize {
        self.sigma.len()
    }

    fn working_order(&self) -> Option<usize> {
        Some(self.order)
    }

    fn metric(&self) -> Metric<S> {
        self.scale.h_metric()
    }

    fn drift(&self, y: &SpectralState<S>) -> Result<SpectralState<S>> {
        self.ito_drift(y)
    }

    fn diffusion(&self, y: &SpectralState<S>) -> Result<Vec<SpectralState<S>>> {
        self.ito_diffusion(y)
    }

    fn diffusion_derivative(&self, j: usize, y: &SpectralState<S>, u: &SpectralState<S>) -> Result<Option<SpectralState<S>>> {
        self.diffusion_directional(j, y, u).map(Some)
    }
}
