use super::{DiffusionField, SpdeModel};
use crate::error::{Error, Result};
use crate::function_space::{Basis, Metric, SpectralState};
use crate::scalar::Real;

/// `sin(kπ x_i)` at the interior points `x_i = i h`, `h = 1/(points + 1)`.
pub fn grid_sine<S: Real>(points: usize, k: usize) -> SpectralState<S> {
    let h = 1.0 / (points + 1) as f64;
    SpectralState::from_grid_values(
        (1..=points)
            .map(|i| S::lit((k as f64 * std::f64::consts::PI * i as f64 * h).sin()))
            .collect(),
    )
}

/// Eigenvalue `-(2/h²)(1 - cos(kπh))` of the Dirichlet second difference.
pub fn dirichlet_eigenvalue<S: Real>(points: usize, k: usize) -> S {
    let h = 1.0 / (points + 1) as f64;
    S::lit(-(2.0 / (h * h)) * (1.0 - (k as f64 * std::f64::consts::PI * h).cos()))
}

/// Stochastic p-Laplace equation on `(0, 1)` with homogeneous Dirichlet
/// boundary, discretized by face-centred differences:
///
/// `L(y)_i = (F_{i+1/2} − F_{i−1/2}) / h`, `F = |g|^{p−2} g`, `g_{i+1/2} = (y_{i+1} − y_i)/h`.
#[derive(Clone, Debug)]
pub struct PLaplaceModel<S> {
    p: S,
    points: usize,
    diffusion: Vec<DiffusionField<S>>,
}

impl<S: Real> PLaplaceModel<S> {
    pub fn new(p: S, points: usize, diffusion: Vec<DiffusionField<S>>) -> Result<Self> {
        if !(p >= S::lit(2.0)) {
            return Err(Error::InvalidModel(format!("p-Laplace exponent must be >= 2, got {p}")));
        }
        if points == 0 {
            return Err(Error::InvalidModel("grid needs at least one interior point".into()));
        }
        Ok(Self { p, points, diffusion })
    }

    pub fn exponent(&self) -> S {
        self.p
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> S {
        S::one() / S::from_usize_lossy(self.points + 1)
    }

    pub fn plaplace_drift(&self, y: &SpectralState<S>) -> Result<SpectralState<S>> {
        match y.basis() {
            Basis::Grid { points } if *points == self.points => {}
            _ => {
                return Err(Error::BasisMismatch(format!(
                    "p-Laplace model expects a grid state with {} points",
                    self.points
                )))
            }
        }
        let u = y.coeffs();
        let h = self.spacing();
        let inv_h = S::one() / h;
        let exponent = self.p - S::lit(2.0);
        let linear = exponent == S::zero();
        let value = |i: isize| -> S {
            if i < 0 || i as usize >= self.points {
                S::zero()
            } else {
                u[i as usize]
            }
        };
        // Face j sits between nodes j-1 and j (node -1 and node M are boundary zeros).
        let flux: Vec<S> = (0..=self.points as isize)
            .map(|j| {
                let g = (value(j) - value(j - 1)) * inv_h;
                if linear {
                    g
                } else {
                    g.abs().powf(exponent) * g
                }
            })
            .collect();
        let out = (0..self.points).map(|i| (flux[i + 1] - flux[i]) * inv_h).collect();
        Ok(SpectralState::from_grid_values(out))
    }
}

impl<S: Real> SpdeModel<S> for PLaplaceModel<S> {
    fn noise_dim(&self) -> usize {
        self.diffusion.len()
    }

    fn working_order(&self) -> Option<usize> {
        None
    }

    fn metric(&self) -> Metric<S> {
        Metric::GridL2
    }

    fn drift(&self, y: &SpectralState<S>) -> Result<SpectralState<S>> {
        self.plaplace_drift(y)
    }

    fn diffusion(&self, y: &SpectralState<S>) -> Result<Vec<SpectralState<S>>> {
        self.diffusion.iter().map(|f| f.eval(y)).collect()
    }

    fn diffusion_derivative(&self, j: usize, _y: &SpectralState<S>, u: &SpectralState<S>) -> Result<Option<SpectralState<S>>> {
        self.diffusion[j].derivative(u).map(Some)
    }
}
