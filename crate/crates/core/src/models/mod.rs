//! Coefficient pairs `(L, A)` of the SPDEs the checker and simulators consume.

mod diffusion;
mod ito;
mod linear;
mod plaplace;

pub use diffusion::DiffusionField;
pub use ito::ItoTypeModel;
pub use linear::{LinearEigenModel, LinearOperator};
pub use plaplace::{dirichlet_eigenvalue, grid_sine, PLaplaceModel};

use crate::error::{Error, Result};
use crate::function_space::{Metric, SpectralState};
use crate::scalar::Real;

/// Drift `L` and finitely many diffusion fields `A^1, ..., A^J`.
pub trait SpdeModel<S: Real>: Send + Sync {
    /// Number `J` of retained Wiener coordinates.
    fn noise_dim(&self) -> usize;

    /// Hermite working order `N`; `None` for grid models, whose outputs never
    /// leave the grid.
    fn working_order(&self) -> Option<usize>;

    /// H-level inner product.
    fn metric(&self) -> Metric<S>;

    fn drift(&self, y: &SpectralState<S>) -> Result<SpectralState<S>>;

    fn diffusion(&self, y: &SpectralState<S>) -> Result<Vec<SpectralState<S>>>;

    /// Closed-form `DA^j(y) u`, when the model provides one.
    fn diffusion_derivative(&self, _j: usize, _y: &SpectralState<S>, _u: &SpectralState<S>) -> Result<Option<SpectralState<S>>> {
        Ok(None)
    }
}

/// Splits `v` at the working order and returns the retained part together
/// with the norm of the discarded part ("spill").
pub fn split_spill<S: Real>(v: &SpectralState<S>, order: Option<usize>, metric: &Metric<S>) -> (SpectralState<S>, S) {
    match order {
        Some(n) if v.order() > n && v.hermite_basis().is_some() => {
            let (low, high) = v.split_at_order(n);
            (low, metric.norm(&high))
        }
        _ => (v.clone(), S::zero()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DaMode {
    Analytic,
    FiniteDifference,
}

/// `Σ_j DA^j(y) A^j(y)`.
#[derive(Clone, Debug)]
pub struct StratonovichCorrection<S> {
    pub value: SpectralState<S>,
    /// Relative disagreement between the two finite-difference steps
    /// (`None` in analytic mode).
    pub step_sensitivity: Option<S>,
    /// Set when `step_sensitivity` exceeds the tolerance.
    pub step_sensitive: bool,
}

/// Relative tolerance between the two finite-difference steps.
pub const FD_STEP_TOLERANCE: f64 = 1e-4;

pub fn stratonovich_correction<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    y: &SpectralState<S>,
    mode: DaMode,
) -> Result<StratonovichCorrection<S>> {
    let fields = model.diffusion(y)?;
    let metric = model.metric();
    let mut total = SpectralState::zeros_like(y);
    match mode {
        DaMode::Analytic => {
            for (j, a) in fields.iter().enumerate() {
                let da = model.diffusion_derivative(j, y, a)?.ok_or_else(|| {
                    Error::InvalidModel("model has no analytic diffusion derivative".into())
                })?;
                total.axpy(S::one(), &da)?;
            }
            Ok(StratonovichCorrection {
                value: total,
                step_sensitivity: None,
                step_sensitive: false,
            })
        }
        DaMode::FiniteDifference => {
            let mut coarse_total = SpectralState::zeros_like(y);
            for (j, a) in fields.iter().enumerate() {
                let a_norm = metric.norm(a);
                if a_norm == S::zero() {
                    continue;
                }
                let eps = S::epsilon().cbrt() * (S::one() + metric.norm(y)) / a_norm;
                let directional = |h: S| -> Result<SpectralState<S>> {
                    let mut yp = y.clone();
                    yp.axpy(h, a)?;
                    let mut ym = y.clone();
                    ym.axpy(-h, a)?;
                    let diff = &model.diffusion(&yp)?[j] - &model.diffusion(&ym)?[j];
                    Ok(diff.scaled(S::one() / (h + h)))
                };
                coarse_total.axpy(S::one(), &directional(eps)?)?;
                total.axpy(S::one(), &directional(eps / S::lit(2.0))?)?;
            }
            let scale = metric.norm(&total);
            let sens = if scale == S::zero() {
                metric.norm(&coarse_total)
            } else {
                metric.norm(&(&total - &coarse_total)) / scale
            };
            Ok(StratonovichCorrection {
                value: total,
                step_sensitive: sens > S::lit(FD_STEP_TOLERANCE),
                step_sensitivity: Some(sens),
            })
        }
    }
}
