use crate::error::Result;
use crate::function_space::SpectralState;
use crate::scalar::Real;

/// Affine diffusion fields for the grid and linear models.
#[derive(Clone, Debug, PartialEq)]
pub enum DiffusionField<S> {
    Zero,
    /// Additive noise along a fixed direction.
    Constant(SpectralState<S>),
    /// Multiplicative noise `A(y) = c y`.
    Scaled(S),
    /// `A(y) = (Σ_n f_n y_n) v` for a coefficient functional `f` and direction `v`.
    RankOne {
        functional: SpectralState<S>,
        direction: SpectralState<S>,
    },
}

impl<S: Real> DiffusionField<S> {
    pub fn eval(&self, y: &SpectralState<S>) -> Result<SpectralState<S>> {
        match self {
            DiffusionField::Zero => Ok(SpectralState::zeros_like(y)),
            DiffusionField::Constant(v) => {
                y.check_compatible(v)?;
                Ok(v.clone())
            }
            DiffusionField::Scaled(c) => Ok(y.scaled(*c)),
            DiffusionField::RankOne { functional, direction } => {
                y.check_compatible(direction)?;
                Ok(direction.scaled(coefficient_dot(functional, y)))
            }
        }
    }

    /// `DA(y) u`; the fields are affine, so this is the linear part applied to `u`.
    pub fn derivative(&self, u: &SpectralState<S>) -> Result<SpectralState<S>> {
        match self {
            DiffusionField::Zero | DiffusionField::Constant(_) => Ok(SpectralState::zeros_like(u)),
            DiffusionField::Scaled(c) => Ok(u.scaled(*c)),
            DiffusionField::RankOne { functional, direction } => Ok(direction.scaled(coefficient_dot(functional, u))),
        }
    }
}

fn coefficient_dot<S: Real>(a: &SpectralState<S>, b: &SpectralState<S>) -> S {
    a.coeffs().iter().zip(b.coeffs()).map(|(&x, &y)| x * y).sum()
}
