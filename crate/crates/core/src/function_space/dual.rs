use super::basis::hermite_functions;
use super::state::{SpectralState, StateDoc};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Element of a dual Hermite–Sobolev space, stored by its Hermite
/// coefficients so that pairing is a coefficient dot product.
#[derive(Clone, Debug, PartialEq)]
pub struct DualField<S> {
    coeffs: SpectralState<S>,
}

impl<S: Real> DualField<S> {
    pub fn zero(d: usize, order: usize) -> Self {
        Self {
            coeffs: SpectralState::zeros_hermite(d, order),
        }
    }

    pub fn from_state(coeffs: SpectralState<S>) -> Self {
        Self { coeffs }
    }

    /// `δ_z` truncated at `order`: coefficients `h_n(z)`.
    pub fn dirac(order: usize, z: &[S]) -> Self {
        let d = z.len();
        let per_axis: Vec<Vec<S>> = z.iter().map(|&zi| hermite_functions(order, zi)).collect();
        let mut coeffs = SpectralState::zeros_hermite(d, order);
        let basis = coeffs.hermite_basis().expect("hermite").clone();
        for (c, n) in coeffs.coeffs_mut().iter_mut().zip(basis.indices()) {
            *c = n
                .entries()
                .iter()
                .enumerate()
                .fold(S::one(), |acc, (axis, &k)| acc * per_axis[axis][k]);
        }
        Self { coeffs }
    }

    /// The functional `y ↦ ∫ y dz`, with coefficients `∫ h_n`.
    pub fn integral(d: usize, order: usize) -> Self {
        // ∫h_0 = sqrt(2) π^{1/4}, ∫h_1 = 0, ∫h_{k+1} = sqrt(k/(k+1)) ∫h_{k-1}.
        let mut one_d = vec![S::zero(); order + 1];
        one_d[0] = S::lit(2f64.sqrt() * std::f64::consts::PI.powf(0.25));
        for k in 1..order {
            let kf = S::from_usize_lossy(k);
            one_d[k + 1] = (kf / (kf + S::one())).sqrt() * one_d[k - 1];
        }
        let mut coeffs = SpectralState::zeros_hermite(d, order);
        let basis = coeffs.hermite_basis().expect("hermite").clone();
        for (c, n) in coeffs.coeffs_mut().iter_mut().zip(basis.indices()) {
            *c = n.entries().iter().fold(S::one(), |acc, &k| acc * one_d[k]);
        }
        Self { coeffs }
    }

    pub fn scaled(&self, alpha: S) -> Self {
        Self {
            coeffs: self.coeffs.scaled(alpha),
        }
    }

    pub fn as_state(&self) -> &SpectralState<S> {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn order(&self) -> usize {
        self.coeffs.order()
    }

    /// `<dual, state> = sum_n dual_n state_n`, zero-padding the shorter side.
    pub fn pair(&self, state: &SpectralState<S>) -> Result<S> {
        if self.coeffs.tag() != state.tag() {
            return Err(Error::BasisMismatch(format!(
                "dual on {} paired with {} state",
                self.coeffs.tag().name(),
                state.tag().name()
            )));
        }
        if self.dim() != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(self
            .coeffs
            .coeffs()
            .iter()
            .zip(state.coeffs())
            .map(|(&a, &b)| a * b)
            .sum())
    }

    pub fn to_doc(&self) -> StateDoc {
        self.coeffs.to_doc()
    }

    pub fn from_doc(doc: &StateDoc) -> Result<Self> {
        Ok(Self::from_state(SpectralState::from_doc(doc)?))
    }
}
