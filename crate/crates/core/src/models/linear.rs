use super::{DiffusionField, SpdeModel};
use crate::error::{Error, Result};
use crate::function_space::{Basis, Metric, SpectralState};
use crate::scalar::Real;

/// Linear drift operators with known eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearOperator<S> {
    /// `½(Δ − |x|²)` on Hermite coefficients: `h_n ↦ −(|n| + d/2) h_n`.
    HermiteOscillator,
    /// Dirichlet second difference on the grid.
    DirichletLaplacian,
    /// Coefficient-wise multiplication.
    Diagonal(Vec<S>),
}

impl<S: Real> LinearOperator<S> {
    pub fn apply(&self, y: &SpectralState<S>) -> Result<SpectralState<S>> {
        match (self, y.basis()) {
            (LinearOperator::HermiteOscillator, Basis::Hermite(b)) => {
                let half_d = S::from_usize_lossy(b.dim()) / S::lit(2.0);
                let mut out = y.clone();
                for (c, n) in out.coeffs_mut().iter_mut().zip(b.indices()) {
                    *c *= -(S::from_usize_lossy(n.order()) + half_d);
                }
                Ok(out)
            }
            (LinearOperator::DirichletLaplacian, Basis::Grid { points }) => {
                let h = S::one() / S::from_usize_lossy(points + 1);
                let u = y.coeffs();
                let at = |i: isize| if i < 0 || i as usize >= *points { S::zero() } else { u[i as usize] };
                Ok(SpectralState::from_grid_values(
                    (0..*points as isize)
                        .map(|i| (at(i + 1) - S::lit(2.0) * at(i) + at(i - 1)) / (h * h))
                        .collect(),
                ))
            }
            (LinearOperator::Diagonal(diag), _) => {
                if diag.len() != y.len() {
                    return Err(Error::DimensionMismatch {
                        expected: diag.len(),
                        found: y.len(),
                    });
                }
                let mut out = y.clone();
                for (c, &w) in out.coeffs_mut().iter_mut().zip(diag) {
                    *c *= w;
                }
                Ok(out)
            }
            (op, basis) => Err(Error::BasisMismatch(format!("{op:?} cannot act on {} states", basis.tag().name()))),
        }
    }
}

/// Linear drift with supplied eigenpairs `L v_i = λ_i v_i` and affine diffusion.
#[derive(Clone, Debug)]
pub struct LinearEigenModel<S> {
    operator: LinearOperator<S>,
    eigenpairs: Vec<(SpectralState<S>, S)>,
    diffusion: Vec<DiffusionField<S>>,
    metric: Metric<S>,
    working_order: Option<usize>,
}

impl<S: Real> LinearEigenModel<S> {
    /// Rejects eigenpairs with `‖L v − λ v‖ / ‖v‖ > tolerance`.
    pub fn new(
        operator: LinearOperator<S>,
        eigenpairs: Vec<(SpectralState<S>, S)>,
        diffusion: Vec<DiffusionField<S>>,
        metric: Metric<S>,
        tolerance: S,
    ) -> Result<Self> {
        let mut working_order = None;
        for (i, (v, lambda)) in eigenpairs.iter().enumerate() {
            let defect = eigen_defect(&operator, v, *lambda, &metric)?;
            if defect > tolerance {
                return Err(Error::InvalidModel(format!(
                    "eigenpair {i} has relative defect {:e} above {:e}",
                    defect.as_f64(),
                    tolerance.as_f64()
                )));
            }
            if v.hermite_basis().is_some() {
                working_order = Some(v.order());
            }
        }
        Ok(Self {
            operator,
            eigenpairs,
            diffusion,
            metric,
            working_order,
        })
    }

    /// Hermite order states are cut back to between simulation steps.
    pub fn with_working_order(mut self, order: usize) -> Self {
        self.working_order = Some(order);
        self
    }

    pub fn operator(&self) -> &LinearOperator<S> {
        &self.operator
    }

    pub fn eigenpairs(&self) -> &[(SpectralState<S>, S)] {
        &self.eigenpairs
    }

    pub fn linear_drift(&self, y: &SpectralState<S>) -> Result<SpectralState<S>> {
        self.operator.apply(y)
    }
}

/// `‖L v − λ v‖ / ‖v‖` in the given metric.
pub fn eigen_defect<S: Real>(op: &LinearOperator<S>, v: &SpectralState<S>, lambda: S, metric: &Metric<S>) -> Result<S> {
    let mut r = op.apply(v)?;
    r.axpy(-lambda, v)?;
    let nv = metric.norm(v);
    Ok(if nv == S::zero() { metric.norm(&r) } else { metric.norm(&r) / nv })
}

impl<S: Real> SpdeModel<S> for LinearEigenModel<S> {
    fn noise_dim(&self) -> usize {
        self.diffusion.len()
    }

    fn working_order(&self) -> Option<usize> {
        self.working_order
    }

    fn metric(&self) -> Metric<S> {
        self.metric
    }

    fn drift(&self, y: &SpectralState<S>) -> Result<SpectralState<S>> {
        self.linear_drift(y)
    }

    fn diffusion(&self, y: &SpectralState<S>) -> Result<Vec<SpectralState<S>>> {
        self.diffusion.iter().map(|f| f.eval(y)).collect()
    }

    fn diffusion_derivative(&self, j: usize, _y: &SpectralState<S>, u: &SpectralState<S>) -> Result<Option<SpectralState<S>>> {
        self.diffusion[j].derivative(u).map(Some)
    }
}
