use crate::error::{Error, Result};
use crate::function_space::{Metric, SpectralState};
use crate::linalg::SquareMatrix;
use crate::scalar::Real;

/// Columns of `Dφ(x)` with their Gram matrix in the projection metric.
#[derive(Clone, Debug)]
pub struct TangentFrame<S> {
    base_point: Vec<S>,
    columns: Vec<SpectralState<S>>,
    gram: SquareMatrix<S>,
    metric: Metric<S>,
    smallest_singular: S,
    condition: S,
}

/// Least-squares decomposition `v = Dφ(x) c + n` with `n ⟂ T_yM`.
#[derive(Clone, Debug)]
pub struct TangentProjection<S> {
    pub coords: Vec<S>,
    /// Norm of the normal part `n`.
    pub residual: S,
    /// Set when the Gram matrix condition number exceeds the warning level.
    pub ill_conditioned: bool,
}

impl<S: Real> TangentFrame<S> {
    /// Builds the frame, rejecting charts whose smallest singular value is
    /// below `rank_floor`.
    pub fn new(base_point: Vec<S>, columns: Vec<SpectralState<S>>, metric: Metric<S>, rank_floor: S) -> Result<Self> {
        let m = columns.len();
        let gram = SquareMatrix::from_fn(m, |i, j| metric.inner(&columns[i], &columns[j]));
        let ev = gram.symmetric_eigenvalues();
        let lo = ev.first().copied().unwrap_or(S::zero()).max(S::zero());
        let hi = ev.last().copied().unwrap_or(S::zero());
        let smallest_singular = lo.sqrt();
        if !(smallest_singular >= rank_floor) || m == 0 {
            return Err(Error::DegenerateChart {
                x: base_point.iter().map(|v| v.as_f64()).collect(),
                smallest_singular: smallest_singular.as_f64(),
                floor: rank_floor.as_f64(),
            });
        }
        Ok(Self {
            base_point,
            columns,
            gram,
            metric,
            smallest_singular,
            condition: hi / lo,
        })
    }

    pub fn base_point(&self) -> &[S] {
        &self.base_point
    }

    pub fn columns(&self) -> &[SpectralState<S>] {
        &self.columns
    }

    pub fn gram(&self) -> &SquareMatrix<S> {
        &self.gram
    }

    pub fn metric(&self) -> Metric<S> {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn smallest_singular_value(&self) -> S {
        self.smallest_singular
    }

    /// Condition number of the Gram matrix.
    pub fn condition(&self) -> S {
        self.condition
    }

    /// `Dφ(x) c`.
    pub fn apply(&self, coords: &[S]) -> SpectralState<S> {
        SpectralState::linear_combination(coords, &self.columns).expect("frame columns share a basis")
    }

    /// Solves the normal equations `G c = (<t_k, v>)_k` and measures the
    /// normal component directly as `‖v - Dφ c‖`.
    pub fn tangent_coordinates(&self, v: &SpectralState<S>) -> Result<TangentProjection<S>> {
        for c in &self.columns {
            c.check_compatible(v)?;
        }
        let rhs: Vec<S> = self.columns.iter().map(|t| self.metric.inner(t, v)).collect();
        let coords = self
            .gram
            .cholesky_solve(&rhs)
            .ok_or_else(|| Error::DegenerateChart {
                x: self.base_point.iter().map(|v| v.as_f64()).collect(),
                smallest_singular: self.smallest_singular.as_f64(),
                floor: 0.0,
            })?;
        let mut normal = v.clone();
        for (c, t) in coords.iter().zip(&self.columns) {
            normal.axpy(-*c, t)?;
        }
        Ok(TangentProjection {
            residual: self.metric.norm(&normal),
            ill_conditioned: self.condition > S::lit(CONDITION_WARNING),
            coords,
        })
    }
}

/// Gram condition number above which projections carry a warning.
pub const CONDITION_WARNING: f64 = 1e10;
