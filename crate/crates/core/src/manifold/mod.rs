//! Finite-dimensional submanifolds given by a single local chart.

mod chart;
mod distance;
mod frame;

use std::sync::Arc;

pub use chart::{ChartDomain, ChartKind, CustomChart, Hessian, LinearSpanChart, Parametrization, TranslationChart};
pub use distance::{DistanceOptions, ManifoldDistance};
pub use frame::{TangentFrame, TangentProjection, CONDITION_WARNING};

use crate::error::Result;
use crate::function_space::{Metric, SpectralState};
use crate::scalar::Real;

/// Finite-difference steps and rank floor used by [`Manifold`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartOptions<S> {
    pub fd_step_jacobian: S,
    pub fd_step_hessian: S,
    /// Minimum admissible smallest singular value of `Dφ(x)`.
    pub rank_floor: S,
    /// Ignore analytic derivatives and always difference the chart.
    pub force_finite_differences: bool,
}

impl<S: Real> Default for ChartOptions<S> {
    fn default() -> Self {
        Self {
            fd_step_jacobian: S::lit(1e-4),
            fd_step_hessian: S::lit(1e-3),
            rank_floor: S::lit(1e-8),
            force_finite_differences: false,
        }
    }
}

/// A chart together with the inner product used for projections.
#[derive(Clone)]
pub struct Manifold<S> {
    chart: Arc<dyn Parametrization<S>>,
    metric: Metric<S>,
    options: ChartOptions<S>,
}

impl<S: Real> std::fmt::Debug for Manifold<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Manifold")
            .field("kind", &self.chart.kind())
            .field("dim", &self.chart.dim())
            .field("metric", &self.metric)
            .finish()
    }
}

impl<S: Real> Manifold<S> {
    pub fn new(chart: Arc<dyn Parametrization<S>>, metric: Metric<S>) -> Self {
        Self {
            chart,
            metric,
            options: ChartOptions::default(),
        }
    }

    pub fn with_options(mut self, options: ChartOptions<S>) -> Self {
        self.options = options;
        self
    }

    pub fn chart(&self) -> &Arc<dyn Parametrization<S>> {
        &self.chart
    }

    pub fn metric(&self) -> Metric<S> {
        self.metric
    }

    pub fn options(&self) -> &ChartOptions<S> {
        &self.options
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn domain(&self) -> &ChartDomain<S> {
        self.chart.domain()
    }

    pub fn kind(&self) -> ChartKind {
        self.chart.kind()
    }

    pub fn eval(&self, x: &[S]) -> Result<SpectralState<S>> {
        self.chart.eval(x)
    }

    /// Central-difference Jacobian columns with step `h`.
    pub fn fd_jacobian(&self, x: &[S], h: S) -> Result<Vec<SpectralState<S>>> {
        let two_h = h + h;
        (0..self.dim())
            .map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                let diff = &self.chart.eval(&xp)? - &self.chart.eval(&xm)?;
                Ok(diff.scaled(S::one() / two_h))
            })
            .collect()
    }

    /// Central-difference Hessian with step `h`.
    pub fn fd_hessian(&self, x: &[S], h: S) -> Result<Hessian<S>> {
        let center = self.chart.eval(x)?;
        let shifted = |steps: &[(usize, S)]| -> Result<SpectralState<S>> {
            let mut xs = x.to_vec();
            for &(i, s) in steps {
                xs[i] += s;
            }
            self.chart.eval(&xs)
        };
        Hessian::from_fn(self.dim(), |k, l| {
            if k == l {
                let mut s = &shifted(&[(k, h)])? + &shifted(&[(k, -h)])?;
                s.axpy(-S::lit(2.0), &center)?;
                Ok(s.scaled(S::one() / (h * h)))
            } else {
                let mut s = &shifted(&[(k, h), (l, h)])? - &shifted(&[(k, h), (l, -h)])?;
                s.axpy(-S::one(), &shifted(&[(k, -h), (l, h)])?)?;
                s.axpy(S::one(), &shifted(&[(k, -h), (l, -h)])?)?;
                Ok(s.scaled(S::one() / (S::lit(4.0) * h * h)))
            }
        })
    }

    /// Tangent frame at `x`: analytic columns when the chart supplies them,
    /// central differences otherwise.
    pub fn jacobian(&self, x: &[S]) -> Result<TangentFrame<S>> {
        let columns = match self.analytic_columns(x)? {
            Some(c) => c,
            None => self.fd_jacobian(x, self.options.fd_step_jacobian)?,
        };
        TangentFrame::new(x.to_vec(), columns, self.metric, self.options.rank_floor)
    }

    fn analytic_columns(&self, x: &[S]) -> Result<Option<Vec<SpectralState<S>>>> {
        if self.options.force_finite_differences {
            return Ok(None);
        }
        self.chart.analytic_jacobian(x)
    }

    pub fn hessian(&self, x: &[S]) -> Result<Hessian<S>> {
        if !self.options.force_finite_differences {
            if let Some(h) = self.chart.analytic_hessian(x)? {
                return Ok(h);
            }
        }
        self.fd_hessian(x, self.options.fd_step_hessian)
    }

    /// Local representative of the bracket: `D²φ(x)(a, b)` where `a`, `b` are
    /// already the tangent coordinates `Dφ(x)^{-1} A(y)`, `Dφ(x)^{-1} B(y)`.
    pub fn bracket(&self, x: &[S], a: &[S], b: &[S]) -> Result<SpectralState<S>> {
        Ok(self.hessian(x)?.contract(a, b))
    }
}

#[cfg(test)]
mod tests;
