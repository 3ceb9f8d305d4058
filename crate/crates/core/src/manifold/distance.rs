//! Distance from a state to the manifold by damped Gauss–Newton.

use super::Manifold;
use crate::error::Result;
use crate::function_space::SpectralState;
use crate::linalg::SquareMatrix;
use crate::scalar::{euclid, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceOptions<S> {
    pub max_iterations: usize,
    /// Converged once a step satisfies `‖δ‖ <= step_tolerance (1 + ‖x‖)`.
    pub step_tolerance: S,
}

impl<S: Real> Default for DistanceOptions<S> {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            step_tolerance: S::lit(1e-12),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldDistance<S> {
    /// Best chart point found.
    pub point: Vec<S>,
    /// `‖φ(point) - y‖` in the manifold metric.
    pub distance: S,
    pub converged: bool,
    pub iterations: usize,
}

impl<S: Real> Manifold<S> {
    /// Minimizes `‖φ(x) - y‖` over the chart starting at `x0`.
    ///
    /// Levenberg–Marquardt damping follows a fixed schedule: divided by 10
    /// after an accepted step, multiplied by 10 after a rejected one. The
    /// iteration is deterministic in `(y, x0, options)`.
    pub fn distance(&self, y: &SpectralState<S>, x0: &[S], options: &DistanceOptions<S>) -> Result<ManifoldDistance<S>> {
        let m = self.dim();
        let mut x = x0.to_vec();
        let mut r = &self.eval(&x)? - y;
        let mut cost = self.metric.inner(&r, &r);
        let mut damping = S::lit(1e-6);
        let mut converged = cost == S::zero();
        let mut iterations = 0;
        while !converged && iterations < options.max_iterations {
            iterations += 1;
            let frame = match self.jacobian(&x) {
                Ok(f) => f,
                Err(_) => break,
            };
            let grad: Vec<S> = frame.columns().iter().map(|t| self.metric.inner(t, &r)).collect();
            let gram = frame.gram();
            let mut step_accepted = false;
            while damping <= S::lit(1e12) {
                let damped = SquareMatrix::from_fn(m, |i, j| {
                    let g = gram.get(i, j);
                    if i == j {
                        g * (S::one() + damping)
                    } else {
                        g
                    }
                });
                let Some(neg_step) = damped.cholesky_solve(&grad) else {
                    damping *= S::lit(10.0);
                    continue;
                };
                let candidate: Vec<S> = x.iter().zip(&neg_step).map(|(&xi, &s)| xi - s).collect();
                let r_new = &self.eval(&candidate)? - y;
                let cost_new = self.metric.inner(&r_new, &r_new);
                let small_step = euclid(&neg_step) <= options.step_tolerance * (S::one() + euclid(&x));
                if cost_new <= cost {
                    x = candidate;
                    r = r_new;
                    cost = cost_new;
                    damping = (damping / S::lit(10.0)).max(S::lit(1e-12));
                    step_accepted = true;
                    converged = small_step || cost == S::zero();
                    break;
                }
                if small_step {
                    // No descent even for a negligible step: stationary.
                    converged = true;
                    break;
                }
                damping *= S::lit(10.0);
            }
            if !step_accepted && !converged {
                break;
            }
        }
        Ok(ManifoldDistance {
            point: x,
            distance: cost.max(S::zero()).sqrt(),
            converged,
            iterations,
        })
    }
}
