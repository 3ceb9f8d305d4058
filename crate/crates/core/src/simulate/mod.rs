//! Euler–Maruyama simulation of the truncated SPDE and of the reduced
//! coordinate SDE on a chart, driven by shared Wiener increments.

mod coupled;
mod noise;
mod paths;

pub use coupled::{coupled_compare, eigen_decay_error, refinement_scheme_error, trajectory_csv, CoupledRun, EnsembleSummary, SchemeErrorEstimate, TrajectoryRecord};
pub use noise::{PathNoise, WienerIncrements, COUPLED_CHANNEL, INDEPENDENT_CHANNEL};
pub use paths::{euler_step, simulate_ensemble, simulate_full, simulate_reduced, simulate_reduced_with, FullPath, ReducedPath};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub horizon: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
    /// Share Wiener increments between the full and reduced runs.
    pub coupling: bool,
    /// Record every k-th step (the final step is always recorded).
    pub record_every: usize,
    /// Paths whose H-norm exceeds this are stopped and flagged as exploded.
    pub explosion_ceiling: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            dt: 1e-3,
            paths: 1,
            seed: 0,
            coupling: true,
            record_every: 1,
            explosion_ceiling: 1e6,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSimConfig(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon >= self.dt) || !self.horizon.is_finite() {
            return bad(format!("horizon {} must be at least dt {}", self.horizon, self.dt));
        }
        let ratio = self.horizon / self.dt;
        if (ratio - ratio.round()).abs() > 1e-6 * ratio {
            return bad(format!("horizon {} is not a whole number of steps of {}", self.horizon, self.dt));
        }
        if self.paths == 0 {
            return bad("paths must be at least 1".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if !(self.explosion_ceiling > 0.0) {
            return bad("explosion_ceiling must be positive".into());
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Same Brownian paths, sampled at half the step.
    pub fn halved(&self) -> Self {
        Self {
            dt: self.dt / 2.0,
            record_every: self.record_every * 2,
            ..self.clone()
        }
    }

    pub fn noise(&self) -> WienerIncrements {
        WienerIncrements::new(self.seed, self.dt)
    }
}
