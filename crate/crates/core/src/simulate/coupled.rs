use super::{simulate_full, simulate_reduced, SimConfig, WienerIncrements};
use crate::error::Result;
use crate::function_space::SpectralState;
use crate::manifold::{DistanceOptions, Manifold};
use crate::models::SpdeModel;
use crate::scalar::Real;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// One path of a coupled full/reduced run, on the common record grid.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord<S> {
    pub path: usize,
    pub times: Vec<f64>,
    pub full: Vec<SpectralState<S>>,
    pub reduced: Vec<Vec<S>>,
    pub lifted: Vec<SpectralState<S>>,
    /// `dist(Y_t, M)` and the chart point attaining it.
    pub distance: Vec<S>,
    pub nearest: Vec<Vec<S>>,
    /// `‖Y_t − φ(x_t)‖_H`.
    pub coupled_error: Vec<S>,
    pub exploded_at: Option<f64>,
    pub exited_at: Option<f64>,
    /// `min(horizon, exit, explosion)`.
    pub lifetime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub paths: usize,
    pub max_distance: f64,
    /// Mean over paths of the per-path maximum.
    pub mean_max_distance: f64,
    pub max_coupled_error: f64,
    pub mean_max_coupled_error: f64,
    pub exploded: usize,
    pub exited: usize,
    pub mean_lifetime: f64,
}

#[derive(Clone, Debug)]
pub struct CoupledRun<S> {
    pub records: Vec<TrajectoryRecord<S>>,
    pub summary: EnsembleSummary,
}

fn path_max<S: Real>(v: &[S]) -> f64 {
    v.iter().map(|s| s.as_f64()).fold(0.0, f64::max)
}

fn coupled_path<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    x0: &[S],
    cfg: &SimConfig,
    noise: &WienerIncrements,
    path: usize,
    dist_opts: &DistanceOptions<S>,
) -> Result<TrajectoryRecord<S>> {
    let y0 = manifold.eval(x0)?;
    let full = simulate_full(model, &y0, cfg, noise, path)?;
    let reduced = simulate_reduced(model, manifold, x0, cfg, noise, path)?;
    let len = full.times.len().min(reduced.times.len());
    let metric = manifold.metric();
    let mut rec = TrajectoryRecord {
        path,
        times: full.times[..len].to_vec(),
        full: full.states[..len].to_vec(),
        reduced: reduced.x[..len].to_vec(),
        lifted: Vec::with_capacity(len),
        distance: Vec::with_capacity(len),
        nearest: Vec::with_capacity(len),
        coupled_error: Vec::with_capacity(len),
        exploded_at: full.exploded_at,
        exited_at: reduced.exited_at,
        lifetime: [Some(cfg.horizon), full.exploded_at, reduced.exited_at]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min),
    };
    for (y, x) in rec.full.iter().zip(&rec.reduced) {
        let lifted = manifold.eval(x)?;
        rec.coupled_error.push(metric.norm(&(y - &lifted)));
        rec.lifted.push(lifted);
        let d = manifold.distance(y, x, dist_opts)?;
        rec.distance.push(d.distance);
        rec.nearest.push(d.point);
    }
    Ok(rec)
}

/// Full and reduced ensembles started at `φ(x0)` and `x0` on the same
/// increments (when `cfg.coupling`).
pub fn coupled_compare<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    x0: &[S],
    cfg: &SimConfig,
    noise: &WienerIncrements,
    dist_opts: &DistanceOptions<S>,
) -> Result<CoupledRun<S>> {
    cfg.validate()?;
    let records: Vec<TrajectoryRecord<S>> = (0..cfg.paths)
        .into_par_iter()
        .map(|p| coupled_path(model, manifold, x0, cfg, noise, p, dist_opts))
        .collect::<Result<_>>()?;
    let n = records.len() as f64;
    let summary = EnsembleSummary {
        paths: records.len(),
        max_distance: records.iter().map(|r| path_max(&r.distance)).fold(0.0, f64::max),
        mean_max_distance: records.iter().map(|r| path_max(&r.distance)).sum::<f64>() / n,
        max_coupled_error: records.iter().map(|r| path_max(&r.coupled_error)).fold(0.0, f64::max),
        mean_max_coupled_error: records.iter().map(|r| path_max(&r.coupled_error)).sum::<f64>() / n,
        exploded: records.iter().filter(|r| r.exploded_at.is_some()).count(),
        exited: records.iter().filter(|r| r.exited_at.is_some()).count(),
        mean_lifetime: records.iter().map(|r| r.lifetime).sum::<f64>() / n,
    };
    Ok(CoupledRun { records, summary })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeErrorEstimate {
    /// Per path, `sup_t ‖Y^{dt}_t − Y^{dt/2}_t‖_H` over the record grid; these
    /// are its ensemble max, mean and root mean square.
    pub max_gap: f64,
    pub mean_gap: f64,
    pub rms_gap: f64,
    /// `mean_gap / (1 − 2^{-1/2})`: strong error `E sup_t ‖Y^{dt}_t − Y_t‖`
    /// of the `dt` run, assuming order ½.
    pub extrapolated: f64,
}

/// Runs the full model at `dt` and `dt/2` on the same Brownian paths and
/// extrapolates the strong error of the `dt` run.
pub fn refinement_scheme_error<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    y0: &SpectralState<S>,
    cfg: &SimConfig,
) -> Result<SchemeErrorEstimate> {
    cfg.validate()?;
    let fine_cfg = cfg.halved();
    let coarse_noise = WienerIncrements::refined(cfg.seed, cfg.dt, 2);
    let fine_noise = WienerIncrements::new(cfg.seed, fine_cfg.dt);
    let metric = model.metric();
    let gaps: Vec<f64> = (0..cfg.paths)
        .into_par_iter()
        .map(|p| -> Result<f64> {
            let coarse = simulate_full(model, y0, cfg, &coarse_noise, p)?;
            let fine = simulate_full(model, y0, &fine_cfg, &fine_noise, p)?;
            Ok(coarse
                .states
                .iter()
                .zip(&fine.states)
                .map(|(a, b)| metric.norm(&(a - b)).as_f64())
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let n = gaps.len() as f64;
    let mean_gap = gaps.iter().sum::<f64>() / n;
    Ok(SchemeErrorEstimate {
        max_gap: gaps.iter().copied().fold(0.0, f64::max),
        mean_gap,
        rms_gap: (gaps.iter().map(|g| g * g).sum::<f64>() / n).sqrt(),
        extrapolated: mean_gap / (1.0 - std::f64::consts::FRAC_1_SQRT_2),
    })
}

/// Tidy CSV: one row per path per recorded time.
pub fn trajectory_csv<S: Real>(records: &[TrajectoryRecord<S>], metric: &crate::function_space::Metric<S>) -> String {
    let m = records.first().and_then(|r| r.reduced.first()).map_or(0, |x| x.len());
    let mut out = String::from("path,t");
    for k in 0..m {
        let _ = write!(out, ",x{}", k + 1);
    }
    for k in 0..m {
        let _ = write!(out, ",nearest{}", k + 1);
    }
    out.push_str(",distance,coupled_error,full_norm\n");
    for r in records {
        for i in 0..r.times.len() {
            let _ = write!(out, "{},{:e}", r.path, r.times[i]);
            for v in r.reduced[i].iter().chain(&r.nearest[i]) {
                let _ = write!(out, ",{:e}", v.as_f64());
            }
            let _ = writeln!(
                out,
                ",{:e},{:e},{:e}",
                r.distance[i].as_f64(),
                r.coupled_error[i].as_f64(),
                metric.norm(&r.full[i]).as_f64()
            );
        }
    }
    out
}

/// `max_t ‖Y_t − e^{λt} y0‖ / max_t ‖e^{λt} y0‖` along one path.
pub fn eigen_decay_error<S: Real>(
    times: &[f64],
    states: &[SpectralState<S>],
    y0: &SpectralState<S>,
    lambda: S,
    metric: &crate::function_space::Metric<S>,
) -> S {
    let mut err = S::zero();
    let mut scale = S::zero();
    for (&t, y) in times.iter().zip(states) {
        let exact = y0.scaled((lambda * S::lit(t)).exp());
        err = err.max(metric.norm(&(y - &exact)));
        scale = scale.max(metric.norm(&exact));
    }
    if scale == S::zero() {
        err
    } else {
        err / scale
    }
}
