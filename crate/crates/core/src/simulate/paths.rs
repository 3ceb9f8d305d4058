use super::{SimConfig, WienerIncrements, COUPLED_CHANNEL, INDEPENDENT_CHANNEL};
use crate::error::Result;
use crate::function_space::SpectralState;
use crate::manifold::{ChartDomain, Manifold};
use crate::models::SpdeModel;
use crate::scalar::Real;
use crate::tangency::reduced_coefficients;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct FullPath<S> {
    pub times: Vec<f64>,
    pub states: Vec<SpectralState<S>>,
    /// First time the norm left the explosion ceiling.
    pub exploded_at: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ReducedPath<S> {
    pub times: Vec<f64>,
    pub x: Vec<Vec<S>>,
    /// First time the path left the chart domain.
    pub exited_at: Option<f64>,
}

/// `y + L(y) dt + Σ_j A^j(y) ΔW^j`, cut back to the model's working order.
pub fn euler_step<S: Real, M: SpdeModel<S> + ?Sized>(model: &M, y: &SpectralState<S>, dt: S, dw: &[S]) -> Result<SpectralState<S>> {
    let mut next = y.clone();
    next.axpy(dt, &model.drift(y)?)?;
    if dw.iter().any(|w| *w != S::zero()) {
        for (a, &w) in model.diffusion(y)?.iter().zip(dw) {
            next.axpy(w, a)?;
        }
    }
    Ok(match model.working_order() {
        Some(n) if next.hermite_basis().is_some() && next.order() != n => next.with_order(n),
        _ => next,
    })
}

fn recorded(step: usize, steps: usize, every: usize) -> bool {
    step % every == 0 || step == steps
}

pub fn simulate_full<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    y0: &SpectralState<S>,
    cfg: &SimConfig,
    noise: &WienerIncrements,
    path: usize,
) -> Result<FullPath<S>> {
    cfg.validate()?;
    let steps = cfg.steps();
    let j = model.noise_dim();
    let metric = model.metric();
    let dt = S::lit(cfg.dt);
    let ceiling = S::lit(cfg.explosion_ceiling);
    let mut rng = noise.path(path, COUPLED_CHANNEL);
    let mut y = match model.working_order() {
        Some(n) if y0.hermite_basis().is_some() => y0.with_order(n),
        _ => y0.clone(),
    };
    let mut out = FullPath {
        times: vec![0.0],
        states: vec![y.clone()],
        exploded_at: None,
    };
    for k in 0..steps {
        let dw: Vec<S> = rng.increments(k, j).into_iter().map(S::lit).collect();
        let next = euler_step(model, &y, dt, &dw)?;
        let t = (k + 1) as f64 * cfg.dt;
        let norm = metric.norm(&next);
        if !norm.is_finite() || norm > ceiling {
            out.exploded_at = Some(t);
            break;
        }
        y = next;
        if recorded(k + 1, steps, cfg.record_every) {
            out.times.push(t);
            out.states.push(y.clone());
        }
    }
    Ok(out)
}

/// All `cfg.paths` full paths, in path order.
pub fn simulate_ensemble<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    y0: &SpectralState<S>,
    cfg: &SimConfig,
    noise: &WienerIncrements,
) -> Result<Vec<FullPath<S>>> {
    (0..cfg.paths)
        .into_par_iter()
        .map(|p| simulate_full(model, y0, cfg, noise, p))
        .collect()
}

/// Euler–Maruyama for `dx = β(x) dt + Σ_j a^j(x) dW^j` with coefficients from
/// the tangency checker.
pub fn simulate_reduced<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    x0: &[S],
    cfg: &SimConfig,
    noise: &WienerIncrements,
    path: usize,
) -> Result<ReducedPath<S>> {
    simulate_reduced_with(
        |x| reduced_coefficients(model, manifold, x),
        manifold.domain(),
        x0,
        cfg,
        noise,
        path,
    )
}

/// Reduced simulation for arbitrary coefficients `x ↦ (a(x), β(x))`.
pub fn simulate_reduced_with<S: Real>(
    coefficients: impl Fn(&[S]) -> Result<(Vec<Vec<S>>, Vec<S>)>,
    domain: &ChartDomain<S>,
    x0: &[S],
    cfg: &SimConfig,
    noise: &WienerIncrements,
    path: usize,
) -> Result<ReducedPath<S>> {
    cfg.validate()?;
    let steps = cfg.steps();
    let dt = S::lit(cfg.dt);
    let channel = if cfg.coupling { COUPLED_CHANNEL } else { INDEPENDENT_CHANNEL };
    let mut rng = noise.path(path, channel);
    let mut x = x0.to_vec();
    let mut out = ReducedPath {
        times: vec![0.0],
        x: vec![x.clone()],
        exited_at: None,
    };
    for k in 0..steps {
        let (a, beta) = coefficients(&x)?;
        let mut next: Vec<S> = x.iter().zip(&beta).map(|(&xi, &bi)| xi + bi * dt).collect();
        for (j, aj) in a.iter().enumerate() {
            let w = S::lit(rng.increment(k, j));
            for (n, &c) in next.iter_mut().zip(aj) {
                *n += c * w;
            }
        }
        let t = (k + 1) as f64 * cfg.dt;
        if !domain.contains(&next) {
            out.exited_at = Some(t);
            break;
        }
        x = next;
        if recorded(k + 1, steps, cfg.record_every) {
            out.times.push(t);
            out.x.push(x.clone());
        }
    }
    Ok(out)
}
