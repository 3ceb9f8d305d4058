//! Pointwise tangency conditions for a model along a chart, and sweeps of
//! them over a sample of chart points.

mod report;
mod sampling;

pub use report::{sweep, Failure, PointReport, SweepOptions, TangencyReport, Thresholds, Verdict};
pub use sampling::SamplingSpec;

use crate::error::{Error, Result};
use crate::function_space::{Metric, SpectralState};
use crate::manifold::{Manifold, TangentFrame};
use crate::models::{split_spill, stratonovich_correction, DaMode, SpdeModel};
use crate::scalar::{euclid, Real};

/// Which expression of the drift condition to project.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftForm {
    /// `L − ½ Σ_j D²φ(a^j, a^j)`.
    Bracket,
    /// `L − ½ Σ_j DA^j · A^j`.
    Stratonovich,
}

#[derive(Clone, Debug)]
pub struct DiffusionCheck<S> {
    /// `a[j]` are the chart coordinates of `A^j(φ(x))`.
    pub a: Vec<Vec<S>>,
    /// Relative normal component of each `A^j`.
    pub residuals: Vec<S>,
    /// Relative norm of each `A^j` above the working order.
    pub spill: Vec<S>,
    pub ill_conditioned: bool,
}

#[derive(Clone, Debug)]
pub struct DriftCheck<S> {
    pub form: DriftForm,
    pub beta: Vec<S>,
    pub residual: S,
    pub spill: S,
    pub ill_conditioned: bool,
}

fn ratio<S: Real>(num: S, den: S) -> S {
    if den == S::zero() {
        if num == S::zero() {
            S::zero()
        } else {
            S::infinity()
        }
    } else {
        num / den
    }
}

struct Projected<S> {
    coords: Vec<S>,
    normal: S,
    spill: S,
    ill_conditioned: bool,
}

/// Tangent coordinates of the part of `v` kept at the working order; the
/// discarded part is returned separately as spill.
fn project<S: Real>(frame: &TangentFrame<S>, v: &SpectralState<S>, order: Option<usize>, metric: &Metric<S>) -> Result<Projected<S>> {
    let (kept, spill) = split_spill(v, order, metric);
    let p = frame.tangent_coordinates(&kept)?;
    Ok(Projected {
        coords: p.coords,
        normal: p.residual,
        spill,
        ill_conditioned: p.ill_conditioned,
    })
}

pub fn check_diffusion_tangency<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    x: &[S],
) -> Result<DiffusionCheck<S>> {
    let frame = manifold.jacobian(x)?;
    let y = manifold.eval(x)?;
    diffusion_on_frame(model, &frame, &y)
}

fn diffusion_on_frame<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    frame: &TangentFrame<S>,
    y: &SpectralState<S>,
) -> Result<DiffusionCheck<S>> {
    let metric = model.metric();
    let order = model.working_order();
    let mut out = DiffusionCheck {
        a: Vec::new(),
        residuals: Vec::new(),
        spill: Vec::new(),
        ill_conditioned: false,
    };
    for field in model.diffusion(y)? {
        let norm = metric.norm(&field);
        let p = project(frame, &field, order, &metric)?;
        out.a.push(p.coords);
        out.residuals.push(ratio(p.normal, norm));
        out.spill.push(ratio(p.spill, norm));
        out.ill_conditioned |= p.ill_conditioned;
    }
    Ok(out)
}

/// Drift condition in the requested form; needs the diffusion coordinates `a`
/// from [`check_diffusion_tangency`] at the same point.
pub fn check_drift_tangency<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    x: &[S],
    a: &[Vec<S>],
    form: DriftForm,
    da_mode: DaMode,
) -> Result<DriftCheck<S>> {
    let frame = manifold.jacobian(x)?;
    let y = manifold.eval(x)?;
    drift_on_frame(model, manifold, &frame, &y, a, form, da_mode)
}

fn drift_on_frame<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    frame: &TangentFrame<S>,
    y: &SpectralState<S>,
    a: &[Vec<S>],
    form: DriftForm,
    da_mode: DaMode,
) -> Result<DriftCheck<S>> {
    let x = frame.base_point();
    let metric = model.metric();
    let drift = model.drift(y)?;
    let mut v = drift.clone();
    let mut scale = metric.norm(&drift);
    match form {
        DriftForm::Bracket => {
            let hessian = if a.iter().any(|aj| aj.iter().any(|c| *c != S::zero())) {
                Some(manifold.hessian(x)?)
            } else {
                None
            };
            for aj in a {
                if let Some(h) = &hessian {
                    let b = h.contract(aj, aj);
                    scale += S::lit(0.5) * metric.norm(&b);
                    v.axpy(-S::lit(0.5), &b)?;
                }
            }
        }
        DriftForm::Stratonovich => {
            let correction = stratonovich_correction(model, y, da_mode)?;
            if correction.step_sensitive {
                return Err(Error::InconsistentForms(format!(
                    "finite-difference DA·A is step sensitive ({:e})",
                    correction.step_sensitivity.map_or(0.0, |s| s.as_f64())
                )));
            }
            // Individual terms enter the scale so that cancellation between
            // drift and correction does not inflate the relative residual.
            for (j, field) in model.diffusion(y)?.iter().enumerate() {
                if let Some(da) = model.diffusion_derivative(j, y, field)? {
                    scale += S::lit(0.5) * metric.norm(&da);
                }
            }
            if matches!(da_mode, DaMode::FiniteDifference) {
                scale += S::lit(0.5) * metric.norm(&correction.value);
            }
            v.axpy(-S::lit(0.5), &correction.value)?;
        }
    }
    let p = project(frame, &v, model.working_order(), &metric)?;
    let mut beta = p.coords;
    if form == DriftForm::Stratonovich {
        // DA·A = Dφ(Da·a) + D²φ(a,a): the tangent part carries −½ Σ Da·a.
        let da_a = chart_derivative_of_a(model, manifold, x, a)?;
        for (b, c) in beta.iter_mut().zip(da_a) {
            *b += S::lit(0.5) * c;
        }
    }
    Ok(DriftCheck {
        form,
        beta,
        residual: ratio(p.normal, scale),
        spill: ratio(p.spill, scale),
        ill_conditioned: p.ill_conditioned,
    })
}

/// `Σ_j Da^j(x) a^j(x)` by central differences along `a^j`.
fn chart_derivative_of_a<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    x: &[S],
    a: &[Vec<S>],
) -> Result<Vec<S>> {
    let m = x.len();
    let mut total = vec![S::zero(); m];
    for (j, aj) in a.iter().enumerate() {
        let len = euclid(aj);
        if len == S::zero() {
            continue;
        }
        let h = S::epsilon().cbrt() / len.max(S::one());
        let shifted = |sign: S| -> Result<Vec<S>> {
            let xs: Vec<S> = x.iter().zip(aj).map(|(&xi, &ai)| xi + sign * h * ai).collect();
            Ok(check_diffusion_tangency(model, manifold, &xs)?.a.swap_remove(j))
        };
        let plus = shifted(S::one())?;
        let minus = shifted(-S::one())?;
        for k in 0..m {
            total[k] += (plus[k] - minus[k]) / (h + h);
        }
    }
    Ok(total)
}

/// Runs both drift forms and fails if they disagree beyond `tolerance` in the
/// residual or in `β`.
pub fn check_drift_forms<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    x: &[S],
    a: &[Vec<S>],
    da_mode: DaMode,
    tolerance: S,
) -> Result<(DriftCheck<S>, DriftCheck<S>)> {
    let frame = manifold.jacobian(x)?;
    let y = manifold.eval(x)?;
    forms_on_frame(model, manifold, &frame, &y, a, da_mode, tolerance)
}

fn forms_on_frame<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    frame: &TangentFrame<S>,
    y: &SpectralState<S>,
    a: &[Vec<S>],
    da_mode: DaMode,
    tolerance: S,
) -> Result<(DriftCheck<S>, DriftCheck<S>)> {
    let x = frame.base_point();
    let bracket = drift_on_frame(model, manifold, frame, y, a, DriftForm::Bracket, da_mode)?;
    let strat = drift_on_frame(model, manifold, frame, y, a, DriftForm::Stratonovich, da_mode)?;
    let dr = (bracket.residual - strat.residual).abs();
    let diff: Vec<S> = bracket.beta.iter().zip(&strat.beta).map(|(p, q)| *p - *q).collect();
    let db = euclid(&diff) / (S::one() + euclid(&bracket.beta));
    if dr > tolerance || db > tolerance {
        return Err(Error::InconsistentForms(format!(
            "bracket and stratonovich forms disagree at x = {:?}: residual gap {:e}, beta gap {:e} (spill {:e} / {:e})",
            x.iter().map(|v| v.as_f64()).collect::<Vec<_>>(),
            dr.as_f64(),
            db.as_f64(),
            bracket.spill.as_f64(),
            strat.spill.as_f64()
        )));
    }
    Ok((bracket, strat))
}

/// `(a(x), β(x))` for the reduced coordinate SDE `dx = β dt + Σ_j a^j dW^j`.
pub fn reduced_coefficients<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    x: &[S],
) -> Result<(Vec<Vec<S>>, Vec<S>)> {
    let frame = manifold.jacobian(x)?;
    let y = manifold.eval(x)?;
    let diff = diffusion_on_frame(model, &frame, &y)?;
    let drift = drift_on_frame(model, manifold, &frame, &y, &diff.a, DriftForm::Bracket, DaMode::Analytic)?;
    Ok((diff.a, drift.beta))
}

#[cfg(test)]
mod tests;
