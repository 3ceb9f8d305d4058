use super::{diffusion_on_frame, drift_on_frame, forms_on_frame, DriftCheck, DriftForm, SamplingSpec};
use crate::error::{Error, Result};
use crate::manifold::Manifold;
use crate::models::{DaMode, SpdeModel};
use crate::scalar::Real;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Residual floor for cases without truncation.
    pub base: f64,
    /// Hermite models use `max(base, spill_factor × spill)` per point.
    pub spill_factor: f64,
    /// Allowed gap between the two drift forms.
    pub form_tolerance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            base: 1e-6,
            spill_factor: 10.0,
            form_tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepOptions {
    pub sampling: SamplingSpec,
    pub forms: Vec<DriftForm>,
    pub da_mode: DaMode,
    pub thresholds: Thresholds,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            sampling: SamplingSpec::Default,
            forms: vec![DriftForm::Bracket, DriftForm::Stratonovich],
            da_mode: DaMode::Analytic,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Tangent,
    NotTangent,
    /// No sampled point failed, but some could not be evaluated.
    Inconclusive,
}

impl Verdict {
    /// 0 tangent, 2 not tangent, 1 otherwise.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Tangent => 0,
            Verdict::NotTangent => 2,
            Verdict::Inconclusive => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Tangent => "tangent",
            Verdict::NotTangent => "not_tangent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub x: Vec<f64>,
    /// `a[j]` in chart coordinates.
    pub a: Vec<Vec<f64>>,
    pub rho_j: Vec<f64>,
    /// Largest drift residual over the evaluated forms.
    pub rho_l: f64,
    pub rho_l_bracket: Option<f64>,
    pub rho_l_stratonovich: Option<f64>,
    pub beta: Vec<f64>,
    pub beta_stratonovich: Option<Vec<f64>>,
    /// Largest relative spill of any projected field.
    pub spill: f64,
    pub threshold: f64,
    pub max_residual: f64,
    pub tangent: bool,
    pub ill_conditioned: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub x: Vec<f64>,
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    pub chart_dim: usize,
    pub noise_dim: usize,
    pub forms: Vec<DriftForm>,
    pub da_mode: DaMode,
    pub thresholds: Thresholds,
    pub points: Vec<PointReport>,
    pub failures: Vec<Failure>,
    pub max_rho_j: f64,
    pub max_rho_l: f64,
    pub max_residual: f64,
    pub max_spill: f64,
    /// Largest gap between bracket and Stratonovich residuals, when both ran.
    pub max_form_gap: Option<f64>,
    pub verdict: Verdict,
}

fn to_f64<S: Real>(v: &[S]) -> Vec<f64> {
    v.iter().map(|s| s.as_f64()).collect()
}

fn evaluate_point<S: Real, M: SpdeModel<S> + ?Sized>(
    model: &M,
    manifold: &Manifold<S>,
    index: usize,
    x: &[S],
    opts: &SweepOptions,
) -> Result<PointReport> {
    let frame = manifold.jacobian(x)?;
    let y = manifold.eval(x)?;
    let diff = diffusion_on_frame(model, &frame, &y)?;
    let want = |f| opts.forms.contains(&f);
    let (bracket, strat): (Option<DriftCheck<S>>, Option<DriftCheck<S>>) =
        match (want(DriftForm::Bracket), want(DriftForm::Stratonovich)) {
            (true, true) => {
                let (b, s) = forms_on_frame(model, manifold, &frame, &y, &diff.a, opts.da_mode, S::lit(opts.thresholds.form_tolerance))?;
                (Some(b), Some(s))
            }
            (b, s) => (
                b.then(|| drift_on_frame(model, manifold, &frame, &y, &diff.a, DriftForm::Bracket, opts.da_mode))
                    .transpose()?,
                s.then(|| drift_on_frame(model, manifold, &frame, &y, &diff.a, DriftForm::Stratonovich, opts.da_mode))
                    .transpose()?,
            ),
        };
    let rho_j = to_f64(&diff.residuals);
    let drift_checks: Vec<&DriftCheck<S>> = bracket.iter().chain(strat.iter()).collect();
    let rho_l = drift_checks.iter().map(|c| c.residual.as_f64()).fold(0.0, f64::max);
    let spill = diff
        .spill
        .iter()
        .map(|s| s.as_f64())
        .chain(drift_checks.iter().map(|c| c.spill.as_f64()))
        .fold(0.0, f64::max);
    let threshold = if model.working_order().is_some() {
        opts.thresholds.base.max(opts.thresholds.spill_factor * spill)
    } else {
        opts.thresholds.base
    };
    let max_residual = rho_j.iter().copied().fold(rho_l, f64::max);
    let beta = bracket.as_ref().or(strat.as_ref()).map(|c| to_f64(&c.beta)).unwrap_or_default();
    Ok(PointReport {
        index,
        x: to_f64(x),
        a: diff.a.iter().map(|v| to_f64(v)).collect(),
        rho_j,
        rho_l,
        rho_l_bracket: bracket.as_ref().map(|c| c.residual.as_f64()),
        rho_l_stratonovich: strat.as_ref().map(|c| c.residual.as_f64()),
        beta,
        beta_stratonovich: if bracket.is_some() { strat.as_ref().map(|c| to_f64(&c.beta)) } else { None },
        spill,
        threshold,
        max_residual,
        tangent: max_residual <= threshold,
        ill_conditioned: diff.ill_conditioned || drift_checks.iter().any(|c| c.ill_conditioned),
    })
}

/// Evaluates both conditions at every sample point. Degenerate chart points
/// and form disagreements are recorded as failures; other errors abort.
pub fn sweep<S: Real, M: SpdeModel<S> + ?Sized>(model: &M, manifold: &Manifold<S>, opts: &SweepOptions) -> Result<TangencyReport> {
    let points = opts.sampling.points(manifold.domain())?;
    let outcomes: Vec<Result<PointReport>> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| evaluate_point(model, manifold, i, x, opts))
        .collect();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => reports.push(r),
            Err(e @ (Error::DegenerateChart { .. } | Error::InconsistentForms(_))) => failures.push(Failure {
                index: i,
                x: to_f64(&points[i]),
                kind: match e {
                    Error::DegenerateChart { .. } => "degenerate_chart".into(),
                    _ => "inconsistent_forms".into(),
                },
                message: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    let max = |f: &dyn Fn(&PointReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
    let max_rho_j = max(&|r| r.rho_j.iter().copied().fold(0.0, f64::max));
    let max_rho_l = max(&|r| r.rho_l);
    let max_residual = max(&|r| r.max_residual);
    let max_spill = max(&|r| r.spill);
    let max_form_gap = reports
        .iter()
        .filter_map(|r| Some((r.rho_l_bracket? - r.rho_l_stratonovich?).abs()))
        .reduce(f64::max);
    let verdict = if reports.iter().any(|r| !r.tangent) {
        Verdict::NotTangent
    } else if !failures.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Tangent
    };
    Ok(TangencyReport {
        chart_dim: manifold.dim(),
        noise_dim: model.noise_dim(),
        forms: opts.forms.clone(),
        da_mode: opts.da_mode,
        thresholds: opts.thresholds,
        points: reports,
        failures,
        max_rho_j,
        max_rho_l,
        max_residual,
        max_spill,
        max_form_gap,
        verdict,
    })
}

fn cell(out: &mut String, v: Option<f64>) {
    out.push(',');
    if let Some(v) = v {
        let _ = write!(out, "{v:e}");
    }
}

impl TangencyReport {
    /// One row per sample point per noise coordinate (one row per point when `J = 0`).
    pub fn to_csv(&self) -> String {
        let m = self.chart_dim;
        let mut out = String::from("point,j");
        for k in 0..m {
            let _ = write!(out, ",x{}", k + 1);
        }
        out.push_str(",rho_j");
        for k in 0..m {
            let _ = write!(out, ",a{}", k + 1);
        }
        out.push_str(",rho_l,rho_l_bracket,rho_l_stratonovich");
        for k in 0..m {
            let _ = write!(out, ",beta{}", k + 1);
        }
        out.push_str(",spill,threshold,tangent\n");
        for p in &self.points {
            let rows = p.rho_j.len().max(1);
            for j in 0..rows {
                let _ = write!(out, "{}", p.index);
                out.push(',');
                if j < p.rho_j.len() {
                    let _ = write!(out, "{}", j + 1);
                }
                for &v in &p.x {
                    cell(&mut out, Some(v));
                }
                cell(&mut out, p.rho_j.get(j).copied());
                for k in 0..m {
                    cell(&mut out, p.a.get(j).map(|a| a[k]));
                }
                cell(&mut out, Some(p.rho_l));
                cell(&mut out, p.rho_l_bracket);
                cell(&mut out, p.rho_l_stratonovich);
                for k in 0..m {
                    cell(&mut out, p.beta.get(k).copied());
                }
                cell(&mut out, Some(p.spill));
                cell(&mut out, Some(p.threshold));
                let _ = writeln!(out, ",{}", p.tangent);
            }
        }
        out
    }
}
