//! JSON run configuration: model, chart, check and simulation sections, with
//! named presets that user keys are merge-patched onto.

use crate::error::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use spde_manifold::function_space::{DualField, MultiIndex, NormScale, SpectralState, StateDoc};
use spde_manifold::manifold::{ChartDomain, LinearSpanChart, Manifold, TranslationChart};
use spde_manifold::models::{grid_sine, DiffusionField, ItoTypeModel, LinearEigenModel, LinearOperator, PLaplaceModel, SpdeModel};
use spde_manifold::simulate::SimConfig;
use spde_manifold::tangency::SweepOptions;
use spde_manifold::{State, Submanifold};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelSpec,
    #[serde(default)]
    pub manifold: Option<ManifoldSpec>,
    #[serde(default)]
    pub check: SweepOptions,
    #[serde(default)]
    pub simulate: Option<SimulateSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Ito {
        d: usize,
        /// Hermite truncation order `N`.
        order: usize,
        /// Sobolev index of the scale `(S_{p+1}, S_{p+1/2}, S_p)`.
        #[serde(default)]
        p: f64,
        b: Vec<DualSpec>,
        /// `sigma[j][i]`.
        sigma: Vec<Vec<DualSpec>>,
    },
    PLaplace {
        p: f64,
        points: usize,
        #[serde(default)]
        diffusion: Vec<FieldSpec>,
    },
    LinearEigen {
        basis: BasisSpec,
        operator: OperatorSpec,
        #[serde(default)]
        eigenpairs: Vec<EigenpairSpec>,
        #[serde(default)]
        diffusion: Vec<FieldSpec>,
        #[serde(default = "default_eigen_tolerance")]
        tolerance: f64,
        /// Sobolev index for Hermite bases.
        #[serde(default)]
        p: f64,
    },
}

fn default_eigen_tolerance() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisSpec {
    Hermite { d: usize, order: usize },
    Grid { points: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    HermiteOscillator,
    DirichletLaplacian,
    Diagonal { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenpairSpec {
    pub vector: StateSpec,
    pub value: f64,
}

fn one() -> f64 {
    1.0
}

/// A state in the model's basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    HermiteFunction {
        index: Vec<usize>,
        #[serde(default = "one")]
        scale: f64,
    },
    GridSine {
        k: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    Explicit { state: StateDoc },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Zero,
    Constant { direction: StateSpec },
    Scaled { c: f64 },
    RankOne { functional: StateSpec, direction: StateSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DualSpec {
    Zero,
    /// `value × ∫ y dx`.
    Constant { value: f64 },
    Dirac {
        at: Vec<f64>,
        #[serde(default = "one")]
        weight: f64,
    },
    Coefficients { state: StateDoc },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    /// `x ↦ τ_x Φ`.
    Translation { profile: StateSpec, domain: DomainSpec },
    /// `x ↦ Σ x_i v_i`.
    LinearSpan { vectors: Vec<StateSpec>, domain: DomainSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSpec {
    pub horizon: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
    pub coupling: bool,
    pub record_every: usize,
    pub explosion_ceiling: f64,
    /// Chart start point; defaults to the domain centre.
    pub x0: Option<Vec<f64>>,
    /// Start state for runs without a chart.
    pub y0: Option<StateSpec>,
    /// Also estimate the scheme error from a `dt/2` run.
    pub scheme_error: bool,
    pub distance_max_iterations: usize,
    pub distance_step_tolerance: f64,
}

impl Default for SimulateSpec {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            horizon: sim.horizon,
            dt: sim.dt,
            paths: sim.paths,
            seed: sim.seed,
            coupling: sim.coupling,
            record_every: sim.record_every,
            explosion_ceiling: sim.explosion_ceiling,
            x0: None,
            y0: None,
            scheme_error: false,
            distance_max_iterations: 50,
            distance_step_tolerance: 1e-12,
        }
    }
}

impl SimulateSpec {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            horizon: self.horizon,
            dt: self.dt,
            paths: self.paths,
            seed: self.seed,
            coupling: self.coupling,
            record_every: self.record_every,
            explosion_ceiling: self.explosion_ceiling,
        }
    }
}

pub const PRESETS: [&str; 5] = ["ito_translation_d1", "plaplace_p2_eigen", "negative_control", "heat", "zero"];

fn symmetric(m: usize, r: f64) -> DomainSpec {
    DomainSpec {
        lower: vec![-r; m],
        upper: vec![r; m],
    }
}

fn hermite(n: usize) -> StateSpec {
    StateSpec::HermiteFunction { index: vec![n], scale: 1.0 }
}

fn sine(k: usize, scale: f64) -> StateSpec {
    StateSpec::GridSine { k, scale }
}

pub fn preset(name: &str) -> CliResult<Config> {
    let dirac0 = || DualSpec::Dirac { at: vec![0.0], weight: 1.0 };
    Ok(match name {
        // Itô-type equation with Dirac coefficients on the translates of h_0.
        "ito_translation_d1" => Config {
            model: ModelSpec::Ito {
                d: 1,
                order: 64,
                p: 0.0,
                b: vec![dirac0()],
                sigma: vec![vec![dirac0()]],
            },
            manifold: Some(ManifoldSpec::Translation {
                profile: hermite(0),
                domain: symmetric(1, 2.0),
            }),
            check: SweepOptions::default(),
            simulate: Some(SimulateSpec {
                horizon: 0.5,
                dt: 1e-3,
                paths: 64,
                seed: 1,
                record_every: 10,
                x0: Some(vec![0.0]),
                scheme_error: true,
                ..SimulateSpec::default()
            }),
        },
        // Linear heat equation on 256 points; the first two sines span an invariant plane.
        "plaplace_p2_eigen" => Config {
            model: ModelSpec::PLaplace {
                p: 2.0,
                points: 256,
                diffusion: vec![
                    FieldSpec::Scaled { c: 0.5 },
                    FieldSpec::Constant { direction: sine(2, 0.3) },
                ],
            },
            manifold: Some(ManifoldSpec::LinearSpan {
                vectors: vec![sine(1, 1.0), sine(2, 1.0)],
                domain: symmetric(2, 2.0),
            }),
            check: SweepOptions::default(),
            simulate: Some(SimulateSpec {
                horizon: 0.01,
                dt: 5e-6,
                paths: 4,
                seed: 1,
                record_every: 100,
                x0: Some(vec![1.0, 0.5]),
                explosion_ceiling: 1e6,
                ..SimulateSpec::default()
            }),
        },
        // Tangent drift, noise along h_{N/2} off the plane span{h_0, h_1}.
        "negative_control" => Config {
            model: ModelSpec::LinearEigen {
                basis: BasisSpec::Hermite { d: 1, order: 32 },
                operator: OperatorSpec::HermiteOscillator,
                eigenpairs: vec![
                    EigenpairSpec { vector: hermite(0), value: -0.5 },
                    EigenpairSpec { vector: hermite(1), value: -1.5 },
                ],
                diffusion: vec![FieldSpec::Constant { direction: hermite(16) }],
                tolerance: default_eigen_tolerance(),
                p: 0.0,
            },
            manifold: Some(ManifoldSpec::LinearSpan {
                vectors: vec![hermite(0), hermite(1)],
                domain: symmetric(2, 2.0),
            }),
            check: SweepOptions::default(),
            simulate: Some(SimulateSpec {
                horizon: 0.5,
                dt: 1e-3,
                paths: 64,
                seed: 1,
                record_every: 10,
                x0: Some(vec![0.0, 0.0]),
                ..SimulateSpec::default()
            }),
        },
        // Deterministic decay of the first grid sine; 15 points keep explicit Euler stable.
        "heat" => Config {
            model: ModelSpec::PLaplace {
                p: 2.0,
                points: 15,
                diffusion: vec![FieldSpec::Zero],
            },
            manifold: Some(ManifoldSpec::LinearSpan {
                vectors: vec![sine(1, 1.0)],
                domain: symmetric(1, 2.0),
            }),
            check: SweepOptions::default(),
            simulate: Some(SimulateSpec {
                horizon: 1.0,
                dt: 1e-3,
                paths: 1,
                seed: 0,
                record_every: 1,
                x0: Some(vec![1.0]),
                ..SimulateSpec::default()
            }),
        },
        "zero" => Config {
            model: ModelSpec::LinearEigen {
                basis: BasisSpec::Grid { points: 8 },
                operator: OperatorSpec::Diagonal { values: vec![0.0; 8] },
                eigenpairs: vec![],
                diffusion: vec![FieldSpec::Zero],
                tolerance: default_eigen_tolerance(),
                p: 0.0,
            },
            manifold: Some(ManifoldSpec::LinearSpan {
                vectors: vec![sine(1, 1.0)],
                domain: symmetric(1, 2.0),
            }),
            check: SweepOptions::default(),
            simulate: Some(SimulateSpec {
                horizon: 0.1,
                dt: 0.01,
                paths: 2,
                seed: 0,
                record_every: 1,
                x0: Some(vec![1.0]),
                ..SimulateSpec::default()
            }),
        },
        other => {
            return Err(CliError::Config(format!(
                "preset: unknown preset `{other}` (known: {})",
                PRESETS.join(", ")
            )))
        }
    })
}

/// A parsed configuration and the preset it was derived from, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedConfig {
    pub preset: Option<String>,
    pub config: Config,
}

/// Parses a config document. A top-level `"preset"` key selects a preset and
/// the remaining keys are applied to it as a JSON merge patch.
pub fn parse_config(text: &str) -> CliResult<LoadedConfig> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
    let preset_name = match doc.as_object_mut().and_then(|o| o.remove("preset")) {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(other) => return Err(CliError::Config(format!("preset: expected a preset name, found {other}"))),
    };
    let merged = match &preset_name {
        Some(name) => {
            let mut base = serde_json::to_value(preset(name)?).expect("presets serialize");
            json_patch::merge(&mut base, &doc);
            base
        }
        None => doc,
    };
    let config = from_value(merged)?;
    Ok(LoadedConfig {
        preset: preset_name,
        config,
    })
}

/// Deserializes with the path of the offending key in the error.
pub fn from_value(value: Value) -> CliResult<Config> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{}: {}", if path == "." { "config".into() } else { path }, e.into_inner()))
    })
}

impl Config {
    /// Canonical JSON value (object keys sorted).
    pub fn canonical(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Basis the model's states live in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisCtx {
    Hermite { d: usize, order: usize },
    Grid { points: usize },
}

impl StateSpec {
    pub fn build(&self, ctx: BasisCtx) -> CliResult<State> {
        match (self, ctx) {
            (StateSpec::HermiteFunction { index, scale }, BasisCtx::Hermite { d, order }) => {
                if index.len() != d {
                    return Err(CliError::Config(format!("hermite_function index {index:?} is not {d}-dimensional")));
                }
                Ok(SpectralState::hermite_function(d, order, &MultiIndex::new(index.clone()))?.scaled(*scale))
            }
            (StateSpec::GridSine { k, scale }, BasisCtx::Grid { points }) => Ok(grid_sine(points, *k).scaled(*scale)),
            (StateSpec::Explicit { state }, _) => {
                let s = SpectralState::from_doc(state)?;
                let ok = match ctx {
                    BasisCtx::Hermite { d, .. } => s.hermite_basis().is_some() && s.dim() == d,
                    BasisCtx::Grid { points } => s.hermite_basis().is_none() && s.len() == points,
                };
                if !ok {
                    return Err(CliError::Config("explicit state does not match the model basis".into()));
                }
                Ok(match ctx {
                    BasisCtx::Hermite { order, .. } => s.with_order(order),
                    BasisCtx::Grid { .. } => s,
                })
            }
            (spec, ctx) => Err(CliError::Config(format!("state {spec:?} does not fit a {ctx:?} basis"))),
        }
    }
}

impl FieldSpec {
    fn build(&self, ctx: BasisCtx) -> CliResult<DiffusionField<f64>> {
        Ok(match self {
            FieldSpec::Zero => DiffusionField::Zero,
            FieldSpec::Constant { direction } => DiffusionField::Constant(direction.build(ctx)?),
            FieldSpec::Scaled { c } => DiffusionField::Scaled(*c),
            FieldSpec::RankOne { functional, direction } => DiffusionField::RankOne {
                functional: functional.build(ctx)?,
                direction: direction.build(ctx)?,
            },
        })
    }
}

impl DualSpec {
    fn build(&self, d: usize, order: usize) -> CliResult<DualField<f64>> {
        Ok(match self {
            DualSpec::Zero => DualField::zero(d, order),
            DualSpec::Constant { value } => DualField::integral(d, order).scaled(*value),
            DualSpec::Dirac { at, weight } => {
                if at.len() != d {
                    return Err(CliError::Config(format!("dirac point {at:?} is not {d}-dimensional")));
                }
                DualField::dirac(order, at).scaled(*weight)
            }
            DualSpec::Coefficients { state } => {
                DualField::from_state(SpectralState::from_doc(state)?.with_order(order))
            }
        })
    }
}

/// The concrete model a config describes.
#[derive(Clone, Debug)]
pub enum BuiltModel {
    Ito(ItoTypeModel<f64>),
    PLaplace(PLaplaceModel<f64>),
    Linear(LinearEigenModel<f64>),
}

impl BuiltModel {
    pub fn as_model(&self) -> &dyn SpdeModel<f64> {
        match self {
            BuiltModel::Ito(m) => m,
            BuiltModel::PLaplace(m) => m,
            BuiltModel::Linear(m) => m,
        }
    }
}

pub struct Built {
    pub model: BuiltModel,
    pub ctx: BasisCtx,
    pub manifold: Option<Submanifold>,
}

impl ModelSpec {
    pub fn basis(&self) -> BasisCtx {
        match self {
            ModelSpec::Ito { d, order, .. } => BasisCtx::Hermite { d: *d, order: *order },
            ModelSpec::PLaplace { points, .. } => BasisCtx::Grid { points: *points },
            ModelSpec::LinearEigen { basis, .. } => match basis {
                BasisSpec::Hermite { d, order } => BasisCtx::Hermite { d: *d, order: *order },
                BasisSpec::Grid { points } => BasisCtx::Grid { points: *points },
            },
        }
    }

    /// Hermite order or grid size, for summaries.
    pub fn resolution(&self) -> usize {
        match self.basis() {
            BasisCtx::Hermite { order, .. } => order,
            BasisCtx::Grid { points } => points,
        }
    }

    pub fn build(&self) -> CliResult<BuiltModel> {
        let ctx = self.basis();
        Ok(match self {
            ModelSpec::Ito { d, order, p, b, sigma } => {
                let b = b.iter().map(|s| s.build(*d, *order)).collect::<CliResult<_>>()?;
                let sigma = sigma
                    .iter()
                    .map(|row| row.iter().map(|s| s.build(*d, *order)).collect::<CliResult<Vec<_>>>())
                    .collect::<CliResult<_>>()?;
                BuiltModel::Ito(ItoTypeModel::new(*order, b, sigma, NormScale::hermite_sobolev(*p))?)
            }
            ModelSpec::PLaplace { p, points, diffusion } => {
                let fields = diffusion.iter().map(|f| f.build(ctx)).collect::<CliResult<_>>()?;
                BuiltModel::PLaplace(PLaplaceModel::new(*p, *points, fields)?)
            }
            ModelSpec::LinearEigen {
                operator,
                eigenpairs,
                diffusion,
                tolerance,
                p,
                ..
            } => {
                let op = match operator {
                    OperatorSpec::HermiteOscillator => LinearOperator::HermiteOscillator,
                    OperatorSpec::DirichletLaplacian => LinearOperator::DirichletLaplacian,
                    OperatorSpec::Diagonal { values } => LinearOperator::Diagonal(values.clone()),
                };
                let pairs = eigenpairs
                    .iter()
                    .map(|e| Ok((e.vector.build(ctx)?, e.value)))
                    .collect::<CliResult<_>>()?;
                let fields = diffusion.iter().map(|f| f.build(ctx)).collect::<CliResult<_>>()?;
                let metric = match ctx {
                    BasisCtx::Hermite { .. } => NormScale::hermite_sobolev(*p).h_metric(),
                    BasisCtx::Grid { .. } => spde_manifold::function_space::Metric::GridL2,
                };
                let mut model = LinearEigenModel::new(op, pairs, fields, metric, *tolerance)?;
                if let BasisCtx::Hermite { order, .. } = ctx {
                    model = model.with_working_order(order);
                }
                BuiltModel::Linear(model)
            }
        })
    }
}

impl ManifoldSpec {
    pub fn build(&self, ctx: BasisCtx, model: &dyn SpdeModel<f64>) -> CliResult<Submanifold> {
        let domain = |d: &DomainSpec| ChartDomain::new(d.lower.clone(), d.upper.clone());
        let chart: Arc<dyn spde_manifold::manifold::Parametrization<f64>> = match self {
            ManifoldSpec::Translation { profile, domain: d } => {
                Arc::new(TranslationChart::new(profile.build(ctx)?, domain(d)?)?)
            }
            ManifoldSpec::LinearSpan { vectors, domain: d } => {
                let vs = vectors.iter().map(|v| v.build(ctx)).collect::<CliResult<_>>()?;
                Arc::new(LinearSpanChart::new(vs, domain(d)?)?)
            }
        };
        Ok(Manifold::new(chart, model.metric()))
    }
}

impl Config {
    pub fn build(&self) -> CliResult<Built> {
        let model = self.model.build()?;
        let ctx = self.model.basis();
        let manifold = self.manifold.as_ref().map(|m| m.build(ctx, model.as_model())).transpose()?;
        Ok(Built { model, ctx, manifold })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn presets_build() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            let built = c.build().unwrap();
            assert!(built.manifold.is_some(), "{name}");
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn preset_patch_overrides_nested_keys() {
        let loaded = parse_config(r#"{"preset": "ito_translation_d1", "model": {"order": 16}, "simulate": {"paths": 3}}"#).unwrap();
        assert_eq!(loaded.preset.as_deref(), Some("ito_translation_d1"));
        assert_eq!(loaded.config.model.resolution(), 16);
        let sim = loaded.config.simulate.unwrap();
        assert_eq!(sim.paths, 3);
        assert_eq!(sim.dt, 1e-3);
    }

    #[test]
    fn errors_name_the_offending_key() {
        let err = parse_config(r#"{"preset": "heat", "simulate": {"dtt": 0.1}}"#).unwrap_err().to_string();
        assert!(err.contains("simulate") && err.contains("dtt"), "{err}");
        let err = parse_config(r#"{"preset": "ito_translation_d1", "model": {"order": "many"}}"#).unwrap_err().to_string();
        assert!(err.contains("model") && err.contains("many"), "{err}");
        let err = parse_config(r#"{"model": {"kind": "p_laplace", "p": 2.0}}"#).unwrap_err().to_string();
        assert!(err.contains("points"), "{err}");
        assert!(parse_config("{").is_err());
    }

    #[test]
    fn mismatched_state_kinds_are_rejected() {
        let text = r#"{"preset": "heat", "manifold": {"kind": "linear_span", "vectors": [{"kind": "hermite_function", "index": [0]}], "domain": {"lower": [-1], "upper": [1]}}}"#;
        let c = parse_config(text).unwrap().config;
        assert!(c.build().is_err());
    }

    fn arb_config() -> impl Strategy<Value = Config> {
        (0..PRESETS.len(), 0.01f64..10.0, 1usize..200, any::<u64>(), -3.0f64..3.0).prop_map(|(i, scale, n, seed, v)| {
            let mut c = preset(PRESETS[i]).unwrap();
            match &mut c.model {
                ModelSpec::Ito { order, sigma, .. } => {
                    *order = n;
                    sigma[0][0] = DualSpec::Constant { value: v };
                }
                ModelSpec::PLaplace { p, diffusion, .. } => {
                    *p = 2.0 + scale;
                    diffusion.push(FieldSpec::Scaled { c: v });
                }
                ModelSpec::LinearEigen { tolerance, .. } => *tolerance = scale,
            }
            if let Some(s) = &mut c.simulate {
                s.seed = seed;
                s.dt = scale * 1e-3;
            }
            c.check.thresholds.base = scale * 1e-7;
            c
        })
    }

    proptest! {
        #[test]
        fn canonical_form_round_trips(c in arb_config()) {
            let text = serde_json::to_string(&c.canonical()).unwrap();
            let again = parse_config(&text).unwrap();
            prop_assert_eq!(&again.config, &c);
            prop_assert_eq!(again.config.canonical(), c.canonical());
        }
    }
}
