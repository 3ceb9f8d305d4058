//! The `check`, `simulate` and `report` commands.

use crate::config::{parse_config, BuiltModel, Config, LoadedConfig, ModelSpec, SimulateSpec};
use crate::error::{io_err, CliError, CliResult};
use crate::output::{ensure_dir, hash_json, run_name, to_sorted_json, write_file};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use spde_manifold::manifold::DistanceOptions;
use spde_manifold::simulate::{
    coupled_compare, eigen_decay_error, refinement_scheme_error, simulate_ensemble, trajectory_csv, EnsembleSummary,
    SchemeErrorEstimate,
};
use spde_manifold::tangency::{sweep, TangencyReport, Verdict};
use spde_manifold::State;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigSource {
    Path(PathBuf),
    Preset(String),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub source: ConfigSource,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub points: usize,
    pub failures: usize,
    pub max_rho_j: f64,
    pub max_rho_l: f64,
    pub max_residual: f64,
    pub max_spill: f64,
    pub max_form_gap: Option<f64>,
}

impl From<&TangencyReport> for CheckSummary {
    fn from(r: &TangencyReport) -> Self {
        Self {
            points: r.points.len(),
            failures: r.failures.len(),
            max_rho_j: r.max_rho_j,
            max_rho_l: r.max_rho_l,
            max_residual: r.max_residual,
            max_spill: r.max_spill,
            max_form_gap: r.max_form_gap,
        }
    }
}

/// Ensemble statistics at one record time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub paths: usize,
    pub max_distance: Option<f64>,
    pub mean_distance: Option<f64>,
    pub max_coupled_error: Option<f64>,
    pub mean_full_norm: f64,
}

/// Exact solution `e^{λt} y0` when `y0` is an eigenvector of a linear drift and
/// the noise vanishes on its ray.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOracle {
    pub lambda: f64,
    /// `max_t ‖Y_t − e^{λt} y0‖ / max_t ‖e^{λt} y0‖`, worst path.
    pub max_relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub paths: usize,
    pub steps: usize,
    pub exploded: usize,
    pub ensemble: Option<EnsembleSummary>,
    pub scheme_error: Option<SchemeErrorEstimate>,
    pub eigen_oracle: Option<EigenOracle>,
    pub curves: Vec<CurvePoint>,
}

/// Everything needed to reproduce a run's outputs with the same code version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_name: String,
    pub preset: Option<String>,
    pub seed: u64,
    pub config: Value,
    pub config_hash: String,
    pub model_hash: String,
    pub manifold_hash: Option<String>,
    pub model_kind: String,
    pub resolution: usize,
    pub verdict: Option<Verdict>,
    pub exit_code: i32,
    pub check: Option<CheckSummary>,
    pub simulation: Option<SimulationSummary>,
    pub outputs: Vec<String>,
}

pub struct Outcome {
    pub exit_code: i32,
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

struct Prepared {
    loaded: LoadedConfig,
    name: String,
    seed: u64,
}

fn prepare(opts: &RunOptions) -> CliResult<Prepared> {
    let (mut loaded, name) = match &opts.source {
        ConfigSource::Path(path) => {
            let text = std::fs::read_to_string(path).map_err(io_err(path))?;
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "config".into());
            (parse_config(&text)?, stem)
        }
        ConfigSource::Preset(p) => (parse_config(&format!("{{\"preset\": {}}}", Value::String(p.clone())))?, p.clone()),
    };
    if let Some(seed) = opts.seed {
        loaded.config.simulate.get_or_insert_with(SimulateSpec::default).seed = seed;
    }
    let seed = loaded.config.simulate.as_ref().map_or(0, |s| s.seed);
    Ok(Prepared { loaded, name, seed })
}

fn model_kind(spec: &ModelSpec) -> &'static str {
    match spec {
        ModelSpec::Ito { .. } => "ito",
        ModelSpec::PLaplace { .. } => "p_laplace",
        ModelSpec::LinearEigen { .. } => "linear_eigen",
    }
}

fn manifest_base(command: &str, prep: &Prepared) -> RunManifest {
    let config = &prep.loaded.config;
    RunManifest {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_name: prep.name.clone(),
        preset: prep.loaded.preset.clone(),
        seed: prep.seed,
        config: config.canonical(),
        config_hash: hash_json(&config.canonical()),
        model_hash: hash_json(&config.model),
        manifold_hash: config.manifold.as_ref().map(hash_json),
        model_kind: model_kind(&config.model).into(),
        resolution: config.model.resolution(),
        verdict: None,
        exit_code: 0,
        check: None,
        simulation: None,
        outputs: Vec::new(),
    }
}

fn finish(dir: &Path, name: &str, mut manifest: RunManifest, files: Vec<(String, String)>) -> CliResult<Outcome> {
    let manifest_file = format!("{name}.manifest.json");
    for (file, contents) in &files {
        write_file(&dir.join(file), contents)?;
        manifest.outputs.push(file.clone());
    }
    let manifest_path = dir.join(&manifest_file);
    write_file(&manifest_path, &to_sorted_json(&manifest))?;
    append_log(dir, &manifest)?;
    Ok(Outcome {
        exit_code: manifest.exit_code,
        manifest,
        manifest_path,
    })
}

/// Wall-clock data lives here so the JSON and CSV outputs stay byte-identical
/// across repeated runs.
fn append_log(dir: &Path, manifest: &RunManifest) -> CliResult<()> {
    let path = dir.join("run.log");
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?;
    writeln!(
        f,
        "{secs} {} {} seed={} config={} exit={}",
        manifest.command,
        manifest.config_name,
        manifest.seed,
        &manifest.config_hash[..12],
        manifest.exit_code
    )
    .map_err(io_err(&path))
}

fn require_manifold(config: &Config) -> CliResult<()> {
    if config.manifold.is_none() {
        return Err(CliError::Config("manifold: a chart is required for this command".into()));
    }
    Ok(())
}

pub fn cmd_check(opts: &RunOptions) -> CliResult<Outcome> {
    let prep = prepare(opts)?;
    let config = &prep.loaded.config;
    require_manifold(config)?;
    let built = config.build()?;
    let manifold = built.manifold.as_ref().expect("checked above");
    let report = sweep(built.model.as_model(), manifold, &config.check)?;
    let dir = ensure_dir(&opts.out)?;
    let mut manifest = manifest_base("check", &prep);
    let name = run_name("check", &prep.name, prep.seed, &manifest.config_hash);
    manifest.verdict = Some(report.verdict);
    manifest.exit_code = report.verdict.exit_code();
    manifest.check = Some(CheckSummary::from(&report));
    let files = vec![
        (format!("{name}.report.json"), to_sorted_json(&report)),
        (format!("{name}.residuals.csv"), report.to_csv()),
    ];
    finish(&dir, &name, manifest, files)
}

fn eigen_oracle(built: &BuiltModel, spec: &ModelSpec, y0: &State, paths: &[(Vec<f64>, Vec<State>)]) -> CliResult<Option<EigenOracle>> {
    let linear = match spec {
        ModelSpec::PLaplace { p, .. } => *p == 2.0,
        ModelSpec::LinearEigen { .. } => true,
        ModelSpec::Ito { .. } => false,
    };
    let model = built.as_model();
    if !linear || model.diffusion(y0)?.iter().any(|a| !a.is_zero()) {
        return Ok(None);
    }
    let metric = model.metric();
    let ly = model.drift(y0)?;
    let yy = metric.inner(y0, y0);
    if yy == 0.0 {
        return Ok(None);
    }
    let lambda = metric.inner(&ly, y0) / yy;
    let mut defect = ly.clone();
    defect.axpy(-lambda, y0)?;
    if metric.norm(&defect) > 1e-9 * metric.norm(&ly).max(f64::MIN_POSITIVE) {
        return Ok(None);
    }
    let max_relative_error = paths
        .iter()
        .map(|(t, s)| eigen_decay_error(t, s, y0, lambda, &metric))
        .fold(0.0, f64::max);
    Ok(Some(EigenOracle { lambda, max_relative_error }))
}

fn curves(times: &[Vec<f64>], distance: &[Vec<f64>], coupled: &[Vec<f64>], norms: &[Vec<f64>]) -> Vec<CurvePoint> {
    let len = times.iter().map(Vec::len).max().unwrap_or(0);
    let grid = times.iter().find(|t| t.len() == len).cloned().unwrap_or_default();
    (0..len)
        .map(|i| {
            let live: Vec<usize> = (0..times.len()).filter(|&p| times[p].len() > i).collect();
            let n = live.len() as f64;
            let col = |series: &[Vec<f64>]| -> Option<Vec<f64>> {
                if series.is_empty() {
                    None
                } else {
                    Some(live.iter().map(|&p| series[p][i]).collect())
                }
            };
            let dist = col(distance);
            CurvePoint {
                t: grid[i],
                paths: live.len(),
                max_distance: dist.as_ref().map(|d| d.iter().copied().fold(0.0, f64::max)),
                mean_distance: dist.as_ref().map(|d| d.iter().sum::<f64>() / n),
                max_coupled_error: col(coupled).map(|d| d.iter().copied().fold(0.0, f64::max)),
                mean_full_norm: live.iter().map(|&p| norms[p][i]).sum::<f64>() / n,
            }
        })
        .collect()
}

fn full_paths_csv(paths: &[(Vec<f64>, Vec<State>)], metric: &spde_manifold::function_space::Metric<f64>) -> String {
    let width = paths.first().and_then(|(_, s)| s.first()).map_or(0, |s| s.len());
    let mut out = String::from("path,t,full_norm");
    for k in 0..width {
        let _ = write!(out, ",c{k}");
    }
    out.push('\n');
    for (p, (times, states)) in paths.iter().enumerate() {
        for (t, s) in times.iter().zip(states) {
            let _ = write!(out, "{p},{t:e},{:e}", metric.norm(s));
            for c in s.coeffs() {
                let _ = write!(out, ",{c:e}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn cmd_simulate(opts: &RunOptions) -> CliResult<Outcome> {
    let prep = prepare(opts)?;
    let config = &prep.loaded.config;
    let spec = config.simulate.clone().unwrap_or_default();
    let cfg = spec.sim_config();
    cfg.validate()?;
    let built = config.build()?;
    let model = built.model.as_model();
    let metric = model.metric();
    let mut manifest = manifest_base("simulate", &prep);
    let name = run_name("simulate", &prep.name, prep.seed, &manifest.config_hash);
    let mut files = Vec::new();
    let noise = cfg.noise();

    let (y0, full_paths, ensemble, trajectory) = match &built.manifold {
        Some(manifold) => {
            let report = sweep(model, manifold, &config.check)?;
            manifest.verdict = Some(report.verdict);
            manifest.check = Some(CheckSummary::from(&report));
            let domain = manifold.domain();
            let x0 = spec.x0.clone().unwrap_or_else(|| {
                domain.lower().iter().zip(domain.upper()).map(|(l, u)| (l + u) / 2.0).collect()
            });
            let dist = DistanceOptions {
                max_iterations: spec.distance_max_iterations,
                step_tolerance: spec.distance_step_tolerance,
            };
            let run = coupled_compare(model, manifold, &x0, &cfg, &noise, &dist)?;
            let y0 = manifold.eval(&x0)?;
            let csv = trajectory_csv(&run.records, &metric);
            let full: Vec<(Vec<f64>, Vec<State>)> = run.records.iter().map(|r| (r.times.clone(), r.full.clone())).collect();
            let exploded = run.records.iter().filter(|r| r.exploded_at.is_some()).count();
            let curve = curves(
                &run.records.iter().map(|r| r.times.clone()).collect::<Vec<_>>(),
                &run.records.iter().map(|r| r.distance.clone()).collect::<Vec<_>>(),
                &run.records.iter().map(|r| r.coupled_error.clone()).collect::<Vec<_>>(),
                &run.records.iter().map(|r| r.full.iter().map(|s| metric.norm(s)).collect()).collect::<Vec<_>>(),
            );
            (y0, full, Some((run.summary, exploded, curve)), csv)
        }
        None => {
            let y0 = spec
                .y0
                .as_ref()
                .ok_or_else(|| CliError::Config("simulate.y0: required when no manifold is configured".into()))?
                .build(built.ctx)?;
            let paths = simulate_ensemble(model, &y0, &cfg, &noise)?;
            let full: Vec<(Vec<f64>, Vec<State>)> = paths.iter().map(|p| (p.times.clone(), p.states.clone())).collect();
            let csv = full_paths_csv(&full, &metric);
            (y0, full, None, csv)
        }
    };
    let scheme_error = if spec.scheme_error {
        Some(refinement_scheme_error(model, &y0, &cfg)?)
    } else {
        None
    };
    let eigen = eigen_oracle(&built.model, &config.model, &y0, &full_paths)?;
    let (ensemble, exploded, curve) = match ensemble {
        Some((summary, exploded, curve)) => (Some(summary), exploded, curve),
        None => {
            let norms: Vec<Vec<f64>> = full_paths.iter().map(|(_, s)| s.iter().map(|y| metric.norm(y)).collect()).collect();
            let times: Vec<Vec<f64>> = full_paths.iter().map(|(t, _)| t.clone()).collect();
            let exploded = full_paths.iter().filter(|(t, _)| t.last().copied().unwrap_or(0.0) < cfg.horizon - 0.5 * cfg.dt).count();
            (None, exploded, curves(&times, &[], &[], &norms))
        }
    };
    let summary = SimulationSummary {
        paths: cfg.paths,
        steps: cfg.steps(),
        exploded,
        ensemble,
        scheme_error,
        eigen_oracle: eigen,
        curves: curve,
    };
    files.push((format!("{name}.trajectory.csv"), trajectory));
    files.push((format!("{name}.summary.json"), to_sorted_json(&summary)));
    manifest.simulation = Some(summary);
    finish(&dir_for(opts)?, &name, manifest, files)
}

fn dir_for(opts: &RunOptions) -> CliResult<PathBuf> {
    ensure_dir(&opts.out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Aggregates every manifest in `dir` into `summary.csv` and the per-time
/// ensemble curves of simulate runs into `curves.csv`.
pub fn cmd_report(dir: &Path) -> CliResult<(PathBuf, usize)> {
    let entries = std::fs::read_dir(dir).map_err(io_err(dir))?;
    let mut manifests: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".manifest.json"))
        .collect();
    manifests.sort();
    if manifests.is_empty() {
        return Err(CliError::Usage(format!("{}: no run manifests found", dir.display())));
    }
    let mut summary = String::from(
        "manifest,command,config,preset,seed,config_hash,model_kind,resolution,verdict,exit_code,\
         max_rho_j,max_rho_l,max_residual,max_spill,max_form_gap,\
         max_distance,mean_max_distance,max_coupled_error,scheme_error,eigen_max_relative_error\n",
    );
    let mut curves = String::from("manifest,t,paths,max_distance,mean_distance,max_coupled_error,mean_full_norm\n");
    for path in &manifests {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: not a run manifest: {e}", path.display())))?;
        let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let check = m.check.as_ref();
        let sim = m.simulation.as_ref();
        let ens = sim.and_then(|s| s.ensemble.as_ref());
        let _ = writeln!(
            summary,
            "{file},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            m.command,
            m.config_name,
            m.preset.clone().unwrap_or_default(),
            m.seed,
            &m.config_hash[..12],
            m.model_kind,
            m.resolution,
            m.verdict.map_or("", |v| v.name()),
            m.exit_code,
            opt(check.map(|c| c.max_rho_j)),
            opt(check.map(|c| c.max_rho_l)),
            opt(check.map(|c| c.max_residual)),
            opt(check.map(|c| c.max_spill)),
            opt(check.and_then(|c| c.max_form_gap)),
            opt(ens.map(|e| e.max_distance)),
            opt(ens.map(|e| e.mean_max_distance)),
            opt(ens.map(|e| e.max_coupled_error)),
            opt(sim.and_then(|s| s.scheme_error.map(|e| e.extrapolated))),
            opt(sim.and_then(|s| s.eigen_oracle.as_ref().map(|o| o.max_relative_error))),
        );
        for c in sim.map(|s| s.curves.as_slice()).unwrap_or_default() {
            let _ = writeln!(
                curves,
                "{file},{:e},{},{},{},{},{:e}",
                c.t,
                c.paths,
                opt(c.max_distance),
                opt(c.mean_distance),
                opt(c.max_coupled_error),
                c.mean_full_norm
            );
        }
    }
    let out = dir.join("summary.csv");
    write_file(&out, &summary)?;
    write_file(&dir.join("curves.csv"), &curves)?;
    Ok((out, manifests.len()))
}
