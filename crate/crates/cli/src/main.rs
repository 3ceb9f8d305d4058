use clap::{Args, Parser, Subcommand};
use spde_manifold_cli::config::PRESETS;
use spde_manifold_cli::run::{cmd_check, cmd_report, cmd_simulate, ConfigSource, RunOptions};
use spde_manifold_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Tangency checks and coupled simulations for invariant submanifolds of SPDEs.
#[derive(Parser)]
#[command(name = "spde-manifold", version)]
struct Cli {
    /// Worker threads for sweeps and ensembles (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the tangency conditions over the chart sample. Exit 0 tangent, 2 not tangent.
    Check(RunArgs),
    /// Run the full and reduced simulations and write trajectories.
    Simulate(RunArgs),
    /// Aggregate the run manifests in a directory into summary.csv and curves.csv.
    Report {
        dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset instead of a config file.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, env = "SPDE_MANIFOLD_OUT", default_value = "runs")]
    out: PathBuf,
    /// Overrides the simulation seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn options(self) -> RunOptions {
        RunOptions {
            source: match (self.config, self.preset) {
                (Some(path), _) => ConfigSource::Path(path),
                (None, Some(p)) => ConfigSource::Preset(p),
                (None, None) => unreachable!("clap requires one of --config/--preset"),
            },
            out: self.out,
            seed: self.seed,
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Check(args) => {
            let outcome = cmd_check(&args.options())?;
            let verdict = outcome.manifest.verdict.map_or("none", |v| v.name());
            let check = outcome.manifest.check.as_ref();
            println!(
                "verdict: {verdict} (max residual {:e}, {} points)",
                check.map_or(0.0, |c| c.max_residual),
                check.map_or(0, |c| c.points)
            );
            println!("manifest: {}", outcome.manifest_path.display());
            Ok(outcome.exit_code)
        }
        Command::Simulate(args) => {
            let outcome = cmd_simulate(&args.options())?;
            if let Some(e) = outcome.manifest.simulation.as_ref().and_then(|s| s.ensemble.as_ref()) {
                println!(
                    "paths: {}, max distance to manifold {:e}, max coupled error {:e}",
                    e.paths, e.max_distance, e.max_coupled_error
                );
            }
            println!("manifest: {}", outcome.manifest_path.display());
            Ok(outcome.exit_code)
        }
        Command::Report { dir } => {
            let (path, rows) = cmd_report(&dir)?;
            println!("{rows} runs summarized in {}", path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
