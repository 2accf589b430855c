//! `presslab`: batch estimation and verification of semigroup pressures.

mod commands;
mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::{ConfigError, ConfigFile};
use presslab_core::Error as CoreError;
use run::{Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "presslab", version, about = "Topological pressure of finitely generated semigroup actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for the parallel core.
    #[arg(long, global = true, env = "PRESSLAB_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Slack allowed on every verification margin.
    #[arg(long, global = true, default_value_t = 1e-9, allow_negative_numbers = true)]
    tolerance: f64,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Pressure estimates for every configured kind, depth and radius.
    Estimate,
    /// Estimates plus extrapolation to the limit.
    Sweep,
    /// Checks the inequality chain and related bounds.
    Verify,
    /// Bowen root of the unstable pressure.
    Dimension,
    /// Local entropies of a measure.
    Localent,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 4;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::BoundInversion { .. }) => 2,
        Some(
            CoreError::Infeasible(_)
            | CoreError::UnderResolved(_)
            | CoreError::DepthTooLarge { .. }
            | CoreError::AnalyticUnavailable(_)
            | CoreError::NoSignChange(..)
            | CoreError::NonErgodic(_),
        ) => 3,
        Some(_) => 4,
        None => 1,
    }
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring threads")?;
    }
    let path = cli.config.as_ref().context("--config is required")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = ConfigFile::parse(&text)?;
    let run = RunConfig::from_file(&file, &Overrides { out: cli.out.clone(), format: cli.format, seed: cli.seed })?;
    match cli.command {
        Command::Estimate => commands::estimate(&run),
        Command::Sweep => commands::sweep(&run),
        Command::Verify => commands::verify(&run, &file, cli.tolerance),
        Command::Dimension => commands::dimension(&run, &file),
        Command::Localent => commands::localent(&run, &file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
