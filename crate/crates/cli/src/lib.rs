//! Command-line experiment runner.
//!
//! Every command writes CSV files plus a `manifest.json` into `--out`.
//! Exit codes: 0 success, 2 configuration error, 3 I/O error.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::commands::SweepRange;
use crate::config::{ModeName, Overrides};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tia", version, about = "Time interference alignment experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form CCDF of the sum DoF, uncoordinated transmitters.
    Analytic {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Simulated CCDF, uncoordinated transmitters.
    Uncoordinated {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Simulated CCDF with optimized transmit delays on random delay matrices.
    Coordinated {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Simulated CCDF with optimized transmit delays, GEO satellites.
    Satellite {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Probability of exceeding one DoF against the duty cycle.
    RhoSweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        mode: Option<ModeName>,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        rho_min: f64,
        #[arg(long, default_value_t = 0.5)]
        rho_max: f64,
        #[arg(long, default_value_t = 0.01)]
        rho_step: f64,
    },
}

fn overrides(run: &RunArgs, rho: Option<f64>) -> Overrides {
    Overrides { seed: run.seed, trials: run.trials, rho, workers: run.workers }
}

/// Runs one command and returns the written files.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Analytic { rho, out } => commands::cmd_analytic(rho, &out),
        Command::Uncoordinated { run, rho } => {
            let file = commands::load_file(run.config.as_deref())?;
            commands::cmd_empirical(ModeName::Uncoordinated, &file, &overrides(&run, rho), &run.out)
        }
        Command::Coordinated { run, rho } => {
            let file = commands::load_file(run.config.as_deref())?;
            commands::cmd_empirical(ModeName::Coordinated, &file, &overrides(&run, rho), &run.out)
        }
        Command::Satellite { run, rho } => {
            let file = commands::load_file(run.config.as_deref())?;
            commands::cmd_empirical(ModeName::Satellite, &file, &overrides(&run, rho), &run.out)
        }
        Command::RhoSweep { run, mode, rho_min, rho_max, rho_step } => {
            let file = commands::load_file(run.config.as_deref())?;
            let mode = mode
                .or(file.mode)
                .ok_or_else(|| CliError::Config("field `mode`: missing (pass --mode or set it in the config)".into()))?;
            let range = SweepRange { min: rho_min, max: rho_max, step: rho_step };
            commands::cmd_rho_sweep(mode, range, &file, &overrides(&run, None), &run.out)
        }
    }
}
