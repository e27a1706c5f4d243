//! Batch front end for the graded-contraction toolkit.
//!
//! Every subcommand reads one JSON config (or built-in defaults), runs the
//! corresponding library pipeline, and writes `report.json` plus
//! `residuals.csv` into the output directory. Exit code 0 means every
//! certificate in the run closed, 2 means a certificate failed, 1 means
//! the invocation or config was unusable.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::Config;
use crate::report::{write_outputs, Report, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("certificate failure: {0}")]
    Certificate(String),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Parser, Debug)]
#[command(name = "gradcon", version, about = "Graded-contraction toolkit runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report.json and residuals.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the probe generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the report to stdout as well.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Iterate a configured contraction map to its fixed point.
    Fixedpoint,
    /// Solve an operator-valued initial value problem by Picard iteration.
    Ode,
    /// Heisenberg evolution with the exact-propagator comparison.
    Heisenberg,
    /// Cutoff hypotheses, family certification, and cutoff removal.
    Cutoff,
    /// Construct and certify an admissible start point.
    Blcert,
    /// Print the seminorm panel with truncation margins.
    Panel,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Fixedpoint => "fixedpoint",
            Command::Ode => "ode",
            Command::Heisenberg => "heisenberg",
            Command::Cutoff => "cutoff",
            Command::Blcert => "blcert",
            Command::Panel => "panel",
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let out = cli
        .out
        .as_deref()
        .ok_or_else(|| CliError::Config("--out <dir> is required".into()))?;
    let cfg = Config::load(cli.config.as_deref())?;
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);

    let (results, rows, certified) = match cli.command {
        Command::Fixedpoint => commands::fixedpoint(&cfg, &mut rng)?,
        Command::Ode => commands::ode(&cfg, &mut rng)?,
        Command::Heisenberg => commands::heisenberg(&cfg, &mut rng)?,
        Command::Cutoff => commands::cutoff(&cfg, &mut rng)?,
        Command::Blcert => commands::blcert(&cfg, &mut rng)?,
        Command::Panel => commands::panel(&cfg, &mut rng)?,
    };

    let report = Report {
        schema_version: SCHEMA_VERSION,
        subcommand: cli.command.name().to_string(),
        seed: cli.seed,
        certified,
        config: cfg,
        results,
    };
    write_outputs(out, &report, &rows)?;
    if cli.verbose {
        println!(
            "{}",
            serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Internal(e.to_string()))?
        );
    }
    Ok(certified)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("run finished but a certificate did not close");
            ExitCode::from(2)
        }
        Err(e @ (CliError::Config(_) | CliError::Internal(_))) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Certificate(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
