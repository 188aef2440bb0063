//! `heatkron` command-line front end.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{CommonArgs, RunConfig};
use output::Report;

#[derive(Parser, Debug)]
#[command(name = "heatkron", version, about = "Space-time heat equation solvers: tables, scaling and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Condition numbers of the time eigenvector matrix, one row per (N_t, p_t).
    CondTable(CondTableArgs),
    /// Direct solves with constant source on a Cartesian domain.
    Solve(SolveArgs),
    /// Operation counters and timings over a size ladder, with log-log slopes.
    Scaling(ScalingArgs),
    /// GMRES iteration counts with the parametric-domain preconditioner.
    Precond(PrecondArgs),
    /// Fixed-seed invariant suite; exit status 0 iff every check passes.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CondMode {
    Dt,
    Ar,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TimeScheme {
    Galerkin,
    FdUniform,
    FdGeometric,
}

#[derive(Args, Debug)]
pub struct CondTableArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Eigenvector construction to condition.
    #[arg(long, value_enum, default_value = "ar")]
    mode: CondMode,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Time discretization.
    #[arg(long = "time", value_enum, default_value = "galerkin")]
    time: TimeScheme,
    /// Step ratio of the geometric partition.
    #[arg(long, default_value_t = 1.2)]
    beta: f64,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct PrecondArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Iteration cap for GMRES.
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Directory for per-run residual histories (`iter,residual`).
    #[arg(long)]
    history: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Perturb the banded LU factors before solving (negative control).
    #[arg(long)]
    corrupt_band: bool,
}

/// Errors that abort a command before a report exists.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<heatkron::Error> for CliError {
    fn from(e: heatkron::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(Report, RunConfig), CliError> {
    match cli.command {
        Command::CondTable(a) => {
            let cfg = RunConfig::resolve(&a.common, &commands::cond_table::DEFAULTS)?;
            Ok((commands::cond_table::run(&cfg, a.mode)?, cfg))
        }
        Command::Solve(a) => {
            let cfg = RunConfig::resolve(&a.common, &commands::solve::DEFAULTS)?;
            Ok((commands::solve::run(&cfg, a.time, a.beta)?, cfg))
        }
        Command::Scaling(a) => {
            let cfg = RunConfig::resolve(&a.common, &commands::scaling::DEFAULTS)?;
            Ok((commands::scaling::run(&cfg)?, cfg))
        }
        Command::Precond(a) => {
            let cfg = RunConfig::resolve(&a.common, &commands::precond::DEFAULTS)?;
            Ok((commands::precond::run(&cfg, a.max_iter, a.history.as_deref())?, cfg))
        }
        Command::Verify(a) => {
            let cfg = RunConfig::resolve(&a.common, &commands::verify::DEFAULTS)?;
            Ok((commands::verify::run(&cfg, a.corrupt_band)?, cfg))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(report, cfg)| {
        report.write(&cfg.output)?;
        Ok(report)
    });
    match result {
        Ok(report) if report.failures.is_empty() => ExitCode::SUCCESS,
        Ok(report) => {
            for f in &report.failures {
                eprintln!("assertion failed: {f}");
            }
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
