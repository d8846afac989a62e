//! Front end of the `rislink` command: flag and config-file handling,
//! CSV-producing subcommands, figure recipes and the acceptance checks they
//! report on.
//!
//! Exit codes: 0 on success, 1 when a reproduced figure fails a check,
//! 2 for invalid input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod commands;
pub mod config;
pub mod format;
pub mod reproduce;

use std::path::Path;

use config::{Cli, Command, Defaults, RunConfig};

/// Environment variable that sets the Monte Carlo worker count.
pub const WORKERS_ENV: &str = "RISLINK_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Validation(String),
    Acceptance(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Acceptance(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Acceptance(m) => write!(f, "check failed: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rislink::Error> for CliError {
    fn from(e: rislink::Error) -> Self {
        match e {
            rislink::Error::InvalidInput(msg) => CliError::Validation(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// Reads the worker count from [`WORKERS_ENV`], if set.
pub fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w >= 1)
            .map(Some)
            .ok_or_else(|| CliError::Validation(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// Runs `f` on `workers` threads, or on the global pool when `None`.
pub fn on_workers<R: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> Result<R, CliError> + Send,
) -> Result<R, CliError> {
    match workers {
        Some(w) => rislink::montecarlo::with_workers(w, f).map_err(|e| CliError::Io(e.to_string()))?,
        None => f(),
    }
}

fn write_output(out: Option<&Path>, csv: &str, stdout: &mut String) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            stdout.push_str(csv);
            Ok(())
        }
    }
}

/// Result of one invocation: text for stdout plus the final status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub status: Result<(), CliError>,
}

/// Executes a parsed command line.
pub fn run(cli: &Cli, workers: Option<usize>) -> Outcome {
    let mut stdout = String::new();
    let status = execute(cli, workers, &mut stdout);
    Outcome { stdout, status }
}

fn execute(cli: &Cli, workers: Option<usize>, stdout: &mut String) -> Result<(), CliError> {
    match &cli.command {
        Command::Pathloss(opts) => {
            let config = RunConfig::resolve(opts, &Defaults::pathloss())?;
            let csv = commands::cmd_pathloss(&config)?;
            write_output(config.out.as_deref(), &csv, stdout)
        }
        Command::SepTheory(opts) => {
            let config = RunConfig::resolve(opts, &Defaults::default())?;
            let csv = commands::cmd_sep_theory(&config)?;
            write_output(config.out.as_deref(), &csv, stdout)
        }
        Command::SepSim(opts) => {
            let config = RunConfig::resolve(opts, &Defaults::default())?;
            let csv = on_workers(workers, || commands::cmd_sep_sim(&config))?;
            write_output(config.out.as_deref(), &csv, stdout)
        }
        Command::Reproduce { figure, opts } => {
            let report = on_workers(workers, || reproduce::cmd_reproduce(*figure, opts))?;
            stdout.push_str(&report.summary);
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Acceptance(failed.join("; ")))
            }
        }
    }
}
