//! `onebit-train`: bounds, sweeps, figure data, exact small-system tables
//! and the acceptance checks.
//!
//! Exit codes: 0 success, 1 invalid input (including oversized exact
//! systems and exhausted budgets), 2 solver non-convergence, 3 a failed
//! acceptance criterion in `selftest`.

// `!(x >= y)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use config::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] onebit_train::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_convergence_failure() => 2,
            _ => 1,
        }
    }
}

fn set_threads(n: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    Ok(())
}

/// Merges the config file under the flags and sizes the thread pool.
fn prepare(settings: config::Settings) -> Result<config::Settings, CliError> {
    let s = settings.resolve()?;
    set_threads(s.threads)?;
    Ok(s)
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Bound(s) => commands::bound(&prepare(s)?)?,
        Command::Compare(s) => commands::compare(&prepare(s)?)?,
        Command::Figure { which, settings } => commands::figure(which, &prepare(settings)?)?,
        Command::Exact(s) => commands::exact(&prepare(s)?)?,
        Command::Asymptotics(s) => commands::asymptotics(&prepare(s)?)?,
        Command::Selftest { threads } => {
            set_threads(threads)?;
            if !commands::selftest() {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Usage line of the invoked subcommand.
fn usage() -> String {
    let mut cmd = Cli::command();
    cmd.build();
    let name = std::env::args().nth(1).unwrap_or_default();
    match cmd.find_subcommand_mut(&name) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("{}", usage());
            }
            ExitCode::from(e.exit_code())
        }
    }
}
