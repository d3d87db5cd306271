//! `transverse`: solve, analyze and cross-check periodic NLS standing waves.
//!
//! Exit status: 0 on success, 1 on an operational error, 2 when a
//! scientific assertion fails.

mod commands;
mod options;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{run, Command, RunConfig};
use options::Options;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cli_io: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] transverse_core::Error),
}

#[derive(Parser)]
#[command(name = "transverse", version, about = "Transverse instability of periodic NLS standing waves")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a standing wave and write wave.json.
    Solve(Options),
    /// Spectra and eigenvalue counts of L1, L2 and diag(L1, L2).
    Spectrum(Options),
    /// Eigenvalue-count checks and the structural hypotheses on S(kappa).
    Verify(Options),
    /// Growth rates over a range of transverse wavenumbers.
    Scan(Options),
    /// Linearized time integration and growth-rate fit.
    Dns(Options),
    /// All stages with a combined report.
    Pipeline(Options),
}

impl Cmd {
    fn split(self) -> (Command, Options) {
        match self {
            Cmd::Solve(o) => (Command::Solve, o),
            Cmd::Spectrum(o) => (Command::Spectrum, o),
            Cmd::Verify(o) => (Command::Verify, o),
            Cmd::Scan(o) => (Command::Scan, o),
            Cmd::Dns(o) => (Command::Dns, o),
            Cmd::Pipeline(o) => (Command::Pipeline, o),
        }
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
    let (command, options) = cli.command.split();
    let outcome = options
        .merged()
        .and_then(|o| RunConfig::resolve(command, o))
        .and_then(|config| run(&config));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("assertion failure: see the report above");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
