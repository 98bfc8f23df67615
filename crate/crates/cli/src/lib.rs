//! The `eit3d` command line: phantoms, DN spectra, Faddeev's Green's function,
//! scattering curves, reconstructions and the figure presets, all written as CSV.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

pub use args::{Cli, Command};
pub use config::RunConfig;

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Exit status for invalid flags or values.
pub const EXIT_VALIDATION: u8 = 1;
/// Exit status when a numerical stage fails.
pub const EXIT_SOLVER: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("could not write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("could not write CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            _ => EXIT_SOLVER,
        }
    }

    pub(crate) fn solver(e: impl std::fmt::Display) -> Self {
        CliError::Solver(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::run(&cli.command) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
