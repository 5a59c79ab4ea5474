//! `fracboussinesq <command> --config <path> --out <dir> [--seeds a,b,c] [--threads k]`

mod config;
mod error;
mod manifest;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use error::{CliError, EXIT_CONFIG};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Fixed-point solve, optionally cross-checked by ETD2.
    Solve,
    /// Ratio audits of the calculus inequalities.
    CalculusAudit,
    /// Smoothing, maximal-regularity and free-functional checks of the semigroup.
    SemigroupAudit,
    /// Solve, then rescale the solution and compare mild-map residuals.
    ScalingCheck,
    /// Measure k1, k2, k3 on a random corpus.
    Constants,
    /// Solve twice (fixed point and ETD2) and run the uniqueness probe on the pair.
    UniquenessProbe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::CalculusAudit => "calculus-audit",
            Command::SemigroupAudit => "semigroup-audit",
            Command::ScalingCheck => "scaling-check",
            Command::Constants => "constants",
            Command::UniquenessProbe => "uniqueness-probe",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracboussinesq", version, about = "Fractional Boussinesq solver and estimate audits")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated seeds replacing those in the configuration.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Worker threads; 1 gives the reference single-threaded run.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Progress on stderr; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let code = match run::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fracboussinesq {}: {e}", cli.command.name());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
