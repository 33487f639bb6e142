mod args;
mod commands;
mod error;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliError;

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("REGCAL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("REGCAL_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Failure(format!("cannot start thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::ExactSolve(a) => commands::exact_solve(a),
        Command::Curves(a) => commands::curves(a),
        Command::Rdm(a) => commands::rdm(a),
        Command::Entropy(a) => commands::entropy(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
        Command::Kinks(a) => commands::kinks(a),
        Command::Verify(a) => verify::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e {
                CliError::Usage(_) => "usage",
                CliError::Failure(_) => "error",
            };
            eprintln!("regcal: {kind}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
