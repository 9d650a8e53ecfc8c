//! Command-line front end: reads density specs, runs computations and checks,
//! and writes CSV/JSON artifacts with a run manifest.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::output::Session;

/// Exit status for a violated verdict in an asserting check.
const EXIT_VIOLATED: u8 = 2;
/// Exit status for usage and I/O errors.
const EXIT_ERROR: u8 = 1;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR),
            };
        }
    };
    if let Err(e) = configure_workers() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_ERROR);
    }
    let mut session = Session::new(argv, cli.seed, cli.manifest.clone());
    let result = match &cli.command {
        Command::Alpha(a) => commands::alpha::run(&mut session, a),
        Command::Entropy(a) => commands::entropy::run(&mut session, a, cli.seed),
        Command::Body(a) => commands::body::run(&mut session, a),
        Command::TransformCheck(a) => commands::transform::run(&mut session, a),
        Command::Check(a) => commands::check::run(&mut session, a),
    };
    match result {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Violated) => ExitCode::from(EXIT_VIOLATED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// Sizes the global thread pool from `EPIGEOM_WORKERS`.
fn configure_workers() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("EPIGEOM_WORKERS") else { return Ok(()) };
    let workers: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| anyhow::anyhow!("EPIGEOM_WORKERS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
    Ok(())
}
