//! `singlet6`: command-line runner for the six-photon singlet simulation.
//!
//! Data goes to standard output or `--out`; diagnostics go to standard
//! error (`RUST_LOG` controls verbosity).

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pipeline(a) => commands::pipeline(a),
        Command::Histogram(a) => commands::histogram_cmd(a),
        Command::Project(a) => commands::project_cmd(a),
        Command::Witness(a) => commands::witness_cmd(a),
        Command::Invariance(a) => commands::invariance_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
