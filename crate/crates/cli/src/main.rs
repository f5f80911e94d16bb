//! `pcf-hopf`: solitons, flows and verification reports on diagonal Hopf
//! surfaces. Exit status 0 means every check passed, 1 a failed check or
//! solver error, 2 a usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::UsageError;
use crate::config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "pcf-hopf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the soliton profile and check its residual and tails.
    Soliton,
    /// Evolve initial data under the reduced flow and track the envelope.
    Flow,
    /// Run the curvature, generalized Kähler and Φ checks.
    Verify,
    /// Sample Φ and the eigenvalues of i∂∂̄ log Φ.
    Phi,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = match RunConfig::resolve(&cli.overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Soliton => commands::soliton(&cfg),
        Command::Flow => commands::flow(&cfg),
        Command::Verify => verify::verify(&cfg),
        Command::Phi => commands::phi(&cfg),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 })
        }
    }
}
