//! `logpot`: singular-value tables, verification reports and radial action
//! profiles for the weighted logarithmic potential transform.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "logpot", version, about)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate singular values and, for kmax >= 50, fit their decay.
    Spectrum,
    /// Run the verification suites and write a JSON report and the reconciliation ledger.
    Verify,
    /// Write the radial profile of the transform of one basis element.
    Action {
        /// Basis index; defaults to the level m.
        #[arg(long)]
        k: Option<usize>,
        /// Number of equispaced interior radii.
        #[arg(long, default_value_t = 9)]
        samples: usize,
    },
}

const SPECTRUM_KMAX: usize = 20;
const VERIFY_KMAX: usize = 10;

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Spectrum => commands::spectrum(&RunConfig::resolve(&cli.common, SPECTRUM_KMAX)?),
        Command::Verify => commands::verify(&RunConfig::resolve(&cli.common, VERIFY_KMAX)?),
        Command::Action { k, samples } => {
            let config = RunConfig::resolve(&cli.common, VERIFY_KMAX)?;
            let k = k.unwrap_or(config.params.m());
            commands::action(&config, k, *samples)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(commands::EXIT_ERROR),
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_ERROR)
        }
    }
}
