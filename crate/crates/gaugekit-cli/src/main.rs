//! Batch front-end: every computation is a subcommand driven by a JSON
//! config, writing a machine-readable result file and a human summary.
//!
//! Exit codes: 0 success, 2 numerical-tolerance failure, 3 config error.
//! GAUGEKIT_THREADS caps the worker count (speed only; results are
//! bit-identical for any value).

mod config;
mod runners;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gaugekit", version, about = "Numerical gauge-theory workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a JSON run configuration.
    Run {
        /// Path to the config file ({"cmd": "...", ...}).
        config: PathBuf,
    },
    /// List the available subcommand names.
    List,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("GAUGEKIT_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => gaugekit::par::configure_threads(n),
            _ => {
                eprintln!("config error: GAUGEKIT_THREADS must be a positive integer");
                return ExitCode::from(3);
            }
        }
    }
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in runners::SUBCOMMANDS {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { config } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("config error: cannot read {}: {e}", config.display());
                    return ExitCode::from(3);
                }
            };
            let parsed: config::RunConfig = match serde_json::from_str(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(3);
                }
            };
            match runners::run(&parsed) {
                Ok(output) => {
                    println!("{}", output.summary);
                    if let Err(e) = output.write(&parsed) {
                        eprintln!("io error: {e}");
                        return ExitCode::from(2);
                    }
                    ExitCode::SUCCESS
                }
                Err(runners::RunError::Config(msg)) => {
                    eprintln!("config error: {msg}");
                    ExitCode::from(3)
                }
                Err(runners::RunError::Numerical(msg)) => {
                    eprintln!("numerical failure: {msg}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
