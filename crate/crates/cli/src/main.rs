//! `scalevar`: batch runner for scale-calculus experiments.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(name = "scalevar", version, about = "Scale calculus of variations experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a JSON config.
    ///
    /// Writes <output>.csv and <output>.summary.json. Exit status is 2 for
    /// invalid configs and 3 for numerical failures.
    Run {
        config: PathBuf,
        /// Override a config entry, e.g. `--set scale.mu=i`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SCALEVAR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| CliError::Threads(raw.clone()))?;
    // Only fails if a pool already exists, which cannot happen here.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Cmd::Run { config, set } => config::load(&config, &set).and_then(commands::run),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
