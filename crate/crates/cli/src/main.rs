//! `growthlab`: evaluate growth indices, reproduce the reference scenarios and
//! run property campaigns.
//!
//! Exit status is 0 when everything matched expectations, 1 when a scenario
//! or campaign came out differently, and 2 for usage, input or validation
//! errors.

mod eval;
mod output;
mod props;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use growthlab_core::ExecMode;

use output::Format;

#[derive(Parser)]
#[command(name = "growthlab", version, about = "Dynamic limit growth indices on finite filtered spaces")]
struct Cli {
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate indices of a value process.
    Eval(eval::EvalArgs),
    /// Reproduce a reference scenario and compare with its known outcome.
    Scenario(scenario::ScenarioArgs),
    /// Run randomized property campaigns.
    Props(props::PropsArgs),
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a command went, when it ran to completion.
pub enum Outcome {
    Expected,
    Unexpected,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("GROWTHLAB_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().with_context(|| format!("GROWTHLAB_THREADS={raw:?} is not a count"))?;
    if n == 0 {
        bail!("GROWTHLAB_THREADS must be at least 1");
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    configure_threads()?;
    let mode = if cli.sequential { ExecMode::Sequential } else { ExecMode::default() };
    match cli.command {
        Command::Eval(args) => eval::run(args, mode),
        Command::Scenario(args) => scenario::run(args, mode),
        Command::Props(args) => props::run(args, mode),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Expected) => ExitCode::SUCCESS,
        Ok(Outcome::Unexpected) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
