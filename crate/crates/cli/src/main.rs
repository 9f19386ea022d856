//! `strongdamp`: runs the laboratory from JSON configs and writes CSV/JSON
//! artifacts into an output directory.
//!
//! Exit codes: 0 success, 1 unwritable output, 2 config error, 3 numerical
//! failure, 4 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod approximate;
mod counterexample;
mod failure;
mod io;
mod norms;
mod phase;
mod solve;

use failure::{Failure, Outcome};

#[derive(Parser)]
#[command(name = "strongdamp", version, about = "Strongly damped wave equations with degenerate coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized initial data.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate a diagonal system and check the decay estimate above ν.
    Solve,
    /// Classify a grid of (k+α, σ) analytically and by measured growth.
    PhaseDiagram,
    /// Build the counterexample coefficient and verify it.
    Counterexample,
    /// Dump γ_λ and the margins of the approximation inequalities.
    ApproximateCoefficient,
    /// Norms of a spectral vector read from CSV.
    Norms,
}

pub struct Context {
    pub config: PathBuf,
    pub out: io::OutDir,
    pub seed: u64,
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(Failure::config)?;
    }
    let config = match (cli.config, cli.command) {
        (Some(c), _) => c,
        (None, Command::Counterexample) => PathBuf::new(),
        (None, _) => return Err(Failure::Config("--config is required".into())),
    };
    let ctx = Context { config, out: io::OutDir::create(&cli.out)?, seed: cli.seed };
    match cli.command {
        Command::Solve => solve::run(&ctx),
        Command::PhaseDiagram => phase::run(&ctx),
        Command::Counterexample => counterexample::run(&ctx),
        Command::ApproximateCoefficient => approximate::run(&ctx),
        Command::Norms => norms::run(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("strongdamp: {e}");
            e.exit_code()
        }
    }
}
