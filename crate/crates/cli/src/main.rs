//! Command-line front end for median-of-means regression.
//!
//! Exit codes: 0 success, 2 usage error, 3 configuration (admissibility)
//! error, 4 assertion failure.

mod commands;
mod output;

use clap::{Parser, Subcommand};
use momreg_core::error::Error;

#[derive(Parser)]
#[command(
    name = "momreg",
    about = "Median-of-means nonparametric regression: predictions, Monte Carlo certification, numeric oracles",
    version
)]
struct Cli {
    /// Worker threads for Monte Carlo trial loops (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict at query points from a dataset CSV.
    Predict(commands::predict::PredictArgs),
    /// Run a Monte Carlo tail-probability certification scenario.
    Tail(commands::tail::TailArgs),
    /// Threshold-free prediction via nested confidence intervals.
    Adaptive(commands::adaptive::AdaptiveArgs),
    /// Run the deterministic numeric oracle suites.
    Oracles(commands::oracles::OraclesArgs),
    /// Exhibit the minimax lower bound on an adversarial instance.
    LowerBound(commands::lower_bound::LowerBoundArgs),
    /// Demonstrate outlier robustness of the block median.
    ContaminateDemo(commands::contaminate_demo::ContaminateDemoArgs),
}

fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => 3,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            std::process::exit(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("global pool configured once");
    }
    let result = match cli.command {
        Command::Predict(args) => commands::predict::run(args),
        Command::Tail(args) => commands::tail::run(args),
        Command::Adaptive(args) => commands::adaptive::run(args),
        Command::Oracles(args) => commands::oracles::run(args),
        Command::LowerBound(args) => commands::lower_bound::run(args),
        Command::ContaminateDemo(args) => commands::contaminate_demo::run(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(error_exit_code(&err));
        }
    }
}
