use std::path::PathBuf;

use clap::Args;
use momreg_core::error::Result;
use momreg_core::EstimatorFamily;
use momreg_harness::run_lower_bound;

use crate::output::{json_document, write_text};

#[derive(Args)]
pub struct LowerBoundArgs {
    #[arg(long)]
    pub d: usize,

    #[arg(long)]
    pub sigma: f64,

    #[arg(long)]
    pub n: usize,

    /// Confidence threshold; must lie in (0, 2^{-(d+3)}].
    #[arg(long)]
    pub delta: f64,

    /// Monte Carlo trials for the final exceedance estimate.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    /// Monte Carlo trials per cell and sign during the search.
    #[arg(long, default_value_t = 2_000)]
    pub search_trials: u64,

    #[arg(long)]
    pub seed: u64,

    /// Attacked estimator family: knn|bagged|kernel.
    #[arg(long, default_value = "knn")]
    pub estimator: String,

    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

pub fn run(args: LowerBoundArgs) -> Result<i32> {
    let family = EstimatorFamily::parse(&args.estimator)?;
    let report = run_lower_bound(
        family,
        args.d,
        args.sigma,
        args.n,
        args.delta,
        args.search_trials,
        args.trials,
        args.seed,
    )?;
    println!(
        "instance: d={} n={} sigma={:e} delta={:e} h={:e} cells={} side={:e} rho={:e}",
        report.d,
        report.n,
        report.sigma,
        report.delta,
        report.h,
        report.cells,
        report.side_length,
        report.rho
    );
    println!(
        "attack: estimator={} signs={:?} threshold={:e}",
        report.estimator, report.signs, report.threshold
    );
    println!(
        "exceedance: point={:e} cp_lower={:e} cp_upper={:e} trials={} delta={:e} exhibits_lower_bound={}",
        report.tail.point,
        report.tail.cp_lower,
        report.tail.cp_upper,
        report.tail.trials,
        report.delta,
        report.exhibits_lower_bound()
    );
    if let Some(path) = &args.out_json {
        write_text(path, &json_document(&report)?)?;
    }
    Ok(0)
}
