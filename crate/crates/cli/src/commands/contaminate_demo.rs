use std::path::PathBuf;

use clap::Args;
use momreg_core::error::Result;
use momreg_core::{select_m, EstimatorFamily};
use momreg_harness::{
    estimate_tail, mom_budget_ok, ContaminationSpec, EstimatorSpec, NoiseSpec, OutlierPlacement,
    OutlierX, QueryPolicy, ScenarioSpec, TailReport, TargetFn, ThresholdSpec,
};
use serde::Serialize;

use crate::output::{json_document, write_text};

/// Head-to-head run on identical contaminated datasets: the block median
/// against its robust radius versus the pooled single-block estimator
/// against the clean radius.
#[derive(Args)]
pub struct ContaminateDemoArgs {
    #[arg(long, default_value_t = 4096)]
    pub n: usize,

    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,

    /// Confidence threshold; the block count is ⌈ln(1/δ)⌉.
    #[arg(long, default_value_t = 1.831563888873418e-2)]
    pub delta: f64,

    #[arg(long, default_value_t = 1)]
    pub outliers: usize,

    #[arg(long, default_value_t = 2_000)]
    pub trials: u64,

    #[arg(long)]
    pub seed: u64,

    /// Exit 4 unless the block median certifies its robust radius.
    #[arg(long = "assert")]
    pub assert_certified: bool,

    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Serialize)]
struct DemoDocument {
    m: usize,
    outliers: usize,
    budget_ok: bool,
    mom: TailReport,
    pooled: TailReport,
    pooled_exceedance_rate: f64,
}

fn scenario(args: &ContaminateDemoArgs, m: Option<usize>, robust: bool) -> ScenarioSpec {
    ScenarioSpec {
        id: "contaminate-demo".to_string(),
        d: 1,
        n: args.n,
        target: TargetFn::Linear,
        noise: NoiseSpec::Gaussian { sigma: args.sigma },
        rho: 1.0,
        alpha: None,
        estimator: EstimatorSpec::Mom {
            family: EstimatorFamily::Knn,
            m,
            tuning: None,
            robust,
        },
        delta: args.delta,
        trials: args.trials,
        seed: args.seed,
        query: QueryPolicy::Fixed { point: vec![0.5] },
        contamination: Some(ContaminationSpec {
            count: args.outliers,
            placement: OutlierPlacement::BlockConcentrated,
            y: 1e6 * args.sigma,
            x: OutlierX::Fixed(vec![0.5]),
        }),
    }
}

pub fn run(args: ContaminateDemoArgs) -> Result<i32> {
    let m = select_m(args.delta)?;
    let budget_ok = mom_budget_ok(m, args.outliers);
    println!(
        "contamination budget: m={} outliers={} m>=4|O|: {}",
        m, args.outliers, budget_ok
    );

    // Block median against the contamination-inflated radius.
    let mom_report = estimate_tail(&scenario(&args, None, true), ThresholdSpec::Auto)?;
    println!(
        "mom: estimator={} threshold={:e} exceedances={}/{} cp_upper={:e} certified={}",
        mom_report.estimator,
        mom_report.threshold,
        mom_report.tail.exceedances,
        mom_report.tail.trials,
        mom_report.tail.cp_upper,
        mom_report.certified()
    );

    // Pooled single-block estimator on the same data, against the clean
    // (non-inflated) radius. One outlier drives its neighborhood average.
    let pooled_report = estimate_tail(&scenario(&args, Some(1), false), ThresholdSpec::Auto)?;
    let pooled_rate = pooled_report.tail.point;
    println!(
        "pooled: estimator={} threshold={:e} exceedances={}/{} exceedance_rate={:e}",
        pooled_report.estimator,
        pooled_report.threshold,
        pooled_report.tail.exceedances,
        pooled_report.tail.trials,
        pooled_rate
    );

    let certified = mom_report.certified();
    if let Some(path) = &args.out_json {
        let document = DemoDocument {
            m,
            outliers: args.outliers,
            budget_ok,
            mom: mom_report,
            pooled: pooled_report,
            pooled_exceedance_rate: pooled_rate,
        };
        write_text(path, &json_document(&document)?)?;
    }
    if args.assert_certified && !certified {
        eprintln!("assertion failed: block median did not certify its robust radius");
        return Ok(4);
    }
    Ok(0)
}
