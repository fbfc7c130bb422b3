use std::path::PathBuf;

use clap::Args;
use momreg_core::error::{Error, Result};
use momreg_harness::{
    estimate_tail, parse_scenario, trials_needed_for, ScenarioDoc, TailReport, ThresholdSpec,
    CP_LEVEL,
};
use serde::Serialize;

use crate::output::{csv_document, field_f64, field_u64, field_usize, json_document, write_text};

#[derive(Args)]
pub struct TailArgs {
    /// Scenario file (key-value sections).
    #[arg(long)]
    pub scenario: PathBuf,

    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Override the scenario trial count.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Exceedance threshold: "auto" for the theoretical confidence radius,
    /// or an explicit number.
    #[arg(long, default_value = "auto")]
    pub threshold: String,

    /// Write a one-row results CSV here.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,

    /// Write the JSON report (full config echo) here.
    #[arg(long)]
    pub out_json: Option<PathBuf>,

    /// Exit 4 unless the exceedance upper bound is within delta.
    #[arg(long = "assert")]
    pub assert_certified: bool,
}

#[derive(Serialize)]
struct TailDocument<'a> {
    config: &'a ScenarioDoc,
    report: &'a TailReport,
    certified: bool,
}

fn csv_report(report: &TailReport) -> String {
    let header = [
        "scenario",
        "estimator",
        "n",
        "d",
        "delta",
        "threshold",
        "exceedances",
        "trials",
        "cp_lower",
        "cp_upper",
    ];
    let row = vec![
        report.scenario_id.clone(),
        report.estimator.clone(),
        field_usize(report.n),
        field_usize(report.d),
        field_f64(report.delta),
        field_f64(report.threshold),
        field_u64(report.tail.exceedances),
        field_u64(report.tail.trials),
        field_f64(report.tail.cp_lower),
        field_f64(report.tail.cp_upper),
    ];
    csv_document(&header, &[row])
}

pub fn run(args: TailArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.scenario)?;
    let (mut spec, mut doc) = parse_scenario(&text, &args.scenario.display().to_string())?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
        doc.get_mut("scenario")
            .expect("scenario section exists")
            .insert("seed".to_string(), seed.to_string());
    }
    if let Some(trials) = args.trials {
        spec.trials = trials;
        doc.get_mut("scenario")
            .expect("scenario section exists")
            .insert("trials".to_string(), trials.to_string());
    }

    let threshold =
        match args.threshold.as_str() {
            "auto" => ThresholdSpec::Auto,
            raw => ThresholdSpec::Value(raw.parse::<f64>().map_err(|e| {
                Error::invalid(format!("--threshold must be auto or a number: {e}"))
            })?),
        };

    let report = estimate_tail(&spec, threshold)?;
    if !report.powered {
        eprintln!(
            "warning: {} trials cannot certify delta = {:e} (need >= {}); upper bounds stay above delta even at zero exceedances",
            report.tail.trials,
            report.delta,
            trials_needed_for(report.delta, CP_LEVEL)
        );
    }

    let certified = report.certified();
    println!(
        "scenario={} estimator={} n={} d={} delta={:e} threshold={:e} exceedances={} trials={} cp_lower={:e} cp_upper={:e} certified={}",
        report.scenario_id,
        report.estimator,
        report.n,
        report.d,
        report.delta,
        report.threshold,
        report.tail.exceedances,
        report.tail.trials,
        report.tail.cp_lower,
        report.tail.cp_upper,
        certified
    );

    if let Some(path) = &args.out_csv {
        write_text(path, &csv_report(&report))?;
    }
    if let Some(path) = &args.out_json {
        let document = TailDocument {
            config: &doc,
            report: &report,
            certified,
        };
        write_text(path, &json_document(&document)?)?;
    }

    if args.assert_certified && !certified {
        eprintln!(
            "assertion failed: cp_upper {:e} > delta {:e}",
            report.tail.cp_upper, report.delta
        );
        return Ok(4);
    }
    Ok(0)
}
