use std::path::PathBuf;

use clap::Args;
use momreg_core::error::Result;
use momreg_core::seeds::derive_seed;
use momreg_core::{adaptive_predict, Dataset, EstimatorFamily};

use crate::output::{csv_document, field_f64, field_usize, write_text};

use super::{model_from_flags, parse_point};

#[derive(Args)]
pub struct AdaptiveArgs {
    /// Dataset CSV with header x1,...,xd,y.
    #[arg(long)]
    pub data: PathBuf,

    /// Query point as comma-separated coordinates; repeatable.
    #[arg(long = "query", required = true)]
    pub queries: Vec<String>,

    /// Estimator family: knn|bagged|mnn|kernel|partition.
    #[arg(long, default_value = "knn")]
    pub estimator: String,

    #[arg(long)]
    pub sigma: Option<f64>,

    #[arg(long)]
    pub rho: Option<f64>,

    #[arg(long)]
    pub alpha: Option<f64>,

    /// Support diameter (defaults to sqrt(d)).
    #[arg(long)]
    pub diameter: Option<f64>,

    /// Seed for tie-breaking streams.
    #[arg(long)]
    pub seed: u64,

    /// Write the estimates CSV here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: AdaptiveArgs) -> Result<i32> {
    let dataset = Dataset::read_csv_path(&args.data)?;
    let family = EstimatorFamily::parse(&args.estimator)?;
    let d = dataset.dim();
    let model = model_from_flags(
        args.sigma,
        args.rho,
        args.alpha,
        args.diameter,
        d,
        family,
        "adaptive estimation",
    )?;

    let mut rows = Vec::with_capacity(args.queries.len());
    for (idx, raw) in args.queries.iter().enumerate() {
        let query = parse_point(raw, d)?;
        // Fresh tie-break stream per query.
        let seed = derive_seed(args.seed, idx as u64);
        let estimate = adaptive_predict(&dataset, &query, family, &model, seed)?;
        let mut row: Vec<String> = query.coords().iter().map(|c| field_f64(*c)).collect();
        row.push(field_f64(estimate.estimate));
        row.push(field_usize(estimate.m_hat));
        row.push(field_usize(estimate.skipped.len()));
        rows.push(row);
    }

    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.push("estimate".to_string());
    header.push("m_hat".to_string());
    header.push("skipped_m".to_string());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let doc = csv_document(&header_refs, &rows);
    print!("{doc}");
    if let Some(path) = &args.out {
        write_text(path, &doc)?;
    }
    Ok(0)
}
