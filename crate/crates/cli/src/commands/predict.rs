use std::path::PathBuf;

use clap::Args;
use momreg_core::error::{Error, Result};
use momreg_core::seeds::derive_seed;
use momreg_core::{
    bound_radius, mom_predict, select_m, select_tuning, BaseEstimatorKind, Dataset,
    EstimatorFamily, MoMConfig,
};

use crate::output::{csv_document, field_f64, field_usize, write_text};

use super::{model_from_flags, parse_point};

#[derive(Args)]
pub struct PredictArgs {
    /// Dataset CSV with header x1,...,xd,y.
    #[arg(long)]
    pub data: PathBuf,

    /// Query point as comma-separated coordinates; repeatable.
    #[arg(long = "query", required = true)]
    pub queries: Vec<String>,

    /// Estimator family: knn|bagged|mnn|kernel|partition.
    #[arg(long)]
    pub estimator: String,

    /// Neighbor or subsample count (knn, bagged, mnn).
    #[arg(long)]
    pub k: Option<usize>,

    /// Kernel bandwidth.
    #[arg(long)]
    pub bandwidth: Option<f64>,

    /// Partition cells per axis.
    #[arg(long)]
    pub cells: Option<usize>,

    /// Bagged subsampling without replacement.
    #[arg(long)]
    pub without_replacement: bool,

    /// Block count; defaults to 1 unless --auto derives it from --delta.
    #[arg(long)]
    pub m: Option<usize>,

    /// Derive block count and tuning from --sigma/--rho/--delta.
    #[arg(long)]
    pub auto: bool,

    #[arg(long)]
    pub sigma: Option<f64>,

    #[arg(long)]
    pub rho: Option<f64>,

    #[arg(long)]
    pub delta: Option<f64>,

    #[arg(long)]
    pub alpha: Option<f64>,

    /// Support diameter (defaults to sqrt(d) for data in the unit cube).
    #[arg(long)]
    pub diameter: Option<f64>,

    /// Report the contamination-inflated confidence radius.
    #[arg(long)]
    pub robust: bool,

    /// Seed for tie-breaking streams.
    #[arg(long)]
    pub seed: u64,

    /// Write the predictions CSV here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn explicit_base(args: &PredictArgs, family: EstimatorFamily) -> Result<BaseEstimatorKind> {
    let need_k = || {
        args.k
            .ok_or_else(|| Error::invalid("this estimator requires --k"))
    };
    Ok(match family {
        EstimatorFamily::Knn => BaseEstimatorKind::Knn(need_k()?),
        EstimatorFamily::BaggedOneNn => BaseEstimatorKind::BaggedOneNn {
            k: need_k()?,
            with_replacement: !args.without_replacement,
        },
        EstimatorFamily::MutualNn => BaseEstimatorKind::MutualNn(need_k()?),
        EstimatorFamily::Kernel => BaseEstimatorKind::Kernel(
            args.bandwidth
                .ok_or_else(|| Error::invalid("kernel estimator requires --bandwidth"))?,
        ),
        EstimatorFamily::Partition => BaseEstimatorKind::Partition(
            args.cells
                .ok_or_else(|| Error::invalid("partition estimator requires --cells"))?,
        ),
    })
}

pub fn run(args: PredictArgs) -> Result<i32> {
    let dataset = Dataset::read_csv_path(&args.data)?;
    let family = EstimatorFamily::parse(&args.estimator)?;
    let d = dataset.dim();
    let n = dataset.len();

    // A model is mandatory under --auto and otherwise optional; when present
    // it adds the confidence-radius column.
    let model = if args.auto || args.sigma.is_some() || args.rho.is_some() {
        Some(model_from_flags(
            args.sigma,
            args.rho,
            args.alpha,
            args.diameter,
            d,
            family,
            if args.auto {
                "--auto"
            } else {
                "radius reporting"
            },
        )?)
    } else {
        None
    };

    let (m, base) = if args.auto {
        let delta = args
            .delta
            .ok_or_else(|| Error::invalid("--auto requires --delta"))?;
        let model = model.as_ref().expect("model required under --auto");
        let m = select_m(delta)?;
        (m, select_tuning(family, model, n, m)?)
    } else {
        (args.m.unwrap_or(1), explicit_base(&args, family)?)
    };

    let radius = match (&model, args.delta) {
        (Some(model), Some(delta)) => {
            Some(bound_radius(family, model, n, delta, args.robust)?.radius)
        }
        _ => None,
    };

    let config = MoMConfig { m, base };
    let mut rows = Vec::with_capacity(args.queries.len());
    for (idx, raw) in args.queries.iter().enumerate() {
        let query = parse_point(raw, d)?;
        // Fresh tie-break stream per query.
        let seed = derive_seed(args.seed, idx as u64);
        let prediction = mom_predict(&dataset, &query, &config, seed)?;
        let mut row: Vec<String> = query.coords().iter().map(|c| field_f64(*c)).collect();
        row.push(field_f64(prediction));
        row.push(field_usize(m));
        if let Some(radius) = radius {
            row.push(field_f64(radius));
        }
        rows.push(row);
    }

    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.push("prediction".to_string());
    header.push("m".to_string());
    if radius.is_some() {
        header.push("radius".to_string());
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let doc = csv_document(&header_refs, &rows);
    print!("{doc}");
    if let Some(path) = &args.out {
        write_text(path, &doc)?;
    }
    Ok(0)
}
