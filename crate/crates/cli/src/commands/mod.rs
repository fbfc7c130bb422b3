pub mod adaptive;
pub mod contaminate_demo;
pub mod lower_bound;
pub mod oracles;
pub mod predict;
pub mod tail;

use momreg_core::error::{Error, Result};
use momreg_core::{EstimatorFamily, ModelClass, Point};

/// Parse a comma-separated coordinate list.
pub fn parse_point(raw: &str, d: usize) -> Result<Point> {
    let coords: Result<Vec<f64>> = raw
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("bad coordinate {f:?}: {e}")))
        })
        .collect();
    let coords = coords?;
    if coords.len() != d {
        return Err(Error::invalid(format!(
            "query {raw:?} has {} coordinates, dataset dimension is {d}",
            coords.len()
        )));
    }
    Point::new(coords)
}

/// Build a model class from the common flag set. The support diameter
/// defaults to that of the unit cube.
pub fn model_from_flags(
    sigma: Option<f64>,
    rho: Option<f64>,
    alpha: Option<f64>,
    diameter: Option<f64>,
    d: usize,
    family: EstimatorFamily,
    context: &str,
) -> Result<ModelClass> {
    let sigma = sigma.ok_or_else(|| Error::invalid(format!("{context} requires --sigma")))?;
    let rho = rho.ok_or_else(|| Error::invalid(format!("{context} requires --rho")))?;
    if family == EstimatorFamily::MutualNn && alpha.is_none() {
        return Err(Error::invalid(format!(
            "{context} with mnn requires --alpha"
        )));
    }
    ModelClass::new(
        rho,
        sigma,
        d,
        diameter.unwrap_or_else(|| (d as f64).sqrt()),
        alpha,
    )
}
