//! The distribution class the closed-form tuning rules are valid for.

use crate::error::{Error, Result};

/// Estimator family, independent of any concrete tuning value. Constants in
/// the tuning rules and confidence radii are family-specific.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorFamily {
    Knn,
    BaggedOneNn,
    MutualNn,
    Kernel,
    Partition,
}

impl EstimatorFamily {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorFamily::Knn => "knn",
            EstimatorFamily::BaggedOneNn => "bagged",
            EstimatorFamily::MutualNn => "mnn",
            EstimatorFamily::Kernel => "kernel",
            EstimatorFamily::Partition => "partition",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "knn" => Ok(EstimatorFamily::Knn),
            "bagged" => Ok(EstimatorFamily::BaggedOneNn),
            "mnn" => Ok(EstimatorFamily::MutualNn),
            "kernel" => Ok(EstimatorFamily::Kernel),
            "partition" => Ok(EstimatorFamily::Partition),
            other => Err(Error::invalid(format!(
                "unknown estimator {other:?}; expected knn|bagged|mnn|kernel|partition"
            ))),
        }
    }
}

/// Known distribution-class parameters.
///
/// `rho` is the small-ball constant: every ball of radius ε around a support
/// point carries mass at least ρε^d. `sigma` bounds the conditional noise
/// standard deviation. `alpha` is the doubling constant, needed only by the
/// mutual nearest-neighbor rules.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelClass {
    pub rho: f64,
    pub sigma: f64,
    pub d: usize,
    pub diameter: f64,
    pub alpha: Option<f64>,
}

impl ModelClass {
    pub fn new(rho: f64, sigma: f64, d: usize, diameter: f64, alpha: Option<f64>) -> Result<Self> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::invalid("rho must be positive and finite"));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::invalid("sigma must be positive and finite"));
        }
        if d < 1 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !diameter.is_finite() || diameter <= 0.0 {
            return Err(Error::invalid("diameter must be positive and finite"));
        }
        // Mass at the full diameter forces ρ ≤ D^{−d}.
        let cap = diameter.powi(-(d as i32));
        if rho > cap * (1.0 + 1e-12) {
            return Err(Error::config("rho <= diameter^{-d}", rho, cap));
        }
        if let Some(a) = alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::invalid("alpha must lie in (0, 1]"));
            }
        }
        Ok(ModelClass {
            rho,
            sigma,
            d,
            diameter,
            alpha,
        })
    }

    pub(crate) fn alpha_required(&self) -> Result<f64> {
        self.alpha
            .ok_or_else(|| Error::invalid("doubling constant alpha required for mutual-NN rules"))
    }
}
