//! A threshold-free estimator: nested per-m confidence intervals, first
//! nonempty suffix intersection, midpoint output.

use crate::data::{Dataset, Point};
use crate::error::{Error, Result};
use crate::model::{EstimatorFamily, ModelClass};
use crate::mom::{mom_predict, radius_constant, select_tuning, validity_constant, MoMConfig};

/// A per-m confidence interval centered at the m-block prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub center: f64,
    pub half_width: f64,
    pub m: usize,
}

impl ConfidenceInterval {
    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lo() && value <= self.hi()
    }

    /// Full interval width, 2 · half_width.
    pub fn width(&self) -> f64 {
        2.0 * self.half_width
    }
}

/// Half-width of the m-block interval: a·(σ²m/(ρn))^{1/(d+2)}, the per-m
/// radius with the threshold-derived block count replaced by m itself.
pub fn per_m_half_width(
    family: EstimatorFamily,
    model: &ModelClass,
    n: usize,
    m: usize,
) -> Result<f64> {
    if m < 1 {
        return Err(Error::invalid("m must be at least 1"));
    }
    let a = radius_constant(family, model)?;
    let d = model.d as f64;
    Ok(a * (model.sigma * model.sigma * m as f64 / (model.rho * n as f64)).powf(1.0 / (d + 2.0)))
}

/// Confidence interval for one block count m, the base estimator re-tuned
/// for that m.
pub fn interval_for(
    dataset: &Dataset,
    x: &Point,
    m: usize,
    family: EstimatorFamily,
    model: &ModelClass,
    seed: u64,
) -> Result<ConfidenceInterval> {
    let n = dataset.len();
    let c = validity_constant(family, model)?;
    let max_m = (c * n as f64).floor() as usize;
    if m < 1 || m > max_m {
        return Err(Error::invalid(format!("m = {m} out of range [1, {max_m}]")));
    }
    let base = select_tuning(family, model, n, m)?;
    let config = MoMConfig { m, base };
    let center = mom_predict(dataset, x, &config, seed)?;
    let half_width = per_m_half_width(family, model, n, m)?;
    Ok(ConfidenceInterval {
        center,
        half_width,
        m,
    })
}

/// The adaptive estimate with the block count it settled on.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveEstimate {
    pub estimate: f64,
    pub m_hat: usize,
    /// Block counts whose tuning rule was infeasible and were skipped.
    pub skipped: Vec<usize>,
}

/// Smallest index whose suffix intersection is nonempty, with the midpoint of
/// that intersection. Suffix stats come from one backward max/min sweep.
/// Nonemptiness is monotone in the start index, and the final singleton
/// suffix is always nonempty, so a result exists for nonempty input.
pub fn first_nonempty_suffix(intervals: &[(f64, f64)]) -> Option<(usize, f64)> {
    if intervals.is_empty() {
        return None;
    }
    let k = intervals.len();
    let mut lo_max = vec![f64::NEG_INFINITY; k];
    let mut hi_min = vec![f64::INFINITY; k];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in (0..k).rev() {
        lo = lo.max(intervals[i].0);
        hi = hi.min(intervals[i].1);
        lo_max[i] = lo;
        hi_min[i] = hi;
    }
    (0..k)
        .find(|&i| lo_max[i] <= hi_min[i])
        .map(|i| (i, (lo_max[i] + hi_min[i]) / 2.0))
}

/// Compute intervals for every feasible m in [1, ⌊cn⌋].
pub fn intervals_up_to_cn(
    dataset: &Dataset,
    x: &Point,
    family: EstimatorFamily,
    model: &ModelClass,
    seed: u64,
) -> Result<(Vec<ConfidenceInterval>, Vec<usize>)> {
    let n = dataset.len();
    let c = validity_constant(family, model)?;
    let max_m = (c * n as f64).floor() as usize;
    if max_m < 1 {
        return Err(Error::config("floor(c*n) >= 1", c * n as f64, 1.0));
    }
    let max_m = max_m.min(n);
    let mut intervals = Vec::with_capacity(max_m);
    let mut skipped = Vec::new();
    for m in 1..=max_m {
        match select_tuning(family, model, n, m) {
            Ok(base) => {
                let config = MoMConfig { m, base };
                let center = mom_predict(dataset, x, &config, seed)?;
                let half_width = per_m_half_width(family, model, n, m)?;
                intervals.push(ConfidenceInterval {
                    center,
                    half_width,
                    m,
                });
            }
            Err(Error::Config { .. }) => skipped.push(m),
            Err(other) => return Err(other),
        }
    }
    if intervals.is_empty() {
        return Err(Error::config("at least one feasible block count", 0.0, 1.0));
    }
    Ok((intervals, skipped))
}

/// Pick m̂ and the midpoint estimate from precomputed intervals.
pub fn adaptive_from_intervals(
    intervals: &[ConfidenceInterval],
    skipped: Vec<usize>,
) -> Result<AdaptiveEstimate> {
    let pairs: Vec<(f64, f64)> = intervals.iter().map(|i| (i.lo(), i.hi())).collect();
    let (idx, estimate) =
        first_nonempty_suffix(&pairs).ok_or_else(|| Error::invalid("no intervals to intersect"))?;
    Ok(AdaptiveEstimate {
        estimate,
        m_hat: intervals[idx].m,
        skipped,
    })
}

/// The threshold-free estimate: midpoint of the first nonempty suffix
/// intersection of the per-m intervals.
pub fn adaptive_predict(
    dataset: &Dataset,
    x: &Point,
    family: EstimatorFamily,
    model: &ModelClass,
    seed: u64,
) -> Result<AdaptiveEstimate> {
    let (intervals, skipped) = intervals_up_to_cn(dataset, x, family, model, seed)?;
    adaptive_from_intervals(&intervals, skipped)
}

/// Smallest m in [1, ⌊cn⌋] with e^{−m}/(1−e^{−1}) ≤ delta.
pub fn m_delta(delta: f64, c: f64, n: usize) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta = {delta} must lie in (0, 1)"
        )));
    }
    let max_m = (c * n as f64).floor() as usize;
    if max_m < 1 {
        return Err(Error::invalid("floor(c*n) must be at least 1"));
    }
    let norm = 1.0 - (-1.0f64).exp();
    for m in 1..=max_m {
        if (-(m as f64)).exp() / norm <= delta {
            return Ok(m);
        }
    }
    Err(Error::invalid(format!(
        "delta = {delta} below the admissible range [{}, 1)",
        (-(max_m as f64)).exp() / norm
    )))
}
