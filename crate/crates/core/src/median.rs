//! The order-statistic median used by the block aggregator.

use crate::error::{Error, Result};

/// Return the ⌈m/2⌉-th order statistic of `values` (1-indexed).
///
/// This is the smallest element r such that at least m/2 of the inputs are
/// ≤ r and at least m/2 are ≥ r. The result is always an element of the
/// input, also for even lengths (no midpoint averaging).
pub fn median_of(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("median of empty list"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[values.len().div_ceil(2) - 1])
}
