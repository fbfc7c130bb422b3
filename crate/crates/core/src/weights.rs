//! Deterministic weight vectors for weighted nearest-neighbor rules.

use crate::error::{Error, Result};

/// Tolerated deviation of a weight sum from 1. The closed forms below are
/// exactly normalized, so a larger drift signals a bug rather than roundoff.
const SUM_TOLERANCE: f64 = 1e-12;

/// Slack for the nonincreasing check; consecutive weights may differ by a few
/// ulp after powf/exp even when mathematically equal.
const MONOTONE_TOLERANCE: f64 = 1e-12;

/// A probability vector over neighbor ranks: entries in [0,1], summing to 1,
/// nonincreasing in rank.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    v: Vec<f64>,
}

impl WeightVector {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::invalid("weight vector must be nonempty"));
        }
        if v.iter().any(|w| !w.is_finite() || *w < 0.0 || *w > 1.0) {
            return Err(Error::invalid("weights must lie in [0, 1]"));
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Internal(format!(
                "weight sum {sum} deviates from 1 by more than {SUM_TOLERANCE}"
            )));
        }
        if v.windows(2).any(|w| w[1] > w[0] + MONOTONE_TOLERANCE) {
            return Err(Error::Internal(
                "weights must be nonincreasing in rank".to_string(),
            ));
        }
        Ok(WeightVector { v })
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.v
    }

    /// Length of the leading support: 1 + index of the last strictly positive
    /// weight. Ranks past this never contribute to a prediction.
    pub fn support_len(&self) -> usize {
        self.v
            .iter()
            .rposition(|w| *w > 0.0)
            .map_or(0, |last| last + 1)
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::invalid(format!("k = {k} out of range [1, {n}]")));
    }
    Ok(())
}

/// Uniform k-nearest-neighbor weights: v_i = 1/k for i ≤ k, else 0.
pub fn knn_weights(k: usize, n: usize) -> Result<WeightVector> {
    check_k(k, n)?;
    let mut v = vec![0.0; n];
    for w in v.iter_mut().take(k) {
        *w = 1.0 / k as f64;
    }
    WeightVector::new(v)
}

/// Bagged 1-NN weights for subsamples of size k drawn with replacement:
/// v_i = (1 − (i−1)/N)^k − (1 − i/N)^k.
pub fn bagged_weights_with_replacement(k: usize, n: usize) -> Result<WeightVector> {
    check_k(k, n)?;
    let nf = n as f64;
    let kf = k as f64;
    let v = (1..=n)
        .map(|i| {
            let hi = 1.0 - (i as f64 - 1.0) / nf;
            let lo = 1.0 - i as f64 / nf;
            hi.powf(kf) - lo.powf(kf)
        })
        .collect();
    WeightVector::new(v)
}

/// Bagged 1-NN weights for subsamples of size k drawn without replacement:
/// v_i = C(N−i, k−1)/C(N, k) for i ≤ N−k+1, else 0. The i-th nearest point
/// is the subsample's 1-NN iff it is selected and no closer point is.
/// Binomial ratios are evaluated as log-gamma differences so large N do not
/// overflow; the hockey-stick identity makes the sum exactly 1.
pub fn bagged_weights_without_replacement(k: usize, n: usize) -> Result<WeightVector> {
    check_k(k, n)?;
    let ln_total = ln_choose(n as u64, k as u64);
    let v = (1..=n)
        .map(|i| {
            if i <= n - k + 1 {
                (ln_choose((n - i) as u64, (k - 1) as u64) - ln_total).exp()
            } else {
                0.0
            }
        })
        .collect();
    WeightVector::new(v)
}

/// ln C(n, k) via log-gamma.
fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    libm::lgamma((n + 1) as f64) - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
}
