//! Exact binomial tails and Clopper-Pearson confidence bounds.
//!
//! Monte Carlo certification targets probabilities around e^{-m}, far too
//! small for normal approximations at desk-scale trial counts, so everything
//! here is exact: small-n tails by integer-coefficient summation, interval
//! endpoints by bisection on the exact CDF.

use serde::Serialize;

/// C(n, k) as an exact integer; n must stay small enough to fit (n ≤ 64 is
/// plenty for the oracle grids).
fn binomial_u128(n: u64, k: u64) -> u128 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact P(Bin(n, p) ≥ j_min) by direct summation.
pub fn exact_tail_geq(n: u64, j_min: u64, p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p));
    if j_min > n {
        return 0.0;
    }
    if j_min == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for j in j_min..=n {
        let coeff = binomial_u128(n, j) as f64;
        total += coeff * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32);
    }
    total
}

/// Smallest integer j with j ≥ n·gamma, as the exact threshold for events
/// written as "at least a gamma fraction".
pub fn fraction_threshold(n: u64, num: u64, den: u64) -> u64 {
    // ceil(n·num/den) without floating point.
    (n * num).div_ceil(den)
}

/// P(X ≤ x) for X ~ Bin(n, p), summed in linear space after a log-space
/// shift. Coefficients advance by ratios, so no factorial overflows.
fn binom_cdf_leq(n: u64, x: u64, p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    if x >= n {
        return 1.0;
    }
    let lp = p.ln();
    let lq = (-p).ln_1p();
    // log pmf at j, advanced incrementally.
    let mut log_terms = Vec::with_capacity((x + 1) as usize);
    let mut log_pmf = n as f64 * lq;
    let mut max_log = log_pmf;
    log_terms.push(log_pmf);
    for j in 0..x {
        log_pmf += ((n - j) as f64 / (j + 1) as f64).ln() + lp - lq;
        log_terms.push(log_pmf);
        if log_pmf > max_log {
            max_log = log_pmf;
        }
    }
    let sum: f64 = log_terms.iter().map(|lt| (lt - max_log).exp()).sum();
    (max_log.exp() * sum).min(1.0)
}

/// P(X ≥ x) for X ~ Bin(n, p), same scheme from the upper end.
fn binom_sf_geq(n: u64, x: u64, p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    if x == 0 {
        return 1.0;
    }
    if x > n {
        return 0.0;
    }
    let lp = p.ln();
    let lq = (-p).ln_1p();
    let mut log_terms = Vec::with_capacity((n - x + 1) as usize);
    let mut log_pmf = n as f64 * lp;
    let mut max_log = log_pmf;
    log_terms.push(log_pmf);
    // Walk j = n down to x.
    let mut j = n;
    while j > x {
        log_pmf += (j as f64 / (n - j + 1) as f64).ln() + lq - lp;
        log_terms.push(log_pmf);
        if log_pmf > max_log {
            max_log = log_pmf;
        }
        j -= 1;
    }
    let sum: f64 = log_terms.iter().map(|lt| (lt - max_log).exp()).sum();
    (max_log.exp() * sum).min(1.0)
}

/// Solve f(p) = target for monotone f by bisection on [0, 1].
fn bisect(mut f: impl FnMut(f64) -> f64, target: f64, increasing: bool) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = f(mid);
        let go_right = if increasing {
            value < target
        } else {
            value > target
        };
        if go_right {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided Clopper-Pearson interval at confidence `level`.
///
/// The lower endpoint solves P(X ≥ x | p) = (1−level)/2 and the upper solves
/// P(X ≤ x | p) = (1−level)/2, with the usual closed endpoints at x = 0 and
/// x = n.
pub fn clopper_pearson(successes: u64, trials: u64, level: f64) -> (f64, f64) {
    assert!(trials > 0, "need at least one trial");
    assert!(successes <= trials);
    assert!((0.0..1.0).contains(&level) && level > 0.0);
    let alpha2 = (1.0 - level) / 2.0;
    let lower = if successes == 0 {
        0.0
    } else {
        // sf is increasing in p.
        bisect(|p| binom_sf_geq(trials, successes, p), alpha2, true)
    };
    let upper = if successes == trials {
        1.0
    } else {
        // cdf is decreasing in p.
        bisect(|p| binom_cdf_leq(trials, successes, p), alpha2, false)
    };
    (lower, upper)
}

/// A Monte Carlo exceedance count with its exact confidence bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub exceedances: u64,
    pub trials: u64,
    pub point: f64,
    pub cp_lower: f64,
    pub cp_upper: f64,
    pub level: f64,
}

impl TailEstimate {
    pub fn from_counts(exceedances: u64, trials: u64, level: f64) -> Self {
        let (cp_lower, cp_upper) = clopper_pearson(exceedances, trials, level);
        TailEstimate {
            exceedances,
            trials,
            point: exceedances as f64 / trials as f64,
            cp_lower,
            cp_upper,
            level,
        }
    }
}

/// Trials needed for a zero-exceedance run to certify a tail below `delta`:
/// 1 − ((1−level)/2)^{1/T} ≤ δ.
pub fn trials_needed_for(delta: f64, level: f64) -> u64 {
    let alpha2 = (1.0 - level) / 2.0;
    (alpha2.ln() / (-delta).ln_1p()).ceil() as u64
}
