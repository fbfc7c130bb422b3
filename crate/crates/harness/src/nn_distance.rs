//! Monte Carlo check of the expected nearest-neighbor distance bound
//! E[D_(i)(x)] ≤ 2(i/(ρ(N+1)))^{1/d} for uniform features on [0,1]^d.

use momreg_core::error::{Error, Result};
use momreg_core::seeds::{derive_seed, stream_rng};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::lower_bound::rho_unit_cube;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NnDistanceCheck {
    pub d: usize,
    pub n_points: usize,
    pub rank: usize,
    pub empirical_mean: f64,
    pub std_error: f64,
    pub bound: f64,
}

impl NnDistanceCheck {
    /// Empirical mean below the bound, with Monte Carlo slack.
    pub fn holds_within(&self, sigmas: f64) -> bool {
        self.empirical_mean <= self.bound + sigmas * self.std_error
    }
}

/// Estimate E[D_(rank)(x)] for each rank over shared trials, and pair it
/// with the closed-form bound using the unit-cube small-ball constant.
pub fn nn_distance_profile(
    d: usize,
    n_points: usize,
    ranks: &[usize],
    x: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<NnDistanceCheck>> {
    if x.len() != d {
        return Err(Error::invalid("query point has wrong dimension"));
    }
    if ranks.iter().any(|&r| r < 1 || r > n_points) {
        return Err(Error::invalid("ranks must lie in [1, N]"));
    }
    if trials < 2 {
        return Err(Error::invalid("need at least two trials"));
    }
    let max_rank = ranks.iter().copied().max().expect("nonempty ranks");

    // One row of order statistics per trial, in trial order.
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(derive_seed(seed, trial), 0);
            let mut dist_sq: Vec<f64> = (0..n_points)
                .map(|_| {
                    (0..d)
                        .map(|axis| {
                            let c: f64 = rng.random();
                            (c - x[axis]) * (c - x[axis])
                        })
                        .sum()
                })
                .collect();
            if max_rank < n_points {
                dist_sq.select_nth_unstable_by(max_rank - 1, f64::total_cmp);
                dist_sq.truncate(max_rank);
            }
            dist_sq.sort_by(f64::total_cmp);
            ranks.iter().map(|&r| dist_sq[r - 1].sqrt()).collect()
        })
        .collect();

    let rho = rho_unit_cube(d);
    Ok(ranks
        .iter()
        .enumerate()
        .map(|(col, &rank)| {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for row in &rows {
                sum += row[col];
                sum_sq += row[col] * row[col];
            }
            let mean = sum / trials as f64;
            let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
            NnDistanceCheck {
                d,
                n_points,
                rank,
                empirical_mean: mean,
                std_error: (var / trials as f64).sqrt(),
                bound: 2.0 * (rank as f64 / (rho * (n_points as f64 + 1.0))).powf(1.0 / d as f64),
            }
        })
        .collect())
}

/// Single-rank convenience wrapper.
pub fn expected_nn_distance_check(
    d: usize,
    n_points: usize,
    rank: usize,
    x: &[f64],
    trials: u64,
    seed: u64,
) -> Result<NnDistanceCheck> {
    Ok(nn_distance_profile(d, n_points, &[rank], x, trials, seed)?
        .pop()
        .expect("one rank requested"))
}
