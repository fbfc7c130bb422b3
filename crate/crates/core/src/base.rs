//! The per-block base estimators aggregated by the block median.

use crate::data::{squared_distance, Point, Sample};
use crate::error::{Error, Result};
use crate::ordering::{nearest_ranked, rank_cmp, ranked_points, tie_uniforms, RankedPoint};
use crate::weights::{
    bagged_weights_with_replacement, bagged_weights_without_replacement, knn_weights, WeightVector,
};

/// A base estimator together with its tuning parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseEstimatorKind {
    /// Weighted nearest neighbors with an explicit weight profile.
    WeightedNn(WeightVector),
    /// Uniform k-nearest neighbors.
    Knn(usize),
    /// Bagged 1-NN over subsamples of size k.
    BaggedOneNn { k: usize, with_replacement: bool },
    /// Mutual k-nearest neighbors.
    MutualNn(usize),
    /// Naive kernel: average over the closed ball of radius h.
    Kernel(f64),
    /// Cell average on the cubic grid with `cells` cells per axis on [0,1]^d.
    Partition(usize),
}

impl BaseEstimatorKind {
    /// Check the tuning parameter against a block of size `n_block`.
    pub fn validate_for_block(&self, n_block: usize) -> Result<()> {
        match self {
            BaseEstimatorKind::WeightedNn(v) => {
                if v.len() != n_block {
                    return Err(Error::invalid(format!(
                        "weight vector length {} does not match block size {n_block}",
                        v.len()
                    )));
                }
            }
            BaseEstimatorKind::Knn(k)
            | BaseEstimatorKind::BaggedOneNn { k, .. }
            | BaseEstimatorKind::MutualNn(k) => {
                if *k < 1 || *k > n_block {
                    return Err(Error::invalid(format!(
                        "k = {k} out of range [1, {n_block}]"
                    )));
                }
            }
            BaseEstimatorKind::Kernel(h) => {
                if !h.is_finite() || *h <= 0.0 {
                    return Err(Error::invalid(format!("bandwidth h = {h} must be > 0")));
                }
            }
            BaseEstimatorKind::Partition(cells) => {
                if *cells < 1 {
                    return Err(Error::invalid("partition needs at least one cell per axis"));
                }
            }
        }
        Ok(())
    }
}

/// Weighted nearest-neighbor prediction: Σ_i v_i · Y_(i)(x), the responses
/// reordered by distance to `x` with seeded tie-breaking.
pub fn weighted_nn_predict(
    block: &[Sample],
    x: &Point,
    weights: &WeightVector,
    tie_seed: u64,
) -> Result<f64> {
    if weights.len() != block.len() {
        return Err(Error::invalid(format!(
            "weight vector length {} does not match block size {}",
            weights.len(),
            block.len()
        )));
    }
    // Ranks past the weight support never contribute; select only those.
    let support = weights.support_len();
    let nearest = nearest_ranked(block, x, tie_seed, support)?;
    Ok(nearest
        .iter()
        .zip(weights.as_slice())
        .map(|(r, w)| w * block[r.index].y)
        .sum())
}

/// Mutual k-nearest-neighbor prediction.
///
/// A block point belongs to the mutual set when it is among the k nearest of
/// the query, and the query is among its own k nearest after being inserted
/// in place of the point itself. The prediction is the average response over
/// the mutual set, with the convention 0/0 = 0. The inserted query receives
/// its own auxiliary tie-break uniform from the same stream as the block.
pub fn mnn_predict(block: &[Sample], x: &Point, k: usize, tie_seed: u64) -> Result<f64> {
    let n = block.len();
    if k < 1 || k > n {
        return Err(Error::invalid(format!("k = {k} out of range [1, {n}]")));
    }
    let ranked = ranked_points(block, x, tie_seed)?;
    // One extra uniform for the query itself; the first n match ranked_points.
    let query_tie = tie_uniforms(tie_seed, n + 1)[n];
    let ties: Vec<f64> = ranked.iter().map(|r| r.tie).collect();

    let mut neighbors = ranked;
    let take = k.min(n);
    if take < n {
        neighbors.select_nth_unstable_by(take - 1, rank_cmp);
        neighbors.truncate(take);
    }

    let mut sum = 0.0;
    let mut count = 0usize;
    for cand in &neighbors {
        let center = block[cand.index].x.coords();
        // Rank the query among the other block points, all measured from the
        // candidate. The query is mutual iff fewer than k competitors precede
        // it in that order.
        let query_key = RankedPoint {
            dist_sq: squared_distance(center, x.coords()),
            tie: query_tie,
            index: n,
        };
        let mut closer = 0usize;
        for (j, other) in block.iter().enumerate() {
            if j == cand.index {
                continue;
            }
            let other_key = RankedPoint {
                dist_sq: squared_distance(center, other.x.coords()),
                tie: ties[j],
                index: j,
            };
            if rank_cmp(&other_key, &query_key) == std::cmp::Ordering::Less {
                closer += 1;
                if closer >= k {
                    break;
                }
            }
        }
        if closer < k {
            sum += block[cand.index].y;
            count += 1;
        }
    }
    if count == 0 {
        Ok(0.0)
    } else {
        Ok(sum / count as f64)
    }
}

/// Naive kernel prediction: mean response over the closed ball of radius `h`
/// around `x`; 0 when the ball is empty.
pub fn kernel_predict(block: &[Sample], x: &Point, h: f64) -> Result<f64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::invalid(format!("bandwidth h = {h} must be > 0")));
    }
    if block.is_empty() {
        return Err(Error::invalid("block must be nonempty"));
    }
    if block[0].x.dim() != x.dim() {
        return Err(Error::invalid("query dimension does not match block"));
    }
    let h_sq = h * h;
    let mut sum = 0.0;
    let mut count = 0usize;
    for s in block {
        if squared_distance(s.x.coords(), x.coords()) <= h_sq {
            sum += s.y;
            count += 1;
        }
    }
    if count == 0 {
        Ok(0.0)
    } else {
        Ok(sum / count as f64)
    }
}

/// Cell index along one axis for the cubic grid on [0,1]: coordinates equal
/// to 1 map to the last cell.
fn cell_index(coord: f64, cells: usize) -> usize {
    ((coord * cells as f64) as usize).min(cells - 1)
}

fn check_unit_cube(coords: &[f64]) -> Result<()> {
    if coords.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(Error::invalid(format!(
            "coordinates {coords:?} outside [0,1]"
        )));
    }
    Ok(())
}

/// Partitioning prediction on [0,1]^d: mean response over the grid cell
/// containing `x`; 0 when the cell is empty.
pub fn partition_predict(block: &[Sample], x: &Point, cells: usize) -> Result<f64> {
    if cells < 1 {
        return Err(Error::invalid("partition needs at least one cell per axis"));
    }
    if block.is_empty() {
        return Err(Error::invalid("block must be nonempty"));
    }
    if block[0].x.dim() != x.dim() {
        return Err(Error::invalid("query dimension does not match block"));
    }
    check_unit_cube(x.coords())?;
    let query_cell: Vec<usize> = x.coords().iter().map(|&c| cell_index(c, cells)).collect();
    let mut sum = 0.0;
    let mut count = 0usize;
    for s in block {
        check_unit_cube(s.x.coords())?;
        let same_cell =
            s.x.coords()
                .iter()
                .zip(&query_cell)
                .all(|(&c, &qc)| cell_index(c, cells) == qc);
        if same_cell {
            sum += s.y;
            count += 1;
        }
    }
    if count == 0 {
        Ok(0.0)
    } else {
        Ok(sum / count as f64)
    }
}

/// Evaluate any base estimator on one block.
pub fn base_predict(
    kind: &BaseEstimatorKind,
    block: &[Sample],
    x: &Point,
    tie_seed: u64,
) -> Result<f64> {
    kind.validate_for_block(block.len())?;
    match kind {
        BaseEstimatorKind::WeightedNn(v) => weighted_nn_predict(block, x, v, tie_seed),
        BaseEstimatorKind::Knn(k) => {
            let v = knn_weights(*k, block.len())?;
            weighted_nn_predict(block, x, &v, tie_seed)
        }
        BaseEstimatorKind::BaggedOneNn {
            k,
            with_replacement,
        } => {
            let v = if *with_replacement {
                bagged_weights_with_replacement(*k, block.len())?
            } else {
                bagged_weights_without_replacement(*k, block.len())?
            };
            weighted_nn_predict(block, x, &v, tie_seed)
        }
        BaseEstimatorKind::MutualNn(k) => mnn_predict(block, x, *k, tie_seed),
        BaseEstimatorKind::Kernel(h) => kernel_predict(block, x, *h),
        BaseEstimatorKind::Partition(cells) => partition_predict(block, x, *cells),
    }
}
