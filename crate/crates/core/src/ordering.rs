//! Reordering a block by distance to a query, with seeded tie-breaking.
//!
//! Exact distance ties are broken by i.i.d. auxiliary uniforms drawn once per
//! (block, query, seed) from a counter-based stream, so a fixed seed
//! reproduces the same order on every platform and run.

use std::cmp::Ordering;

use rand::Rng;

use crate::data::{squared_distance, Point, Sample};
use crate::error::{Error, Result};
use crate::seeds::stream_rng;

/// Stream id reserved for tie-break uniforms.
const TIE_BREAK_STREAM: u64 = 0xD15;

/// A permutation of block indices with nondecreasing distance to the query.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceOrder {
    order: Vec<usize>,
    tie_seed: u64,
}

impl DistanceOrder {
    /// Block indices from nearest to farthest.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn tie_seed(&self) -> u64 {
        self.tie_seed
    }
}

/// Auxiliary uniforms for tie-breaking, in storage order.
pub(crate) fn tie_uniforms(tie_seed: u64, count: usize) -> Vec<f64> {
    let mut rng = stream_rng(tie_seed, TIE_BREAK_STREAM);
    (0..count).map(|_| rng.random::<f64>()).collect()
}

/// Sort key: squared distance, then auxiliary uniform, then storage index.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RankedPoint {
    pub dist_sq: f64,
    pub tie: f64,
    pub index: usize,
}

pub(crate) fn rank_cmp(a: &RankedPoint, b: &RankedPoint) -> Ordering {
    a.dist_sq
        .total_cmp(&b.dist_sq)
        .then(a.tie.total_cmp(&b.tie))
        .then(a.index.cmp(&b.index))
}

/// Distances (squared) and tie uniforms for every block point, storage order.
pub(crate) fn ranked_points(
    block: &[Sample],
    x: &Point,
    tie_seed: u64,
) -> Result<Vec<RankedPoint>> {
    if block.is_empty() {
        return Err(Error::invalid("block must be nonempty"));
    }
    if block[0].x.dim() != x.dim() {
        return Err(Error::invalid(format!(
            "query dimension {} does not match block dimension {}",
            x.dim(),
            block[0].x.dim()
        )));
    }
    let ties = tie_uniforms(tie_seed, block.len());
    Ok(block
        .iter()
        .enumerate()
        .map(|(i, s)| RankedPoint {
            dist_sq: squared_distance(s.x.coords(), x.coords()),
            tie: ties[i],
            index: i,
        })
        .collect())
}

/// Order a block's indices by Euclidean distance to `x`.
pub fn order_by_distance(block: &[Sample], x: &Point, tie_seed: u64) -> Result<DistanceOrder> {
    let mut ranked = ranked_points(block, x, tie_seed)?;
    ranked.sort_by(rank_cmp);
    Ok(DistanceOrder {
        order: ranked.into_iter().map(|r| r.index).collect(),
        tie_seed,
    })
}

/// The `take` nearest points (full rank order within them), avoiding a full
/// sort when `take` is small. Gives exactly the first `take` entries of
/// [`order_by_distance`].
pub(crate) fn nearest_ranked(
    block: &[Sample],
    x: &Point,
    tie_seed: u64,
    take: usize,
) -> Result<Vec<RankedPoint>> {
    let mut ranked = ranked_points(block, x, tie_seed)?;
    let n = ranked.len();
    let take = take.min(n);
    if take == 0 {
        return Ok(Vec::new());
    }
    if take < n {
        ranked.select_nth_unstable_by(take - 1, rank_cmp);
        ranked.truncate(take);
    }
    ranked.sort_by(rank_cmp);
    Ok(ranked)
}
