//! Adversarial sample replacement. The block median tolerates up to m/4
//! corrupted samples; nothing is assumed about what they are replaced with.

use momreg_core::error::{Error, Result};
use momreg_core::{split_blocks, Dataset, Point, Sample};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::scenario::sample_unit_cube;

/// How outlier indices are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierPlacement {
    /// Deterministically hit distinct blocks from block 0 upward, the worst
    /// case for the median: q outliers corrupt exactly min(q, m) blocks.
    BlockConcentrated,
    /// Uniformly random distinct indices.
    UniformRandom,
}

/// Where the replacement feature vector comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierX {
    Fixed(Vec<f64>),
    Random,
}

/// Replacement recipe for the corrupted indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContaminationSpec {
    pub count: usize,
    pub placement: OutlierPlacement,
    /// Replacement response, e.g. a huge fixed magnitude.
    pub y: f64,
    pub x: OutlierX,
}

impl ContaminationSpec {
    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        if self.count > n {
            return Err(Error::invalid(format!(
                "outlier count {} exceeds sample count {n}",
                self.count
            )));
        }
        if !self.y.is_finite() {
            return Err(Error::invalid("outlier response must be finite"));
        }
        if let OutlierX::Fixed(coords) = &self.x {
            if coords.len() != d {
                return Err(Error::invalid("outlier point has wrong dimension"));
            }
        }
        Ok(())
    }
}

/// Contamination budget under which the block median retains its guarantee.
pub fn mom_budget_ok(m: usize, n_outliers: usize) -> bool {
    m >= 4 * n_outliers
}

/// Replace `spec.count` samples and return the new dataset with the replaced
/// index set. `m_blocks` fixes the block layout targeted by
/// block-concentrated placement. All untouched samples are preserved
/// bit-exactly.
pub fn contaminate(
    dataset: &Dataset,
    spec: &ContaminationSpec,
    m_blocks: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Dataset, Vec<usize>)> {
    let n = dataset.len();
    spec.validate(n, dataset.dim())?;
    if spec.count == 0 {
        return Ok((dataset.clone(), Vec::new()));
    }
    let indices: Vec<usize> = match spec.placement {
        OutlierPlacement::BlockConcentrated => {
            let partition = split_blocks(n, m_blocks)?;
            let block_size = partition.block_size();
            if spec.count > m_blocks * block_size {
                return Err(Error::invalid(
                    "outlier count exceeds retained sample count",
                ));
            }
            // j-th outlier lands at offset j/m within block j mod m.
            (0..spec.count)
                .map(|j| (j % m_blocks) * block_size + j / m_blocks)
                .collect()
        }
        OutlierPlacement::UniformRandom => rand::seq::index::sample(rng, n, spec.count).into_vec(),
    };
    let mut corrupted = dataset.clone();
    for &idx in &indices {
        let coords = match &spec.x {
            OutlierX::Fixed(coords) => coords.clone(),
            OutlierX::Random => sample_unit_cube(dataset.dim(), rng),
        };
        corrupted.replace(idx, Sample::new(Point::new(coords)?, spec.y)?)?;
    }
    Ok((corrupted, indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_dataset, NoiseSpec, TargetFn};
    use momreg_core::seeds::stream_rng;
    use std::collections::HashSet;

    fn dataset(n: usize) -> Dataset {
        generate_dataset(
            1,
            n,
            TargetFn::Linear,
            &NoiseSpec::Gaussian { sigma: 0.1 },
            &mut stream_rng(3, 0),
        )
        .unwrap()
    }

    fn spec(count: usize, placement: OutlierPlacement) -> ContaminationSpec {
        ContaminationSpec {
            count,
            placement,
            y: 1e6,
            x: OutlierX::Random,
        }
    }

    #[test]
    fn zero_outliers_is_identity() {
        let ds = dataset(20);
        let (out, idx) = contaminate(
            &ds,
            &spec(0, OutlierPlacement::UniformRandom),
            4,
            &mut stream_rng(1, 0),
        )
        .unwrap();
        assert_eq!(out, ds);
        assert!(idx.is_empty());
    }

    #[test]
    fn non_outlier_samples_are_preserved_bit_exactly() {
        let ds = dataset(50);
        let (out, idx) = contaminate(
            &ds,
            &spec(7, OutlierPlacement::UniformRandom),
            5,
            &mut stream_rng(2, 0),
        )
        .unwrap();
        let replaced: HashSet<usize> = idx.iter().copied().collect();
        assert_eq!(replaced.len(), 7, "indices must be distinct");
        for i in 0..ds.len() {
            if replaced.contains(&i) {
                assert_eq!(out.samples()[i].y, 1e6);
            } else {
                assert_eq!(out.samples()[i], ds.samples()[i]);
            }
        }
    }

    #[test]
    fn block_concentrated_corrupts_min_q_m_blocks() {
        for (n, m, q) in [
            (40usize, 4usize, 2usize),
            (40, 4, 4),
            (40, 4, 7),
            (60, 3, 9),
        ] {
            let ds = dataset(n);
            let (_, idx) = contaminate(
                &ds,
                &spec(q, OutlierPlacement::BlockConcentrated),
                m,
                &mut stream_rng(4, 0),
            )
            .unwrap();
            let partition = split_blocks(n, m).unwrap();
            let touched: HashSet<usize> = idx
                .iter()
                .map(|&i| {
                    (0..m)
                        .find(|&j| partition.block_range(j).contains(&i))
                        .expect("index must land in a block")
                })
                .collect();
            assert_eq!(touched.len(), q.min(m), "n={n} m={m} q={q}");
        }
    }

    #[test]
    fn budget_predicate() {
        assert!(mom_budget_ok(4, 1));
        assert!(mom_budget_ok(8, 2));
        assert!(!mom_budget_ok(3, 1));
        assert!(mom_budget_ok(1, 0));
    }

    #[test]
    fn over_budget_count_is_rejected() {
        let ds = dataset(10);
        assert!(contaminate(
            &ds,
            &spec(11, OutlierPlacement::UniformRandom),
            2,
            &mut stream_rng(0, 0)
        )
        .is_err());
    }
}
