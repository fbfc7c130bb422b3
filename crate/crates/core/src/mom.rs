//! The block-median wrapper, closed-form tuning rules, validity constants,
//! and theoretical confidence radii.

use std::f64::consts::E;

use crate::base::{base_predict, BaseEstimatorKind};
use crate::blocks::split_blocks;
use crate::data::{Dataset, Point};
use crate::error::{Error, Result};
use crate::median::median_of;
use crate::model::{EstimatorFamily, ModelClass};
use crate::seeds::derive_seed;

/// Block count plus per-block base estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct MoMConfig {
    pub m: usize,
    pub base: BaseEstimatorKind,
}

impl MoMConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("block count must be at least 1"));
        }
        if self.m > n {
            return Err(Error::invalid(format!(
                "block count {} exceeds sample count {n}",
                self.m
            )));
        }
        self.base.validate_for_block(n / self.m)
    }
}

/// One base prediction per block; block j uses a tie seed derived from
/// (seed, j), so the result is independent of evaluation order.
pub fn block_predictions(
    dataset: &Dataset,
    x: &Point,
    config: &MoMConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    config.validate(dataset.len())?;
    let partition = split_blocks(dataset.len(), config.m)?;
    (0..config.m)
        .map(|j| {
            base_predict(
                &config.base,
                partition.block_slice(dataset, j),
                x,
                derive_seed(seed, j as u64),
            )
        })
        .collect()
}

/// The block-median prediction: median of the per-block base predictions.
pub fn mom_predict(dataset: &Dataset, x: &Point, config: &MoMConfig, seed: u64) -> Result<f64> {
    median_of(&block_predictions(dataset, x, config, seed)?)
}

/// Block count for a confidence threshold: m = ⌈ln(1/δ)⌉.
///
/// Values within 1e-9 of an integer are snapped before the ceiling so that
/// thresholds like e^{-5} yield exactly 5.
pub fn select_m(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta = {delta} must lie in (0, 1)"
        )));
    }
    let x = -delta.ln();
    let snapped = x.round();
    let m = if (x - snapped).abs() < 1e-9 {
        snapped
    } else {
        x.ceil()
    };
    Ok((m as usize).max(1))
}

/// The constant c bounding the admissible block fraction m/n for a family.
pub fn validity_constant(family: EstimatorFamily, model: &ModelClass) -> Result<f64> {
    let d = model.d as f64;
    let rho = model.rho;
    let sigma = model.sigma;
    let c = match family {
        // k-NN and bagged 1-NN share the same admissibility region.
        EstimatorFamily::Knn | EstimatorFamily::BaggedOneNn => {
            let first = rho * (sigma / (4.0 * E * 2.0f64.sqrt())).powf(d);
            let second = 32.0 * E * E / (sigma * sigma * rho.powf(2.0 / d));
            first.min(second).min(1.0)
        }
        EstimatorFamily::MutualNn => {
            let alpha = model.alpha_required()?;
            let first = rho * (sigma * alpha / (4.0 * E)).powf(d);
            let second = 16.0 * E * E / (alpha * sigma * sigma * rho.powf(2.0 / d));
            first.min(second).min(1.0)
        }
        EstimatorFamily::Kernel => {
            let first = rho * model.diameter.powf(d + 2.0) / (8.0 * E * E * sigma * sigma);
            first.min(1.0)
        }
        EstimatorFamily::Partition => {
            let first = rho * d / (2.0f64.powf(d + 3.0) * E * E * sigma * sigma);
            first.min(1.0)
        }
    };
    Ok(c)
}

/// Admissible confidence thresholds [e^{−cn+1}, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaInterval {
    /// Inclusive lower endpoint e^{−cn+1}.
    pub lo: f64,
    /// Exclusive upper endpoint, always 1.
    pub hi: f64,
    /// Set when the interval contains no admissible threshold (c·n ≤ 1).
    pub empty: bool,
}

impl DeltaInterval {
    pub fn contains(&self, delta: f64) -> bool {
        !self.empty && delta >= self.lo && delta < self.hi
    }
}

/// Thresholds for which m = ⌈ln(1/δ)⌉ stays within [1, c·n].
pub fn admissible_delta(
    family: EstimatorFamily,
    model: &ModelClass,
    n: usize,
) -> Result<DeltaInterval> {
    if n < 1 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let c = validity_constant(family, model)?;
    let lo = (-(c * n as f64) + 1.0).exp();
    Ok(DeltaInterval {
        lo,
        hi: 1.0,
        empty: lo >= 1.0,
    })
}

fn floor_checked(value: f64, max: usize, what: &str) -> Result<usize> {
    let floored = value.floor();
    if floored.is_nan() || floored < 1.0 {
        return Err(Error::config(format!("{what} >= 1"), value, 1.0));
    }
    let k = floored as usize;
    if k > max {
        return Err(Error::config(
            format!("{what} <= {max}"),
            floored,
            max as f64,
        ));
    }
    Ok(k)
}

/// Bias-variance balancing neighbor count for k-NN base estimators:
/// k* = ⌊(σ²/(32e²))^{d/(d+2)} (ρn/m)^{2/(d+2)}⌋, valid in [1, ⌊n/m⌋].
pub fn select_k_star_knn(model: &ModelClass, n: usize, m: usize) -> Result<usize> {
    check_nm(n, m)?;
    let d = model.d as f64;
    let raw = (model.sigma * model.sigma / (32.0 * E * E)).powf(d / (d + 2.0))
        * (model.rho * n as f64 / m as f64).powf(2.0 / (d + 2.0));
    floor_checked(raw, n / m, "k*")
}

/// Subsample size for bagged 1-NN base estimators:
/// k* = ⌊(32e²n/(ρ^{2/d}σ²m))^{d/(d+2)}⌋.
pub fn select_k_star_bagged(model: &ModelClass, n: usize, m: usize) -> Result<usize> {
    check_nm(n, m)?;
    let d = model.d as f64;
    let raw = (32.0 * E * E * n as f64
        / (model.rho.powf(2.0 / d) * model.sigma * model.sigma * m as f64))
        .powf(d / (d + 2.0));
    floor_checked(raw, n / m, "k*")
}

/// Neighbor count for mutual-NN base estimators:
/// k* = ⌊(ασ²/(16e²))^{d/(d+2)} (ρn/m)^{2/(d+2)}⌋.
pub fn select_k_star_mnn(model: &ModelClass, n: usize, m: usize) -> Result<usize> {
    check_nm(n, m)?;
    let alpha = model.alpha_required()?;
    let d = model.d as f64;
    let raw = (alpha * model.sigma * model.sigma / (16.0 * E * E)).powf(d / (d + 2.0))
        * (model.rho * n as f64 / m as f64).powf(2.0 / (d + 2.0));
    floor_checked(raw, n / m, "k*")
}

/// Bandwidth for kernel base estimators: h* = (8e²σ²m/(ρn))^{1/(d+2)}.
pub fn select_h_star(model: &ModelClass, n: usize, m: usize) -> Result<f64> {
    check_nm(n, m)?;
    let d = model.d as f64;
    let h = (8.0 * E * E * model.sigma * model.sigma * m as f64 / (model.rho * n as f64))
        .powf(1.0 / (d + 2.0));
    if h.is_nan() || h <= 0.0 {
        return Err(Error::config("h* > 0", h, 0.0));
    }
    if h > model.diameter {
        return Err(Error::config("h* <= diameter", h, model.diameter));
    }
    Ok(h)
}

/// Cells per axis for partitioning base estimators:
/// K* = ⌊(ρdn/(2^{d+3}e²σ²m))^{1/(d+2)}⌋ ≥ 1.
pub fn select_partition_cells(model: &ModelClass, n: usize, m: usize) -> Result<usize> {
    check_nm(n, m)?;
    let d = model.d as f64;
    let raw = (model.rho * d * n as f64
        / (2.0f64.powf(d + 3.0) * E * E * model.sigma * model.sigma * m as f64))
        .powf(1.0 / (d + 2.0));
    floor_checked(raw, usize::MAX, "K*")
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::invalid(format!(
            "block count {m} out of range [1, {n}]"
        )));
    }
    Ok(())
}

/// The family's optimally tuned base estimator for a dataset of size n split
/// into m blocks.
pub fn select_tuning(
    family: EstimatorFamily,
    model: &ModelClass,
    n: usize,
    m: usize,
) -> Result<BaseEstimatorKind> {
    Ok(match family {
        EstimatorFamily::Knn => BaseEstimatorKind::Knn(select_k_star_knn(model, n, m)?),
        EstimatorFamily::BaggedOneNn => BaseEstimatorKind::BaggedOneNn {
            k: select_k_star_bagged(model, n, m)?,
            with_replacement: true,
        },
        EstimatorFamily::MutualNn => BaseEstimatorKind::MutualNn(select_k_star_mnn(model, n, m)?),
        EstimatorFamily::Kernel => BaseEstimatorKind::Kernel(select_h_star(model, n, m)?),
        EstimatorFamily::Partition => {
            BaseEstimatorKind::Partition(select_partition_cells(model, n, m)?)
        }
    })
}

/// Multiplier applied to the whole radius under contamination. The variance
/// and bias components inflate by 2³e/√27 and 4³e²/27 respectively; applying
/// the larger factor to both is a conservative recombination.
pub fn robust_radius_factor() -> f64 {
    64.0 * E * E / 27.0
}

/// The family constant a in the radius a·(σ²m/(ρn))^{1/(d+2)}.
pub fn radius_constant(family: EstimatorFamily, model: &ModelClass) -> Result<f64> {
    Ok(match family {
        EstimatorFamily::Knn => 32.0 * E * E * 2.0f64.sqrt(),
        EstimatorFamily::BaggedOneNn => 128.0 * E * E * E,
        EstimatorFamily::MutualNn => {
            let alpha = model.alpha_required()?;
            64.0 * E * E * alpha.powf(1.0 / 3.0)
        }
        EstimatorFamily::Kernel => 4.0 * E.powf(2.0 / 3.0),
        EstimatorFamily::Partition => 16.0 * E * (model.d as f64).sqrt(),
    })
}

/// A theoretical confidence radius: exceeding it has probability at most
/// delta when m = ⌈ln(1/δ)⌉ blocks are used with the family's tuned base
/// estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceRadius {
    pub family: EstimatorFamily,
    pub radius: f64,
    pub constant_a: f64,
    pub delta: f64,
    pub m: usize,
    pub robust: bool,
}

/// radius = a·(σ²⌈ln(1/δ)⌉/(ρn))^{1/(d+2)}, inflated by the contamination
/// factor when `robust` is set. Errors when delta is outside the admissible
/// interval for the family.
pub fn bound_radius(
    family: EstimatorFamily,
    model: &ModelClass,
    n: usize,
    delta: f64,
    robust: bool,
) -> Result<ConfidenceRadius> {
    let interval = admissible_delta(family, model, n)?;
    if !interval.contains(delta) {
        return Err(Error::config(
            format!("delta in [{:e}, 1)", interval.lo),
            delta,
            interval.lo,
        ));
    }
    let m = select_m(delta)?;
    let mut constant_a = radius_constant(family, model)?;
    if robust {
        constant_a *= robust_radius_factor();
    }
    let d = model.d as f64;
    let radius = constant_a
        * (model.sigma * model.sigma * m as f64 / (model.rho * n as f64)).powf(1.0 / (d + 2.0));
    Ok(ConfidenceRadius {
        family,
        radius,
        constant_a,
        delta,
        m,
        robust,
    })
}

/// Default ceiling on the number of enumerated cells.
pub const DEFAULT_CELL_CAP: usize = 1_000_000;

/// Exact sup-norm error of the block-median partitioning estimator.
///
/// The estimator is constant on each grid cell, so the prediction is
/// evaluated once per cell (block responses bucketed per cell, 0 for empty
/// buckets, median across blocks) and |prediction − truth| is maximized over
/// a per-cell grid of `grid_per_axis`^d query points.
pub fn sup_error_partition<F>(
    dataset: &Dataset,
    m: usize,
    cells: usize,
    seed: u64,
    truth: F,
    grid_per_axis: usize,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    sup_error_partition_capped(
        dataset,
        m,
        cells,
        seed,
        truth,
        grid_per_axis,
        DEFAULT_CELL_CAP,
    )
}

/// [`sup_error_partition`] with an explicit cell-enumeration ceiling.
#[allow(clippy::too_many_arguments)]
pub fn sup_error_partition_capped<F>(
    dataset: &Dataset,
    m: usize,
    cells: usize,
    _seed: u64,
    truth: F,
    grid_per_axis: usize,
    cell_cap: usize,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if cells < 1 {
        return Err(Error::invalid("partition needs at least one cell per axis"));
    }
    if grid_per_axis < 1 {
        return Err(Error::invalid("grid must have at least one point per axis"));
    }
    let d = dataset.dim();
    let total_cells = (cells as u128).pow(d as u32);
    if total_cells > cell_cap as u128 {
        return Err(Error::Resource(format!(
            "cell enumeration {total_cells} exceeds cap {cell_cap}"
        )));
    }
    let total_cells = total_cells as usize;
    let partition = split_blocks(dataset.len(), m)?;

    // Per-block per-cell response sums and counts.
    let mut cell_values = vec![0.0f64; m * total_cells];
    for j in 0..m {
        let offset = j * total_cells;
        let mut sums = vec![0.0f64; total_cells];
        let mut counts = vec![0usize; total_cells];
        for s in partition.block_slice(dataset, j) {
            if s.x.coords().iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::invalid("partition data must lie in [0,1]^d"));
            }
            let cell = flat_cell_index(s.x.coords(), cells);
            sums[cell] += s.y;
            counts[cell] += 1;
        }
        for cell in 0..total_cells {
            cell_values[offset + cell] = if counts[cell] == 0 {
                0.0
            } else {
                sums[cell] / counts[cell] as f64
            };
        }
    }

    let mut block_preds = vec![0.0f64; m];
    let mut sup = 0.0f64;
    let mut cell_idx = vec![0usize; d];
    for cell in 0..total_cells {
        for (j, pred) in block_preds.iter_mut().enumerate() {
            *pred = cell_values[j * total_cells + cell];
        }
        let prediction = median_of(&block_preds)?;
        // Evaluate the truth on the grid inside this cell.
        let mut grid_idx = vec![0usize; d];
        let mut coords = vec![0.0f64; d];
        loop {
            for axis in 0..d {
                let frac = (grid_idx[axis] as f64 + 0.5) / grid_per_axis as f64;
                coords[axis] = (cell_idx[axis] as f64 + frac) / cells as f64;
            }
            sup = sup.max((prediction - truth(&coords)).abs());
            if !increment(&mut grid_idx, grid_per_axis) {
                break;
            }
        }
        increment(&mut cell_idx, cells);
    }
    Ok(sup)
}

/// Row-major flat cell index matching `partition_predict`'s per-axis rule.
fn flat_cell_index(coords: &[f64], cells: usize) -> usize {
    coords.iter().fold(0usize, |acc, &c| {
        acc * cells + ((c * cells as f64) as usize).min(cells - 1)
    })
}

/// Advance a mixed-radix counter; false once it wraps around.
fn increment(idx: &mut [usize], radix: usize) -> bool {
    for digit in idx.iter_mut().rev() {
        *digit += 1;
        if *digit < radix {
            return true;
        }
        *digit = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Sample;
    use proptest::prelude::*;
    use rand::Rng;

    fn dataset_1d(points: &[(f64, f64)]) -> Dataset {
        Dataset::new(
            points
                .iter()
                .map(|&(x, y)| Sample::new(Point::new(vec![x]).unwrap(), y).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn model(rho: f64, sigma: f64, d: usize, diameter: f64) -> ModelClass {
        ModelClass::new(rho, sigma, d, diameter, None).unwrap()
    }

    fn model_alpha(rho: f64, sigma: f64, d: usize, diameter: f64, alpha: f64) -> ModelClass {
        ModelClass::new(rho, sigma, d, diameter, Some(alpha)).unwrap()
    }

    #[test]
    fn mom_examples() {
        // m = 1 reduces to the base estimate on the whole dataset.
        let ds = dataset_1d(&[(0.1, 1.0), (0.2, 2.0), (0.3, 3.0), (0.4, 4.0)]);
        let x = Point::new(vec![0.0]).unwrap();
        let config = MoMConfig {
            m: 1,
            base: BaseEstimatorKind::Knn(2),
        };
        let mom = mom_predict(&ds, &x, &config, 0).unwrap();
        assert!((mom - 1.5).abs() < 1e-12);

        // Degenerate geometry: all points at the query, m = n, 1-NN picks
        // each response; the median of block predictions is the median of
        // the responses.
        let ds = dataset_1d(&[(0.5, 9.0), (0.5, 1.0), (0.5, 5.0)]);
        let x = Point::new(vec![0.5]).unwrap();
        let config = MoMConfig {
            m: 3,
            base: BaseEstimatorKind::Knn(1),
        };
        assert_eq!(mom_predict(&ds, &x, &config, 0).unwrap(), 5.0);

        // Hand-computed block means.
        let ds = dataset_1d(&[
            (0.1, 1.0),
            (0.2, 2.0),
            (0.3, 4.0),
            (0.4, 5.0),
            (0.5, 100.0),
            (0.6, 101.0),
        ]);
        let config = MoMConfig {
            m: 3,
            base: BaseEstimatorKind::Partition(1),
        };
        let x = Point::new(vec![0.5]).unwrap();
        assert_eq!(mom_predict(&ds, &x, &config, 0).unwrap(), 4.5);
    }

    #[test]
    fn mom_output_is_a_block_prediction() {
        let ds = dataset_1d(&[(0.1, 3.0), (0.9, -2.0), (0.4, 7.0), (0.6, 0.5)]);
        let x = Point::new(vec![0.3]).unwrap();
        let config = MoMConfig {
            m: 2,
            base: BaseEstimatorKind::Knn(1),
        };
        let preds = block_predictions(&ds, &x, &config, 5).unwrap();
        let mom = mom_predict(&ds, &x, &config, 5).unwrap();
        assert!(preds.contains(&mom));
    }

    #[test]
    fn select_m_examples() {
        assert_eq!(select_m((-5.0f64).exp()).unwrap(), 5);
        assert_eq!(select_m(0.05).unwrap(), 3);
        assert_eq!(select_m(0.9).unwrap(), 1);
        assert!(select_m(0.0).is_err());
        assert!(select_m(1.0).is_err());
    }

    #[test]
    fn validity_constant_examples() {
        // k-NN, σ = 1, ρ = 0.25, d = 2: the first min-term binds.
        let c = validity_constant(EstimatorFamily::Knn, &model(0.25, 1.0, 2, 2.0)).unwrap();
        let expected = 0.25 / (32.0 * E * E);
        assert!((c - expected).abs() < 1e-15);
        assert!((c - 1.057e-3).abs() < 1e-6);

        // Bagged shares the k-NN constant.
        let cb =
            validity_constant(EstimatorFamily::BaggedOneNn, &model(0.25, 1.0, 2, 2.0)).unwrap();
        assert_eq!(c, cb);

        // Kernel boundary: ρD^{d+2} = 8e²σ² makes c = 1 exactly.
        let rho = 0.5f64;
        let diameter = 2.0f64;
        let sigma = (rho * diameter.powi(3) / (8.0 * E * E)).sqrt();
        let c =
            validity_constant(EstimatorFamily::Kernel, &model(rho, sigma, 1, diameter)).unwrap();
        assert!((c - 1.0).abs() < 1e-12);

        // Partition formula when the first term binds.
        let m = model(1.0, 1.0, 1, 1.0);
        let c = validity_constant(EstimatorFamily::Partition, &m).unwrap();
        let expected = (1.0 * 1.0 / (16.0 * E * E)).min(1.0);
        assert!((c - expected).abs() < 1e-15);

        // Mutual-NN requires alpha.
        assert!(validity_constant(EstimatorFamily::MutualNn, &m).is_err());
    }

    #[test]
    fn admissible_delta_examples() {
        // Kernel model with c = 1 exactly: ρD^{d+2} = 8e²σ².
        let rho = 0.5f64;
        let diameter = 2.0f64;
        let sigma = (rho * diameter.powi(3) / (8.0 * E * E)).sqrt();
        let m = model(rho, sigma, 1, diameter);

        // c·n = 1 gives the empty interval [1, 1).
        let interval = admissible_delta(EstimatorFamily::Kernel, &m, 1).unwrap();
        assert!(interval.empty);

        // c·n = 10 gives [e^{-9}, 1).
        let interval = admissible_delta(EstimatorFamily::Kernel, &m, 10).unwrap();
        assert!(!interval.empty);
        assert!((interval.lo - (-9.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn selector_examples() {
        // k-NN closed form.
        let m = model(0.25, 1.0, 2, 2.0);
        assert_eq!(select_k_star_knn(&m, 100_000, 3).unwrap(), 5);

        // Bagged closed form.
        let m = model(1.0, 1.0, 2, 1.0);
        assert_eq!(select_k_star_bagged(&m, 10_000, 2).unwrap(), 1087);

        // Mutual-NN with alpha = 1 mirrors k-NN with 16e² in place of 32e².
        let m = model_alpha(0.25, 1.0, 2, 2.0, 1.0);
        assert_eq!(select_k_star_mnn(&m, 100_000, 3).unwrap(), 8);

        // Kernel bandwidth.
        let m = model(0.5, 1.0, 1, 2.0);
        let h = select_h_star(&m, 1000, 2).unwrap();
        assert!((h - 0.2364497951657808f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((h - 0.618).abs() < 1e-3);

        // Partition cell count at a constraint-satisfying grid point.
        let m = model(1.0, 0.05, 1, 1.0);
        let cells = select_partition_cells(&m, 10_000, 2).unwrap();
        let raw = (1.0 * 1.0 * 10_000.0 / (16.0 * E * E * 0.05 * 0.05 * 2.0)).powf(1.0 / 3.0);
        assert_eq!(cells, raw.floor() as usize);
        assert!(cells >= 1);
    }

    #[test]
    fn selector_range_errors() {
        // Pre-floor value below 1 is a configuration error.
        let m = model(1e-6, 100.0, 1, 200.0);
        assert!(matches!(
            select_k_star_knn(&m, 10, 1),
            Err(Error::Config { .. })
        ));
        // m = n forces N = 1; k* beyond that is rejected.
        let m = model(1.0, 0.1, 1, 1.0);
        assert!(matches!(
            select_k_star_bagged(&m, 100, 100),
            Err(Error::Config { .. })
        ));
        // alpha → 0 drives the mutual-NN k* to 0.
        let m = model_alpha(0.25, 1.0, 2, 2.0, 1e-12);
        assert!(matches!(
            select_k_star_mnn(&m, 100_000, 3),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn knn_k_star_growth_rate() {
        // Doubling n multiplies the pre-floor k* by 2^{2/(d+2)}.
        let m = model(0.25, 1.0, 2, 2.0);
        let d = 2.0f64;
        let pre = |n: f64| {
            (1.0 / (32.0 * E * E)).powf(d / (d + 2.0)) * (0.25 * n / 3.0).powf(2.0 / (d + 2.0))
        };
        let ratio = pre(2e5) / pre(1e5);
        assert!((ratio - 2.0f64.powf(2.0 / (d + 2.0))).abs() < 1e-12);
        // And the selector floors those values.
        assert_eq!(
            select_k_star_knn(&m, 200_000, 3).unwrap(),
            pre(2e5).floor() as usize
        );
    }

    #[test]
    fn h_star_scaling_and_bounds() {
        let m = model(0.5, 1.0, 1, 2.0);
        // m ∝ n keeps h* constant.
        let h1 = select_h_star(&m, 1000, 2).unwrap();
        let h2 = select_h_star(&m, 2000, 4).unwrap();
        assert!((h1 - h2).abs() < 1e-12);
        // h* > D is rejected.
        let tiny = model(1e-6, 10.0, 1, 0.05);
        assert!(matches!(
            select_h_star(&tiny, 10, 1),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn partition_cells_monotone_in_noise() {
        let lo = model(1.0, 0.02, 1, 1.0);
        let hi = model(1.0, 0.05, 1, 1.0);
        assert!(
            select_partition_cells(&lo, 10_000, 2).unwrap()
                >= select_partition_cells(&hi, 10_000, 2).unwrap()
        );
    }

    #[test]
    fn radius_examples() {
        let m = model(0.25, 1.0, 2, 2.0);
        let delta = (-3.0f64).exp();
        let r = bound_radius(EstimatorFamily::Knn, &m, 100_000, delta, false).unwrap();
        assert_eq!(r.m, 3);
        let expected = 32.0 * E * E * 2.0f64.sqrt() * (3.0 / 25_000.0f64).powf(0.25);
        assert!((r.radius - expected).abs() < 1e-12);
        assert!((r.radius - 35.0).abs() < 0.05);

        // Scaling: radius(16n)/radius(n) = 16^{-1/(d+2)}.
        let r16 = bound_radius(EstimatorFamily::Knn, &m, 1_600_000, delta, false).unwrap();
        assert!((r16.radius / r.radius - 16.0f64.powf(-0.25)).abs() < 1e-12);

        // Kernel constant.
        let a = radius_constant(EstimatorFamily::Kernel, &m).unwrap();
        assert!((a - 4.0 * E.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((a - 7.7909).abs() < 1e-3);

        // Robust inflation multiplies the constant by 4³e²/27.
        let rr = bound_radius(EstimatorFamily::Knn, &m, 100_000, delta, true).unwrap();
        assert!((rr.radius / r.radius - robust_radius_factor()).abs() < 1e-9);

        // Inadmissible delta is a configuration error.
        let err = bound_radius(EstimatorFamily::Knn, &m, 100, 1e-30, false);
        assert!(matches!(err, Err(Error::Config { .. })));
    }

    #[test]
    fn block_identity_matches_exponential_bound() {
        // With p = 1/(4e²), 2^m p^{m/2} = e^{-m} exactly.
        let p = 1.0 / (4.0 * E * E);
        for m in 1..=50 {
            let lhs = 2.0f64.powi(m) * p.powf(m as f64 / 2.0);
            let rhs = (-(m as f64)).exp();
            assert!(((lhs - rhs) / rhs).abs() < 1e-12, "m = {m}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn sup_error_partition_trivial_cases() {
        // All-zero responses and zero truth give zero sup error.
        let ds = dataset_1d(&[(0.1, 0.0), (0.6, 0.0), (0.3, 0.0), (0.8, 0.0)]);
        let sup = sup_error_partition(&ds, 2, 2, 0, |_| 0.0, 8).unwrap();
        assert_eq!(sup, 0.0);

        // Single cell, constant truth: |median of block means − c|.
        let ds = dataset_1d(&[(0.1, 1.0), (0.2, 3.0), (0.6, 5.0), (0.8, 7.0)]);
        let sup = sup_error_partition(&ds, 2, 1, 0, |_| 10.0, 4).unwrap();
        // Block means 2 and 6; median 2; sup = 8.
        assert!((sup - 8.0).abs() < 1e-12);
    }

    #[test]
    fn sup_error_partition_matches_grid_brute_force() {
        let mut rng = crate::seeds::stream_rng(12, 0);
        let n = 64;
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>(), rng.random_range(-1.0..1.0)))
            .collect();
        let ds = dataset_1d(&points);
        let truth = |c: &[f64]| (2.0 * c[0] - 1.0) * 0.5;
        let cells = 4usize;
        let m = 2usize;
        let sup = sup_error_partition(&ds, m, cells, 0, truth, 64).unwrap();

        // Brute force over a dense global grid through the public path.
        let config = MoMConfig {
            m,
            base: BaseEstimatorKind::Partition(cells),
        };
        let mut brute = 0.0f64;
        let grid_n = 10_000;
        for g in 0..grid_n {
            let xv = (g as f64 + 0.5) / grid_n as f64;
            let x = Point::new(vec![xv]).unwrap();
            let pred = mom_predict(&ds, &x, &config, 0).unwrap();
            brute = brute.max((pred - truth(&[xv])).abs());
        }
        assert!(
            (sup - brute).abs() < 2.0 / 64.0,
            "sup {sup} vs brute {brute}"
        );
    }

    #[test]
    fn sup_error_partition_cell_cap() {
        let ds = dataset_1d(&[(0.1, 0.0), (0.6, 0.0)]);
        let ds3 = Dataset::new(
            ds.samples()
                .iter()
                .map(|s| {
                    Sample::new(Point::new(vec![s.x.coords()[0], 0.5, 0.5]).unwrap(), s.y).unwrap()
                })
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            sup_error_partition(&ds3, 1, 101, 0, |_| 0.0, 1),
            Err(Error::Resource(_))
        ));
    }

    proptest! {
        #[test]
        fn admissible_deltas_keep_m_within_budget(
            c_scale in 0.01f64..1.0,
            n in 2usize..10_000,
            t in 0.0f64..1.0,
        ) {
            // Sample δ across [e^{−cn+1}, 1) and check m = ⌈ln(1/δ)⌉ ≤ cn.
            // Solve the kernel validity constant for σ so that c = c_scale.
            let diameter = 2.0f64;
            let rho = 0.5f64;
            let sigma = (rho * diameter.powi(3) / (8.0 * E * E * c_scale)).sqrt();
            let m = ModelClass::new(rho, sigma, 1, diameter, None).unwrap();
            let interval = admissible_delta(EstimatorFamily::Kernel, &m, n).unwrap();
            prop_assume!(!interval.empty);
            let c = validity_constant(EstimatorFamily::Kernel, &m).unwrap();
            // Log-uniform point inside the interval; e^{−cn+1} may underflow
            // to 0, in which case any representable positive delta is inside.
            let delta = interval
                .lo
                .powf(1.0 - t)
                .clamp(f64::MIN_POSITIVE, 1.0 - 1e-12);
            let blocks = select_m(delta).unwrap();
            prop_assert!(blocks as f64 <= c * n as f64 * (1.0 + 1e-9) + 1e-9);
        }

        #[test]
        fn mom_shift_invariance(
            pts in prop::collection::vec((-1.0f64..1.0, -5.0f64..5.0), 4..24),
            shift in -10.0f64..10.0,
            m in 1usize..5,
            seed in 0u64..20,
        ) {
            // Adding a constant to all responses shifts the prediction by
            // exactly that constant. k-NN averaging sets are never empty, so
            // the 0/0 convention cannot interfere.
            prop_assume!(m <= pts.len());
            let ds = dataset_1d(&pts);
            let shifted = dataset_1d(
                &pts.iter().map(|&(x, y)| (x, y + shift)).collect::<Vec<_>>(),
            );
            let n_block = pts.len() / m;
            let k = 1 + n_block / 2;
            let config = MoMConfig { m, base: BaseEstimatorKind::Knn(k.min(n_block)) };
            let x = Point::new(vec![0.25]).unwrap();
            let a = mom_predict(&ds, &x, &config, seed).unwrap();
            let b = mom_predict(&shifted, &x, &config, seed).unwrap();
            prop_assert!((b - (a + shift)).abs() < 1e-9);
        }

        #[test]
        fn mom_single_block_equals_base(
            pts in prop::collection::vec((-1.0f64..1.0, -5.0f64..5.0), 1..16),
            seed in 0u64..20,
        ) {
            let ds = dataset_1d(&pts);
            let k = 1 + pts.len() / 3;
            let base = BaseEstimatorKind::Knn(k.min(pts.len()));
            let config = MoMConfig { m: 1, base: base.clone() };
            let x = Point::new(vec![0.5]).unwrap();
            let mom = mom_predict(&ds, &x, &config, seed).unwrap();
            let direct = base_predict(&base, ds.samples(), &x, derive_seed(seed, 0)).unwrap();
            prop_assert_eq!(mom, direct);
        }
    }
}
