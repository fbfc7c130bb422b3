//! Median-of-means local-averaging regression.
//!
//! Split the sample into m equal blocks, run a local-averaging base
//! estimator (nearest neighbors, bagged 1-NN, mutual NN, kernel, or
//! partitioning) on each block, and report the median of the block
//! predictions. With the block count tied to a confidence threshold and the
//! closed-form tuning rules in [`mom`], the prediction error concentrates
//! exponentially under a bare second-moment noise assumption, and the median
//! tolerates up to m/4 adversarial samples.

pub mod adaptive;
pub mod base;
pub mod blocks;
pub mod data;
pub mod error;
pub mod median;
pub mod model;
pub mod mom;
pub mod ordering;
pub mod seeds;
pub mod weights;

pub use adaptive::{adaptive_predict, interval_for, m_delta, AdaptiveEstimate, ConfidenceInterval};
pub use base::{
    base_predict, kernel_predict, mnn_predict, partition_predict, weighted_nn_predict,
    BaseEstimatorKind,
};
pub use blocks::{split_blocks, BlockPartition};
pub use data::{euclidean_distance, fmt_float17, Dataset, Point, Sample};
pub use error::{Error, Result};
pub use median::median_of;
pub use model::{EstimatorFamily, ModelClass};
pub use mom::{
    admissible_delta, bound_radius, mom_predict, select_h_star, select_k_star_bagged,
    select_k_star_knn, select_k_star_mnn, select_m, select_partition_cells, select_tuning,
    sup_error_partition, sup_error_partition_capped, validity_constant, ConfidenceRadius,
    DeltaInterval, MoMConfig, DEFAULT_CELL_CAP,
};
pub use ordering::{order_by_distance, DistanceOrder};
pub use weights::{
    bagged_weights_with_replacement, bagged_weights_without_replacement, knn_weights, WeightVector,
};
