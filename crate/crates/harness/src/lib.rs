//! Monte Carlo certification harness for median-of-means regression:
//! synthetic scenarios under the small-ball/Lipschitz/second-moment model,
//! adversarial contamination, exact binomial tail certification, and the
//! numeric oracle suites behind the estimator's guarantees.

pub mod binomial;
pub mod contaminate;
pub mod lower_bound;
pub mod nn_distance;
pub mod oracles;
pub mod scenario;
pub mod scenario_file;
pub mod tail;

pub use binomial::{clopper_pearson, exact_tail_geq, trials_needed_for, TailEstimate};
pub use contaminate::{contaminate, mom_budget_ok, ContaminationSpec, OutlierPlacement, OutlierX};
pub use lower_bound::{
    g_squared_closed_form, g_squared_quadrature, lower_bound_g, lower_bound_h, rho_unit_cube,
    run_lower_bound, AdversarialInstance, LowerBoundReport,
};
pub use nn_distance::{expected_nn_distance_check, nn_distance_profile, NnDistanceCheck};
pub use oracles::{all_oracles, OracleReport};
pub use scenario::{
    generate_dataset, EstimatorSpec, NoiseSpec, QueryPolicy, ScenarioSpec, TargetFn, TuningValue,
};
pub use scenario_file::{parse_scenario, ScenarioDoc};
pub use tail::{
    estimate_tail, resolve_estimator, resolve_threshold, trial_abs_errors, ResolvedEstimator,
    TailReport, ThresholdSpec, CP_LEVEL,
};
