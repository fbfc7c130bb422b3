//! Deterministic numeric oracles: exact-summation checks of the inequalities
//! the estimator's guarantees are assembled from.

use std::f64::consts::E;

use momreg_core::bagged_weights_with_replacement;
use serde::Serialize;

use crate::binomial::{exact_tail_geq, fraction_threshold};
use crate::lower_bound::{g_squared_closed_form, g_squared_quadrature};

/// Outcome of one oracle suite. `max_slack` is the largest observed
/// lhs − rhs over the grid, so any positive value is a violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub pass: bool,
    pub max_slack: f64,
    pub detail: String,
}

fn report(name: &str, max_slack: f64, detail: String) -> OracleReport {
    OracleReport {
        name: name.to_string(),
        pass: max_slack <= 0.0,
        max_slack,
        detail,
    }
}

/// Majority tail bound: exact P(Bin(m,p) ≥ m/2) ≤ (2√(p(1−p)))^m ≤ 2^m p^{m/2}
/// for m ∈ [1, 20] and p on the 0.005-step grid up to 0.25.
pub fn binomial_median_oracle() -> OracleReport {
    let mut max_slack = f64::NEG_INFINITY;
    let mut grid_points = 0usize;
    for m in 1..=20u64 {
        for j in 1..=50u64 {
            let p = 0.005 * j as f64;
            let exact = exact_tail_geq(m, fraction_threshold(m, 1, 2), p);
            let chernoff = (2.0 * (p * (1.0 - p)).sqrt()).powi(m as i32);
            let relaxed = 2.0f64.powi(m as i32) * p.powf(m as f64 / 2.0);
            max_slack = max_slack.max(exact - chernoff).max(chernoff - relaxed);
            grid_points += 1;
        }
    }
    report(
        "binomial-median-tail",
        max_slack,
        format!("{grid_points} grid points, worst lhs-rhs {max_slack:.3e}"),
    )
}

/// Quarter-fraction tail bound used under contamination:
/// exact P(Bin(m,p) ≥ m/4) ≤ (4/3^{3/4})^m p^{m/4}, and that bound is at most
/// e^{−m}, on a 50-point grid of p in (0, 27/(4e)^4].
pub fn binomial_robust_oracle() -> OracleReport {
    let p_cap = 27.0 / (4.0 * E).powi(4);
    let constant = 4.0 / 3.0f64.powf(0.75);
    let mut max_slack = f64::NEG_INFINITY;
    let mut grid_points = 0usize;
    for m in 1..=20u64 {
        for j in 1..=50u64 {
            let p = p_cap * j as f64 / 50.0;
            let exact = exact_tail_geq(m, fraction_threshold(m, 1, 4), p);
            let bound = constant.powi(m as i32) * p.powf(m as f64 / 4.0);
            let exponential = (-(m as f64)).exp();
            max_slack = max_slack
                .max(exact - bound)
                .max(bound - exponential * (1.0 + 1e-12));
            grid_points += 1;
        }
    }
    report(
        "binomial-robust-tail",
        max_slack,
        format!("{grid_points} grid points with p <= {p_cap:.4e}, worst lhs-rhs {max_slack:.3e}"),
    )
}

/// Bagged-weight bias bound: Σ v_i (i/(N+1))^{1/d} ≤ 2e·k^{−1/d} for the
/// with-replacement weights, d ∈ [1, 6], N up to 500, ≤ 50 k values per N.
pub fn bagged_bias_oracle() -> OracleReport {
    let mut max_slack = f64::NEG_INFINITY;
    let mut grid_points = 0usize;
    for d in 1..=6usize {
        for &n in &[5usize, 20, 100, 500] {
            let step = (n / 50).max(1);
            let mut k = 1usize;
            while k <= n {
                let v = bagged_weights_with_replacement(k, n).expect("valid k");
                let lhs: f64 = v
                    .as_slice()
                    .iter()
                    .enumerate()
                    .map(|(idx, w)| w * ((idx + 1) as f64 / (n as f64 + 1.0)).powf(1.0 / d as f64))
                    .sum();
                let rhs = 2.0 * E * (k as f64).powf(-1.0 / d as f64);
                max_slack = max_slack.max(lhs - rhs);
                grid_points += 1;
                k += step;
            }
        }
    }
    report(
        "bagged-bias-bound",
        max_slack,
        format!("{grid_points} (d, N, k) grid points, worst lhs-rhs {max_slack:.3e}"),
    )
}

/// Quadrature identity ∫ g² = 1/(2(d+1)(d+2)) over the centered unit cube,
/// within 1e-6 relative error for d ∈ {1, 2, 3}.
pub fn g_quadrature_oracle() -> OracleReport {
    let mut max_slack = f64::NEG_INFINITY;
    let mut detail = String::new();
    for d in 1..=3usize {
        let quad = g_squared_quadrature(d);
        let closed = g_squared_closed_form(d);
        let rel = (quad - closed).abs() / closed;
        max_slack = max_slack.max(rel - 1e-6);
        detail.push_str(&format!("d={d}: rel err {rel:.2e}; "));
    }
    report("g-squared-quadrature", max_slack, detail)
}

/// Pipeline identity behind the choice m = ⌈ln(1/δ)⌉: with p = 1/(4e²),
/// 2^m p^{m/2} equals e^{−m} exactly, checked for m up to 50.
pub fn block_median_identity_oracle() -> OracleReport {
    let p = 1.0 / (4.0 * E * E);
    let mut max_slack = f64::NEG_INFINITY;
    for m in 1..=50i32 {
        let lhs = 2.0f64.powi(m) * p.powf(m as f64 / 2.0);
        let rhs = (-(m as f64)).exp();
        let rel = ((lhs - rhs) / rhs).abs();
        max_slack = max_slack.max(rel - 1e-12);
    }
    report(
        "block-median-identity",
        max_slack,
        format!("m up to 50, worst relative gap {:.3e}", max_slack + 1e-12),
    )
}

/// The full deterministic oracle suite.
pub fn all_oracles() -> Vec<OracleReport> {
    vec![
        binomial_median_oracle(),
        binomial_robust_oracle(),
        bagged_bias_oracle(),
        g_quadrature_oracle(),
        block_median_identity_oracle(),
    ]
}
