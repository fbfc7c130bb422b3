//! Hard-instance construction for the minimax lower bound: sign-indexed
//! bump mixtures on a near-unit cube, plus the quadrature identities the
//! construction relies on.

use std::f64::consts::{E, PI};

use momreg_core::error::{Error, Result};
use momreg_core::seeds::{derive_seed, stream_rng};
use momreg_core::{
    mom_predict, BaseEstimatorKind, Dataset, EstimatorFamily, MoMConfig, Point, Sample,
};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::binomial::TailEstimate;
use crate::tail::CP_LEVEL;

/// A small-ball constant valid for the uniform law on the (near-)unit cube:
/// π^{d/2} / (2^d d^{d/2} Γ(1 + d/2)), the mass fraction of a corner ball
/// sector after shrinking the radius by √d. Depends on d only.
pub fn rho_unit_cube(d: usize) -> f64 {
    let df = d as f64;
    PI.powf(df / 2.0) / (2.0f64.powf(df) * df.powf(df / 2.0) * libm::tgamma(1.0 + df / 2.0))
}

/// Distance to the boundary of the centered unit cube, zero outside:
/// g(x) = min_i(1/2 − |x_i|) for x in [−1/2, 1/2]^d.
pub fn lower_bound_g(x: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for &c in x {
        if c.abs() > 0.5 {
            return 0.0;
        }
        min = min.min(0.5 - c.abs());
    }
    min
}

/// ∫ g² over the centered unit cube, by quadrature.
///
/// g depends on x only through t = max_i |x_i|, and the level sets of the max
/// have Lebesgue measure d·t^{d−1}dt on the folded cube, so the integral
/// reduces to 2^d·d·∫₀^{1/2} g(t·e_d)²·t^{d−1} dt. The integrand is evaluated
/// through the real g and integrated by composite Simpson, which is within a
/// few ulp for these low-degree piecewise polynomials.
pub fn g_squared_quadrature(d: usize) -> f64 {
    let panels = 4096usize; // even
    let a = 0.0f64;
    let b = 0.5f64;
    let h = (b - a) / panels as f64;
    let integrand = |t: f64| -> f64 {
        let mut coords = vec![0.0; d];
        coords[d - 1] = t;
        let g = lower_bound_g(&coords);
        g * g * t.powi(d as i32 - 1)
    };
    let mut acc = integrand(a) + integrand(b);
    for i in 1..panels {
        let t = a + i as f64 * h;
        acc += integrand(t) * if i % 2 == 0 { 2.0 } else { 4.0 };
    }
    let one_dim = acc * h / 3.0;
    2.0f64.powi(d as i32) * d as f64 * one_dim
}

/// The closed-form value of ∫ g² over the centered unit cube.
pub fn g_squared_closed_form(d: usize) -> f64 {
    1.0 / (2.0 * (d as f64 + 1.0) * (d as f64 + 2.0))
}

/// Bump side length for the hard instance at confidence delta:
/// h = (πσ²(d+1)(d+2)·ln(1/(2^{d+3}δ))/n)^{1/(d+2)}.
pub fn lower_bound_h(sigma: f64, d: usize, n: usize, delta: f64) -> Result<f64> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::invalid("sigma must be positive and finite"));
    }
    if n < 1 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let cap = 2.0f64.powi(-(d as i32 + 3));
    if !(delta > 0.0 && delta <= cap) {
        return Err(Error::invalid(format!(
            "delta = {delta} outside (0, {cap}] for d = {d}"
        )));
    }
    let df = d as f64;
    let log_term = (1.0 / (2.0f64.powi(d as i32 + 3) * delta)).ln();
    Ok((PI * sigma * sigma * (df + 1.0) * (df + 2.0) * log_term / n as f64).powf(1.0 / (df + 2.0)))
}

/// Error threshold of the lower-bound statement:
/// (1/4)(σ²·ln(1/(2^{d+3}δ))/n)^{1/(d+2)}.
pub fn lower_bound_threshold(sigma: f64, d: usize, n: usize, delta: f64) -> Result<f64> {
    let cap = 2.0f64.powi(-(d as i32 + 3));
    if !(delta > 0.0 && delta <= cap) {
        return Err(Error::invalid(format!(
            "delta = {delta} outside (0, {cap}] for d = {d}"
        )));
    }
    let df = d as f64;
    let log_term = (1.0 / (2.0f64.powi(d as i32 + 3) * delta)).ln();
    Ok(0.25 * (sigma * sigma * log_term / n as f64).powf(1.0 / (df + 2.0)))
}

/// A sign-indexed regression function: scaled copies of the bump g on a grid
/// of cells with side h tiling [0, h⌈1/h⌉]^d, each flipped by its sign.
/// 1-Lipschitz for every sign vector; continuous because g vanishes on cell
/// boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialInstance {
    pub d: usize,
    pub h: f64,
    pub cells_per_axis: usize,
    pub signs: Vec<i8>,
}

impl AdversarialInstance {
    pub fn new(d: usize, h: f64, signs: Vec<i8>) -> Result<Self> {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::invalid("cell side h must be positive"));
        }
        let cells_per_axis = (1.0 / h).ceil() as usize;
        let total = cells_per_axis.pow(d as u32);
        if signs.len() != total {
            return Err(Error::invalid(format!(
                "expected {total} signs, got {}",
                signs.len()
            )));
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::invalid("signs must be +1 or -1"));
        }
        Ok(AdversarialInstance {
            d,
            h,
            cells_per_axis,
            signs,
        })
    }

    /// Side length of the support cube [0, h⌈1/h⌉]^d.
    pub fn side_length(&self) -> f64 {
        self.h * self.cells_per_axis as f64
    }

    pub fn cell_count(&self) -> usize {
        self.signs.len()
    }

    /// Flat cell index of a point, None outside the support.
    pub fn cell_of(&self, x: &[f64]) -> Option<usize> {
        let side = self.side_length();
        let mut flat = 0usize;
        for &c in x {
            if !(0.0..=side).contains(&c) {
                return None;
            }
            let idx = ((c / self.h) as usize).min(self.cells_per_axis - 1);
            flat = flat * self.cells_per_axis + idx;
        }
        Some(flat)
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        let mut idx = flat;
        let mut center = vec![0.0; self.d];
        for axis in (0..self.d).rev() {
            center[axis] = (idx % self.cells_per_axis) as f64 * self.h + self.h / 2.0;
            idx /= self.cells_per_axis;
        }
        center
    }

    /// r(x) = c_j · h · g((x − a_j)/h) on cell j, 0 outside the support.
    pub fn value(&self, x: &[f64]) -> f64 {
        let Some(flat) = self.cell_of(x) else {
            return 0.0;
        };
        let center = self.cell_center(flat);
        let local: Vec<f64> = x
            .iter()
            .zip(&center)
            .map(|(c, a)| (c - a) / self.h)
            .collect();
        self.signs[flat] as f64 * self.h * lower_bound_g(&local)
    }
}

/// The estimator a lower-bound experiment attacks. Tuning follows the
/// closed-form rules where feasible and is clamped into the legal range
/// otherwise; the lower bound quantifies over arbitrary estimators, so
/// clamping is sound even when delta is below the estimator's admissible
/// range.
fn attacked_estimator(
    family: EstimatorFamily,
    sigma: f64,
    d: usize,
    n: usize,
    rho: f64,
    delta: f64,
) -> Result<MoMConfig> {
    let m = momreg_core::select_m(delta)?.min(n).max(1);
    let block = (n / m).max(1);
    let df = d as f64;
    let base = match family {
        EstimatorFamily::Knn => {
            let raw = (sigma * sigma / (32.0 * E * E)).powf(df / (df + 2.0))
                * (rho * n as f64 / m as f64).powf(2.0 / (df + 2.0));
            BaseEstimatorKind::Knn((raw.floor() as usize).clamp(1, block))
        }
        EstimatorFamily::BaggedOneNn => {
            let raw = (32.0 * E * E * n as f64 / (rho.powf(2.0 / df) * sigma * sigma * m as f64))
                .powf(df / (df + 2.0));
            BaseEstimatorKind::BaggedOneNn {
                k: (raw.floor() as usize).clamp(1, block),
                with_replacement: true,
            }
        }
        EstimatorFamily::Kernel => {
            let h =
                (8.0 * E * E * sigma * sigma * m as f64 / (rho * n as f64)).powf(1.0 / (df + 2.0));
            BaseEstimatorKind::Kernel(h)
        }
        other => {
            return Err(Error::invalid(format!(
                "estimator family {} not supported by the lower-bound runner",
                other.name()
            )))
        }
    };
    Ok(MoMConfig { m, base })
}

/// One evaluation of the attacked estimator against a given sign vector.
/// Fresh dataset, fresh query; the query is either uniform on the support or
/// uniform within one cell (for the per-cell sign search).
fn exceedance_trial(
    instance: &AdversarialInstance,
    config: &MoMConfig,
    sigma: f64,
    n: usize,
    threshold: f64,
    focus_cell: Option<usize>,
    trial_seed: u64,
) -> Result<bool> {
    let side = instance.side_length();
    let mut rng = stream_rng(trial_seed, 0);
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let samples: Result<Vec<Sample>> = (0..n)
        .map(|_| {
            let coords: Vec<f64> = (0..instance.d)
                .map(|_| rng.random::<f64>() * side)
                .collect();
            let y = instance.value(&coords) + normal.sample(&mut rng);
            Sample::new(Point::new(coords)?, y)
        })
        .collect();
    let dataset = Dataset::new(samples?)?;

    let mut query_rng = stream_rng(trial_seed, 1);
    let query: Vec<f64> = match focus_cell {
        Some(flat) => {
            let center = instance.cell_center(flat);
            center
                .iter()
                .map(|a| a - instance.h / 2.0 + query_rng.random::<f64>() * instance.h)
                .collect()
        }
        None => (0..instance.d)
            .map(|_| query_rng.random::<f64>() * side)
            .collect(),
    };
    let point = Point::new(query.clone())?;
    let estimate = mom_predict(&dataset, &point, config, derive_seed(trial_seed, 2))?;
    Ok((estimate - instance.value(&query)).abs() >= threshold)
}

/// Report of a full lower-bound experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub d: usize,
    pub n: usize,
    pub sigma: f64,
    pub delta: f64,
    pub h: f64,
    pub cells: usize,
    pub side_length: f64,
    pub rho: f64,
    pub threshold: f64,
    pub estimator: String,
    pub signs: Vec<i8>,
    pub tail: TailEstimate,
}

impl LowerBoundReport {
    /// The lower-bound claim at the Monte Carlo level: the empirical
    /// exceedance is at least delta.
    pub fn exhibits_lower_bound(&self) -> bool {
        self.tail.point >= self.delta
    }
}

/// Build the hard instance for (d, σ, n, δ), pick the worst sign per cell by
/// Monte Carlo, then measure the exceedance probability of the attacked
/// estimator at the lower-bound threshold.
#[allow(clippy::too_many_arguments)]
pub fn run_lower_bound(
    family: EstimatorFamily,
    d: usize,
    sigma: f64,
    n: usize,
    delta: f64,
    search_trials: u64,
    trials: u64,
    seed: u64,
) -> Result<LowerBoundReport> {
    let h = lower_bound_h(sigma, d, n, delta)?;
    if h == 0.0 {
        return Err(Error::invalid(
            "delta at the boundary gives a degenerate zero-width instance",
        ));
    }
    let threshold = lower_bound_threshold(sigma, d, n, delta)?;
    let probe = AdversarialInstance::new(d, h, vec![1; ((1.0 / h).ceil() as usize).pow(d as u32)])?;
    let side = probe.side_length();
    // Valid small-ball constant for Unif([0, side]^d).
    let rho = rho_unit_cube(d) / side.powi(d as i32);
    let config = attacked_estimator(family, sigma, d, n, rho, delta)?;

    // Greedy per-cell search: flip each cell to the sign with more observed
    // exceedances when queries land in that cell.
    let cells = probe.cell_count();
    let mut signs = vec![1i8; cells];
    for cell in 0..cells {
        let mut counts = [0u64; 2];
        for (slot, sign) in [(0usize, 1i8), (1usize, -1i8)] {
            let mut candidate = signs.clone();
            candidate[cell] = sign;
            let instance = AdversarialInstance::new(d, h, candidate)?;
            counts[slot] = (0..search_trials)
                .into_par_iter()
                .map(|t| {
                    let trial_seed =
                        derive_seed(seed, (1 + cell as u64) << 32 | (slot as u64) << 24 | t);
                    exceedance_trial(
                        &instance,
                        &config,
                        sigma,
                        n,
                        threshold,
                        Some(cell),
                        trial_seed,
                    )
                    .map(u64::from)
                })
                .sum::<Result<u64>>()?;
        }
        if counts[1] > counts[0] {
            signs[cell] = -1;
        }
    }

    let instance = AdversarialInstance::new(d, h, signs.clone())?;
    let exceedances = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, t);
            exceedance_trial(&instance, &config, sigma, n, threshold, None, trial_seed)
                .map(u64::from)
        })
        .sum::<Result<u64>>()?;

    Ok(LowerBoundReport {
        d,
        n,
        sigma,
        delta,
        h,
        cells,
        side_length: side,
        rho,
        threshold,
        estimator: format!("mom-{}(m={})", family.name(), config.m),
        signs,
        tail: TailEstimate::from_counts(exceedances, trials, CP_LEVEL),
    })
}
