//! Synthetic regression scenarios: 1-Lipschitz targets on [0,1]^d with
//! variance-calibrated noise families.

use momreg_core::error::{Error, Result};
use momreg_core::{Dataset, EstimatorFamily, ModelClass, Point, Sample};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StudentT};
use serde::Serialize;

/// A named 1-Lipschitz regression target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFn {
    Zero,
    /// First coordinate.
    Linear,
    /// Euclidean norm.
    Norm,
    /// sin of the first coordinate.
    Sine,
}

impl TargetFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TargetFn::Zero => 0.0,
            TargetFn::Linear => x[0],
            TargetFn::Norm => x.iter().map(|c| c * c).sum::<f64>().sqrt(),
            TargetFn::Sine => x[0].sin(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TargetFn::Zero => "zero",
            TargetFn::Linear => "linear",
            TargetFn::Norm => "norm",
            TargetFn::Sine => "sine",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "zero" => Ok(TargetFn::Zero),
            "linear" => Ok(TargetFn::Linear),
            "norm" => Ok(TargetFn::Norm),
            "sine" => Ok(TargetFn::Sine),
            other => Err(Error::invalid(format!(
                "unknown target {other:?}; expected zero|linear|norm|sine"
            ))),
        }
    }
}

/// Noise with conditional variance exactly σ². Heavy-tailed families are
/// rescaled so their variance matches the nominal σ².
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    Gaussian { sigma: f64 },
    StudentT { nu: f64, sigma: f64 },
    SymmetricPareto { tail_index: f64, sigma: f64 },
}

impl NoiseSpec {
    pub fn sigma(&self) -> f64 {
        match self {
            NoiseSpec::Gaussian { sigma }
            | NoiseSpec::StudentT { sigma, .. }
            | NoiseSpec::SymmetricPareto { sigma, .. } => *sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sigma = self.sigma();
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::invalid("noise sigma must be finite and >= 0"));
        }
        match self {
            NoiseSpec::Gaussian { .. } => Ok(()),
            NoiseSpec::StudentT { nu, .. } => {
                if !nu.is_finite() || *nu <= 2.0 {
                    return Err(Error::invalid(
                        "student-t noise needs nu > 2 for a finite variance",
                    ));
                }
                Ok(())
            }
            NoiseSpec::SymmetricPareto { tail_index, .. } => {
                if !tail_index.is_finite() || *tail_index <= 2.0 {
                    return Err(Error::invalid(
                        "pareto noise needs tail index > 2 for a finite variance",
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            NoiseSpec::Gaussian { sigma } => {
                if *sigma == 0.0 {
                    0.0
                } else {
                    Normal::new(0.0, *sigma)
                        .expect("validated sigma")
                        .sample(rng)
                }
            }
            NoiseSpec::StudentT { nu, sigma } => {
                if *sigma == 0.0 {
                    return 0.0;
                }
                // Var(t_ν) = ν/(ν−2); rescale to σ².
                let scale = sigma * ((nu - 2.0) / nu).sqrt();
                scale * StudentT::new(*nu).expect("validated nu").sample(rng)
            }
            NoiseSpec::SymmetricPareto { tail_index, sigma } => {
                if *sigma == 0.0 {
                    return 0.0;
                }
                // |X| = U^{-1/a} has E[X²] = a/(a−2); a random sign centers it.
                let a = *tail_index;
                let scale = sigma * ((a - 2.0) / a).sqrt();
                let u: f64 = rng.random();
                let magnitude = u.powf(-1.0 / a);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * scale * magnitude
            }
        }
    }
}

/// Where the per-trial query point comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum QueryPolicy {
    /// Evaluate every trial at one fixed point.
    Fixed { point: Vec<f64> },
    /// Draw a fresh query from the feature distribution each trial.
    Fresh,
}

/// Explicit tuning value for a base estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TuningValue {
    Neighbors(usize),
    Bandwidth(f64),
    Cells(usize),
}

/// Which estimator a scenario runs.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec {
    Mom {
        family: EstimatorFamily,
        /// Block count; `None` derives m = ⌈ln(1/δ)⌉ from the scenario delta.
        m: Option<usize>,
        /// Tuning value; `None` applies the family's closed-form rule.
        tuning: Option<TuningValue>,
        /// Report the contamination-inflated radius when thresholds are
        /// derived automatically.
        robust: bool,
    },
    Adaptive {
        family: EstimatorFamily,
    },
}

impl EstimatorSpec {
    pub fn family(&self) -> EstimatorFamily {
        match self {
            EstimatorSpec::Mom { family, .. } | EstimatorSpec::Adaptive { family } => *family,
        }
    }

    pub fn robust(&self) -> bool {
        matches!(self, EstimatorSpec::Mom { robust: true, .. })
    }
}

/// Everything needed to replicate one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub id: String,
    pub d: usize,
    pub n: usize,
    pub target: TargetFn,
    pub noise: NoiseSpec,
    /// Small-ball constant of the feature distribution (Unif([0,1]^d)).
    pub rho: f64,
    /// Doubling constant, required only for mutual-NN estimators.
    pub alpha: Option<f64>,
    pub estimator: EstimatorSpec,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub query: QueryPolicy,
    pub contamination: Option<crate::contaminate::ContaminationSpec>,
}

impl ScenarioSpec {
    /// The model class the tuning rules are evaluated against. The noise σ
    /// doubles as the model σ and the support [0,1]^d fixes the diameter.
    pub fn model(&self) -> Result<ModelClass> {
        ModelClass::new(
            self.rho,
            self.noise.sigma(),
            self.d,
            (self.d as f64).sqrt(),
            self.alpha,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if self.n < 1 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        if self.trials < 1 {
            return Err(Error::invalid("need at least one trial"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        self.noise.validate()?;
        // The model class exists only for positive noise; fully explicit
        // estimators may run noiseless scenarios without one.
        let needs_model = matches!(self.estimator, EstimatorSpec::Adaptive { .. })
            || matches!(self.estimator, EstimatorSpec::Mom { tuning: None, .. });
        if needs_model {
            self.model()?;
        }
        if let QueryPolicy::Fixed { point } = &self.query {
            if point.len() != self.d {
                return Err(Error::invalid("query point has wrong dimension"));
            }
            if point.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::invalid("query point must lie in [0,1]^d"));
            }
        }
        if let Some(c) = &self.contamination {
            c.validate(self.n, self.d)?;
        }
        Ok(())
    }
}

/// Draw a uniform point in [0,1]^d.
pub fn sample_unit_cube(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>()).collect()
}

/// n i.i.d. samples: X uniform on [0,1]^d, Y = target(X) + noise.
pub fn generate_dataset(
    d: usize,
    n: usize,
    target: TargetFn,
    noise: &NoiseSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    noise.validate()?;
    let samples: Result<Vec<Sample>> = (0..n)
        .map(|_| {
            let coords = sample_unit_cube(d, rng);
            let y = target.eval(&coords) + noise.sample(rng);
            Sample::new(Point::new(coords)?, y)
        })
        .collect();
    Dataset::new(samples?)
}
