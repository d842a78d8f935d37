use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::noise::{NoiseMode, NoiseModel};
use super::rate::RatePoint;
use super::seed::SeedSpec;
use crate::error::{Error, Result};
use crate::estimator::{estimate, max_level, squared_error, tail_energy, EstimateReport, EstimatorConfig};
use crate::model::{BlockCoefficients, BlockOperator};
use crate::scalar::Real;
use crate::sphere::{gaussian_bump_coeffs, ordinary_smooth_operator};
use crate::torus::{power_law_operator, power_law_signal};

/// Test problem of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    /// `f_k = (1∨|k|)^{-s}`, `K_k = (1∨|k|)^{-ν}` for `|k| <= k_max` on the circle.
    CircularPowerLaw { s_exponent: f64, nu: f64, k_max: usize },
    /// Gaussian bump on the sphere blurred by the Laplace law (`ν = 2`).
    SphericalLaplace { l_max: usize },
    /// Gaussian bump with blocks `(1 + l(l+1))^{-ν/2} I`.
    SphericalSmooth { l_max: usize, nu: f64 },
}

impl ProblemSpec {
    pub fn nu(&self) -> f64 {
        match *self {
            Self::CircularPowerLaw { nu, .. } | Self::SphericalSmooth { nu, .. } => nu,
            Self::SphericalLaplace { .. } => 2.0,
        }
    }

    pub fn dimension(&self) -> f64 {
        match self {
            Self::CircularPowerLaw { .. } => 1.0,
            _ => 2.0,
        }
    }

    /// Same problem with degree of ill-posedness `nu`.
    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        match *self {
            Self::CircularPowerLaw { s_exponent, k_max, .. } => Ok(Self::CircularPowerLaw { s_exponent, nu, k_max }),
            Self::SphericalLaplace { l_max } | Self::SphericalSmooth { l_max, .. } => {
                Ok(Self::SphericalSmooth { l_max, nu })
            }
        }
    }
}

/// Sample size `n`, possibly infinite (no signal noise). In JSON a number or
/// the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSize(pub f64);

impl SampleSize {
    pub const INFINITE: Self = Self(f64::INFINITY);
}

impl std::str::FromStr for SampleSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::INFINITE),
            other => other.parse().map(Self).map_err(|_| Error::Config(format!("invalid sample size {s:?}"))),
        }
    }
}

impl Serialize for SampleSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for SampleSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Self(x)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub delta_grid: Vec<f64>,
    pub n: SampleSize,
    pub replicates: usize,
    #[serde(default = "one")]
    pub lambda0: f64,
    #[serde(default = "one")]
    pub mu0: f64,
    #[serde(default)]
    pub l_override: Option<usize>,
    #[serde(default)]
    pub noise: NoiseMode,
    #[serde(default)]
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.delta_grid.is_empty() {
            return Err(Error::Config("empty δ grid".into()));
        }
        for &d in &self.delta_grid {
            self.estimator_config::<f64>(d)?;
        }
        match self.problem {
            ProblemSpec::CircularPowerLaw { s_exponent, nu, k_max } => {
                if !(s_exponent > 0.0) || !(nu >= 0.0) || k_max == 0 {
                    return Err(Error::Config("power-law problem needs s > 0, ν >= 0, k_max >= 1".into()));
                }
            }
            ProblemSpec::SphericalSmooth { nu, .. } if !(nu >= 0.0) => {
                return Err(Error::Config(format!("ν = {nu} must be nonnegative")));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn estimator_config<T: Real>(&self, delta: f64) -> Result<EstimatorConfig<T>> {
        let cfg = EstimatorConfig {
            delta: T::lit(delta),
            n: T::lit(self.n.0),
            nu: T::lit(self.problem.nu()),
            d: T::lit(self.problem.dimension()),
            lambda0: T::lit(self.lambda0),
            mu0: T::lit(self.mu0),
            l_override: self.l_override,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Target and true operator of a configured experiment, built once.
#[derive(Debug, Clone)]
pub struct Problem<T> {
    pub config: ExperimentConfig,
    pub f: BlockCoefficients<T>,
    pub k: BlockOperator<T>,
    noise: NoiseModel<T>,
}

impl<T: Real> Problem<T> {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let (f, k) = match config.problem {
            ProblemSpec::CircularPowerLaw { s_exponent, nu, k_max } => {
                (power_law_signal(T::lit(s_exponent), k_max)?.into_coeffs(), power_law_operator(T::lit(nu), k_max)?)
            }
            ProblemSpec::SphericalLaplace { l_max } => (
                gaussian_bump_coeffs::<T>(l_max)?.into_coeffs(),
                ordinary_smooth_operator(l_max, T::lit(2.0))?.into_block_operator(),
            ),
            ProblemSpec::SphericalSmooth { l_max, nu } => (
                gaussian_bump_coeffs::<T>(l_max)?.into_coeffs(),
                ordinary_smooth_operator(l_max, T::lit(nu))?.into_block_operator(),
            ),
        };
        let noise = NoiseModel::new(config.noise, f.structure())?;
        Ok(Self { config: config.clone(), f, k, noise })
    }

    /// Draws `(K_δ, z)` and runs the estimator.
    pub fn estimate(&self, delta: f64, seed: &SeedSpec) -> Result<EstimateReport<T>> {
        let cfg = self.config.estimator_config::<T>(delta)?;
        let k_delta = self.noise.perturb(&self.k, T::lit(delta), seed)?;
        let z = self.noise.observe(&self.k, &self.f, T::lit(self.config.n.0), seed)?;
        estimate(&z, &k_delta, &cfg)
    }

    /// Squared error of one replicate.
    pub fn run_replicate(&self, delta: f64, seed: &SeedSpec) -> Result<T> {
        squared_error(&self.estimate(delta, seed)?.f_hat, &self.f)
    }

    /// `Σ_{ℓ > L} ‖f_ℓ‖²` for the cap used at `delta`.
    pub fn bias(&self, delta: f64) -> Result<T> {
        let l = max_level(&self.config.estimator_config::<T>(delta)?)?;
        Ok(tail_energy(&self.f, l.min(self.f.levels())))
    }
}

/// One replicate of `cfg` at `delta`: builds the problem, draws the noise,
/// returns the raw squared error.
pub fn run_replicate<T: Real>(cfg: &ExperimentConfig, delta: f64, seed: &SeedSpec) -> Result<T> {
    Problem::<T>::new(cfg)?.run_replicate(delta, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskRow {
    pub delta: f64,
    pub mean: f64,
    pub std: f64,
    pub replicates: usize,
    /// Deterministic truncation part `Σ_{ℓ > L} ‖f_ℓ‖²` of the risk.
    pub bias: f64,
}

impl RiskRow {
    pub fn std_error(&self) -> f64 {
        self.std / (self.replicates as f64).sqrt()
    }

    pub fn bias_fraction(&self) -> f64 {
        if self.mean > 0.0 {
            self.bias / self.mean
        } else {
            0.0
        }
    }
}

/// Monte-Carlo risk per δ. Errors are raw squared errors `Σ_ℓ ‖f̂_ℓ − f_ℓ‖²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskSummary {
    pub rows: Vec<RiskRow>,
    pub master_seed: u64,
    pub noise: NoiseMode,
    pub normalization: &'static str,
}

impl RiskSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,mean,std,replicates\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.delta, r.mean, r.std, r.replicates));
        }
        out
    }

    /// Rows with `δ > 0` as rate points.
    pub fn rate_points(&self) -> Result<Vec<RatePoint>> {
        self.rows.iter().filter(|r| r.delta > 0.0).map(|r| RatePoint::new(r.delta, r.mean)).collect()
    }

    /// Largest bias fraction over rows with `δ > 0`.
    pub fn max_bias_fraction(&self) -> f64 {
        self.rows.iter().filter(|r| r.delta > 0.0).map(RiskRow::bias_fraction).fold(0.0, f64::max)
    }
}

/// Mean and sample standard deviation (`n - 1`; zero for one value), both
/// summed left to right.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().fold(0.0, |a, x| a + x) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs.iter().fold(0.0, |a, x| a + (x - mean) * (x - mean));
    (mean, (ss / (n - 1.0)).sqrt())
}

impl<T: Real> Problem<T> {
    /// Squared errors of every replicate at `delta`, in replicate order.
    pub fn replicate_errors(&self, delta: f64) -> Result<Vec<f64>> {
        (0..self.config.replicates as u64)
            .into_par_iter()
            .map(|i| self.run_replicate(delta, &SeedSpec::new(self.config.master_seed, i)).map(|e| e.as_f64()))
            .collect()
    }

    pub fn monte_carlo(&self) -> Result<RiskSummary> {
        let rows = self
            .config
            .delta_grid
            .iter()
            .map(|&delta| {
                let errs = self.replicate_errors(delta)?;
                let (mean, std) = mean_std(&errs);
                Ok(RiskRow { delta, mean, std, replicates: errs.len(), bias: self.bias(delta)?.as_f64() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RiskSummary {
            rows,
            master_seed: self.config.master_seed,
            noise: self.config.noise,
            normalization: "raw squared error",
        })
    }
}

/// Runs every δ of `cfg` on `threads` workers (all cores when `None`). The
/// result does not depend on the worker count.
pub fn monte_carlo<T: Real>(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<RiskSummary> {
    let problem = Problem::<T>::new(cfg)?;
    match threads {
        None => problem.monte_carlo(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| problem.monte_carlo()),
    }
}
