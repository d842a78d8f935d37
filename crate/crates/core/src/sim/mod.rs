//! Noise injection, Monte-Carlo experiments and statistical diagnostics.

mod diag;
mod experiment;
mod noise;
mod rate;
mod sampling;
mod seed;

pub use diag::{concentration_diag, ConcentrationSummary, Exceedance, EXCEEDANCE_LEVELS};
pub use experiment::{
    mean_std, monte_carlo, run_replicate, ExperimentConfig, Problem, ProblemSpec, RiskRow, RiskSummary, SampleSize,
};
pub use noise::{observe_signal, perturb_operator, NoiseMode, NoiseModel, RealBases};
pub use rate::{log_grid, rate_slope, RatePoint};
pub use sampling::{
    empirical_coeffs, haar_angle_quantile, rotate_points, sample_rotation_conjinv, sample_sphere_density,
    MIN_ACCEPTANCE, PROBE_PROPOSALS,
};
pub use seed::SeedSpec;
