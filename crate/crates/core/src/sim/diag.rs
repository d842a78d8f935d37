//! Monte-Carlo summaries of the scaled norms `|Λ|^{-1/2}‖Ḃ‖` and
//! `|Λ|^{-1/2}‖η‖` for real Gaussian blocks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::mean_std;
use super::seed::SeedSpec;
use crate::error::{Error, Result};
use crate::linalg::real_spectral_norm;
use crate::scalar::Real;

/// Thresholds at which exceedance frequencies are reported.
pub const EXCEEDANCE_LEVELS: [f64; 3] = [2.5, 3.0, 4.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exceedance {
    pub beta: f64,
    pub op_norm: f64,
    pub vec_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSummary {
    pub size: usize,
    pub trials: usize,
    pub mean_op_norm_scaled: f64,
    pub se_op_norm_scaled: f64,
    pub mean_vec_norm_scaled: f64,
    pub se_vec_norm_scaled: f64,
    pub tail_estimates: Vec<Exceedance>,
}

fn one_trial(size: usize, seed: &SeedSpec) -> (f64, f64) {
    let mut rng = seed.rng("diag");
    let a: Vec<f64> = (0..size * size).map(|_| f64::sample_normal(&mut rng)).collect();
    let op = real_spectral_norm(&a, size);
    let v = (0..size).map(|_| f64::sample_normal(&mut rng).powi(2)).sum::<f64>().sqrt();
    let scale = (size as f64).sqrt();
    (op / scale, v / scale)
}

/// Scaled operator and vector norms over `trials` independent draws.
pub fn concentration_diag(size: usize, trials: usize, master_seed: u64) -> Result<ConcentrationSummary> {
    if size == 0 || trials == 0 {
        return Err(Error::Config("size and trials must be positive".into()));
    }
    let draws: Vec<(f64, f64)> =
        (0..trials as u64).into_par_iter().map(|i| one_trial(size, &SeedSpec::new(master_seed, i))).collect();
    let (ops, vecs): (Vec<f64>, Vec<f64>) = draws.into_iter().unzip();
    let (mo, so) = mean_std(&ops);
    let (mv, sv) = mean_std(&vecs);
    let rt = (trials as f64).sqrt();
    let freq = |xs: &[f64], beta: f64| xs.iter().filter(|&&x| x >= beta).count() as f64 / trials as f64;
    Ok(ConcentrationSummary {
        size,
        trials,
        mean_op_norm_scaled: mo,
        se_op_norm_scaled: so / rt,
        mean_vec_norm_scaled: mv,
        se_vec_norm_scaled: sv / rt,
        tail_estimates: EXCEEDANCE_LEVELS
            .iter()
            .map(|&beta| Exceedance { beta, op_norm: freq(&ops, beta), vec_norm: freq(&vecs, beta) })
            .collect(),
    })
}
