//! The blockwise-SVD estimator.
//!
//! For each level `ℓ ≤ L` the block `K_{δ,ℓ}` of the observed operator is
//! inverted only if `‖K_{δ,ℓ}⁻¹‖ ≤ κ_ℓ`, and the inverse is applied to the
//! data block `z_ℓ` only if `‖z_ℓ‖ ≥ τ_ℓ`; every other block is set to zero:
//!
//! ```text
//! κ_ℓ = λ₀ |Λ_ℓ|^{-1/2} (δ² |ln δ|)^{-1/2}  ∧  n^{1/2}
//! τ_ℓ = μ₀ |Λ_ℓ|^{1/2} (ln n / n)^{1/2}
//! L   = ⌊(δ²)^{-1/(2ν+d-1)}⌋  ∧  ⌊n^{1/(2ν+d)}⌋
//! ```
//!
//! `n = ∞` (no signal noise) is written as `T::infinity()`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BlockCoefficients, BlockOperator};
use crate::scalar::{cz, Real};

/// Relative nudge applied before flooring `L`, so that exact powers such as
/// `64^{1/1}` are not lost to rounding.
const FLOOR_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig<T> {
    pub delta: T,
    pub n: T,
    pub nu: T,
    pub d: T,
    pub lambda0: T,
    pub mu0: T,
    pub l_override: Option<usize>,
}

impl<T: Real> EstimatorConfig<T> {
    /// Validated configuration with `λ₀ = μ₀ = 1` and no override.
    pub fn new(delta: T, n: T, nu: T, d: T) -> Result<Self> {
        let cfg = Self { delta, n, nu, d, lambda0: T::one(), mu0: T::one(), l_override: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_prefactors(mut self, lambda0: T, mu0: T) -> Result<Self> {
        self.lambda0 = lambda0;
        self.mu0 = mu0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_override(mut self, l: Option<usize>) -> Result<Self> {
        self.l_override = l;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.delta >= T::zero() && self.delta < T::one()) {
            return bad(format!("δ = {} must lie in [0, 1)", self.delta));
        }
        if !(self.n > T::zero()) || self.n.is_nan() {
            return bad(format!("n = {} must be positive", self.n));
        }
        if !(self.nu >= T::zero()) || !self.nu.is_finite() {
            return bad(format!("ν = {} must be a nonnegative number", self.nu));
        }
        if !(self.d >= T::one()) || !self.d.is_finite() {
            return bad(format!("d = {} must be at least 1", self.d));
        }
        if !(self.lambda0 > T::zero()) || !self.lambda0.is_finite() {
            return bad(format!("λ₀ = {} must be positive", self.lambda0));
        }
        if !(self.mu0 >= T::zero()) || !self.mu0.is_finite() {
            return bad(format!("μ₀ = {} must be nonnegative", self.mu0));
        }
        if self.l_override == Some(0) {
            return bad("L override must be at least 1".into());
        }
        Ok(())
    }
}

/// Inversion cutoff `κ_ℓ` for a block of `size` coefficients. `+∞` when
/// `δ = 0` and `n = ∞` (gate disabled).
pub fn cutoff_kappa<T: Real>(cfg: &EstimatorConfig<T>, size: usize) -> T {
    let operator_term = if cfg.delta > T::zero() {
        let noise = cfg.delta * cfg.delta * cfg.delta.ln().abs();
        cfg.lambda0 / (T::from_usize_lossy(size) * noise).sqrt()
    } else {
        T::infinity()
    };
    operator_term.min(cfg.n.sqrt())
}

/// Energy threshold `τ_ℓ`; zero when `n = ∞`.
pub fn threshold_tau<T: Real>(cfg: &EstimatorConfig<T>, size: usize) -> Result<T> {
    if cfg.n.is_infinite() {
        return Ok(T::zero());
    }
    if !(cfg.n > T::one()) {
        return Err(Error::Config(format!("threshold needs n > 1, got {}", cfg.n)));
    }
    Ok(cfg.mu0 * (T::from_usize_lossy(size) * cfg.n.ln() / cfg.n).sqrt())
}

/// Frequency cap `L`.
pub fn max_level<T: Real>(cfg: &EstimatorConfig<T>) -> Result<usize> {
    if let Some(l) = cfg.l_override {
        return Ok(l.max(1));
    }
    let two_nu = cfg.nu + cfg.nu;
    let nudge = T::one() + T::lit(FLOOR_NUDGE);
    let delta_exp = two_nu + cfg.d - T::one();
    let delta_term = if cfg.delta > T::zero() && delta_exp > T::zero() {
        ((cfg.delta * cfg.delta).powf(-delta_exp.recip()) * nudge).floor()
    } else {
        T::infinity()
    };
    let n_term = if cfg.n.is_finite() { (cfg.n.powf((two_nu + cfg.d).recip()) * nudge).floor() } else { T::infinity() };
    let l = delta_term.min(n_term);
    if l.is_infinite() {
        return Err(Error::Config("δ = 0 with n = ∞ needs an explicit L".into()));
    }
    Ok(l.to_usize().unwrap_or(usize::MAX).max(1))
}

/// Diagnostics of one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRecord<T> {
    pub level: usize,
    pub size: usize,
    pub kappa: T,
    pub tau: T,
    /// `‖K_{δ,ℓ}⁻¹‖`, infinite for a numerically singular block.
    pub inverse_norm: T,
    pub data_norm: T,
    pub gate_pass: bool,
    pub energy_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport<T> {
    pub f_hat: BlockCoefficients<T>,
    /// One record per level `1..=l_used`.
    pub levels: Vec<LevelRecord<T>>,
    /// The cap from the rule (or override).
    pub l_rule: usize,
    /// The cap actually applied: `l_rule` limited to the levels present in the data.
    pub l_used: usize,
}

impl<T: Real> EstimateReport<T> {
    pub fn gate_pass(&self) -> Vec<bool> {
        self.levels.iter().map(|r| r.gate_pass).collect()
    }

    pub fn energy_pass(&self) -> Vec<bool> {
        self.levels.iter().map(|r| r.energy_pass).collect()
    }

    pub fn kappa(&self) -> Vec<T> {
        self.levels.iter().map(|r| r.kappa).collect()
    }

    pub fn tau(&self) -> Vec<T> {
        self.levels.iter().map(|r| r.tau).collect()
    }
}

/// Runs the estimator on data `z` with observed operator `k_delta`.
///
/// Levels above the stored data carry no information, so the cap is limited
/// to `min(L, levels of z, levels of K_δ)`; the rule's `L` is still reported.
pub fn estimate<T: Real>(
    z: &BlockCoefficients<T>,
    k_delta: &BlockOperator<T>,
    cfg: &EstimatorConfig<T>,
) -> Result<EstimateReport<T>> {
    cfg.validate()?;
    if !z.structure().compatible(k_delta.structure()) {
        return Err(Error::Shape("data and operator have different block structures".into()));
    }
    let l_rule = max_level(cfg)?;
    let l_used = l_rule.min(z.levels()).min(k_delta.levels());
    let mut blocks: Vec<Vec<Complex<T>>> = z.blocks().iter().map(|b| vec![cz(); b.len()]).collect();
    let mut levels = Vec::with_capacity(l_used);
    for level in 1..=l_used {
        let zl = z.block(level);
        let kl = k_delta.block(level);
        let size = zl.len();
        let kappa = cutoff_kappa(cfg, size);
        let tau = threshold_tau(cfg, size)?;
        let data_norm = zl.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        let energy_pass = data_norm >= tau;
        let (inverse_norm, mut gate_pass) = match kl.inverse_norm() {
            Ok(v) => (v, v <= kappa),
            Err(Error::Singular { .. }) => (T::infinity(), false),
            Err(e) => return Err(e),
        };
        if gate_pass && energy_pass {
            match kl.lu().and_then(|lu| lu.solve(zl)) {
                Ok(x) => blocks[level - 1] = x,
                Err(Error::Singular { .. }) => gate_pass = false,
                Err(e) => return Err(e),
            }
        }
        levels.push(LevelRecord { level, size, kappa, tau, inverse_norm, data_norm, gate_pass, energy_pass });
    }
    let f_hat = BlockCoefficients::new(z.structure().clone(), blocks)?;
    Ok(EstimateReport { f_hat, levels, l_rule, l_used })
}

/// `Σ_ℓ ‖f̂_ℓ - f_ℓ‖²` over the union of stored levels (missing levels count
/// as zero), summed left to right by level.
pub fn squared_error<T: Real>(f_hat: &BlockCoefficients<T>, f: &BlockCoefficients<T>) -> Result<T> {
    if !f_hat.structure().compatible(f.structure()) {
        return Err(Error::Shape("estimate and target have different block structures".into()));
    }
    Ok(level_errors(f_hat, f).into_iter().fold(T::zero(), |acc, e| acc + e))
}

/// Per-level squared errors over the union of stored levels.
pub fn level_errors<T: Real>(f_hat: &BlockCoefficients<T>, f: &BlockCoefficients<T>) -> Vec<T> {
    let levels = f_hat.levels().max(f.levels());
    let empty: &[Complex<T>] = &[];
    (1..=levels)
        .map(|level| {
            let a = if level <= f_hat.levels() { f_hat.block(level) } else { empty };
            let b = if level <= f.levels() { f.block(level) } else { empty };
            let len = a.len().max(b.len());
            (0..len)
                .map(|i| {
                    let x = a.get(i).copied().unwrap_or_else(cz);
                    let y = b.get(i).copied().unwrap_or_else(cz);
                    (x - y).norm_sqr()
                })
                .fold(T::zero(), |acc, e| acc + e)
        })
        .collect()
}

/// `Σ_{ℓ > L} ‖f_ℓ‖²`.
pub fn tail_energy<T: Real>(f: &BlockCoefficients<T>, l: usize) -> T {
    f.block_energies().into_iter().skip(l).fold(T::zero(), |acc, e| acc + e)
}
