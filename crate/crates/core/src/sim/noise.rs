//! Gaussian noise for the two sequence models
//! `K_{δ,ℓ} = K_ℓ + δ Ḃ_ℓ` and `z_ℓ = K_ℓ f_ℓ + n^{-1/2} η_ℓ`.
//!
//! Every entry of `Ḃ_ℓ` and `η_ℓ` has unit total variance. In
//! [`NoiseMode::Complex`] real and imaginary parts are independent
//! `N(0, 1/2)`. In [`NoiseMode::Real`] the noise is real `N(0, 1)` in the real
//! basis `U` of the structure and mapped back as `U R Uᴴ` and `U r`, so real
//! signals stay real.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::seed::SeedSpec;
use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::model::{BlockCoefficients, BlockOperator, BlockStructure};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    Complex,
    #[default]
    Real,
}

/// Real bases of the first levels of a structure, computed once.
#[derive(Debug, Clone)]
pub struct RealBases<T>(Vec<DenseMatrix<T>>);

impl<T: Real> RealBases<T> {
    pub fn new(structure: &BlockStructure) -> Result<Self> {
        (1..=structure.max_level()).map(|l| structure.real_basis(l)).collect::<Result<_>>().map(Self)
    }

    fn get(&self, level: usize) -> &DenseMatrix<T> {
        &self.0[level - 1]
    }
}

/// Noise generator bound to one mode and, in real mode, a set of bases.
#[derive(Debug, Clone)]
pub struct NoiseModel<T> {
    mode: NoiseMode,
    bases: Option<RealBases<T>>,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(mode: NoiseMode, structure: &BlockStructure) -> Result<Self> {
        let bases = match mode {
            NoiseMode::Real => Some(RealBases::new(structure)?),
            NoiseMode::Complex => None,
        };
        Ok(Self { mode, bases })
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
        let h = T::FRAC_1_SQRT_2();
        Complex::new(T::sample_normal(rng) * h, T::sample_normal(rng) * h)
    }

    /// One `size × size` matrix `Ḃ` for `level`.
    pub fn matrix<R: Rng + ?Sized>(&self, level: usize, size: usize, rng: &mut R) -> Result<DenseMatrix<T>> {
        match &self.bases {
            None => DenseMatrix::new(size, (0..size * size).map(|_| Self::complex_normal(rng)).collect()),
            Some(b) => {
                let r: Vec<T> = (0..size * size).map(|_| T::sample_normal(rng)).collect();
                let r = DenseMatrix::from_real(size, &r)?;
                let u = b.get(level);
                if size == 1 && u.get(0, 0) == Complex::new(T::one(), T::zero()) {
                    return Ok(r);
                }
                u.matmul(&r)?.matmul(&u.adjoint())
            }
        }
    }

    /// One vector `η` for `level`.
    pub fn vector<R: Rng + ?Sized>(&self, level: usize, size: usize, rng: &mut R) -> Result<Vec<Complex<T>>> {
        match &self.bases {
            None => Ok((0..size).map(|_| Self::complex_normal(rng)).collect()),
            Some(b) => {
                let r: Vec<Complex<T>> = (0..size).map(|_| Complex::new(T::sample_normal(rng), T::zero())).collect();
                b.get(level).matvec(&r)
            }
        }
    }

    /// `K + δ Ḃ`; bitwise `K` for `δ = 0`.
    pub fn perturb(&self, k: &BlockOperator<T>, delta: T, seed: &SeedSpec) -> Result<BlockOperator<T>> {
        if delta == T::zero() {
            return Ok(k.clone());
        }
        let mut rng = seed.rng("operator");
        let blocks = k
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, kl)| {
                let b = self.matrix(i + 1, kl.side(), &mut rng)?;
                kl.add_scaled(&b, delta)
            })
            .collect::<Result<Vec<_>>>()?;
        BlockOperator::new(k.structure().clone(), blocks)
    }

    /// `K f + n^{-1/2} η`; exactly `K f` for `n = ∞`.
    pub fn observe(
        &self,
        k: &BlockOperator<T>,
        f: &BlockCoefficients<T>,
        n: T,
        seed: &SeedSpec,
    ) -> Result<BlockCoefficients<T>> {
        let clean = k.apply(f)?;
        if n.is_infinite() {
            return Ok(clean);
        }
        let sigma = n.sqrt().recip();
        let mut rng = seed.rng("signal");
        let blocks = clean
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let eta = self.vector(i + 1, b.len(), &mut rng)?;
                Ok(b.iter().zip(eta).map(|(&x, e)| x + e * sigma).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        BlockCoefficients::new(clean.structure().clone(), blocks)
    }
}

/// `K_δ = K + δ Ḃ` with fresh noise from `seed`.
pub fn perturb_operator<T: Real>(
    k: &BlockOperator<T>,
    delta: T,
    mode: NoiseMode,
    seed: &SeedSpec,
) -> Result<BlockOperator<T>> {
    NoiseModel::new(mode, k.structure())?.perturb(k, delta, seed)
}

/// `z = K f + n^{-1/2} η` with fresh noise from `seed`.
pub fn observe_signal<T: Real>(
    k: &BlockOperator<T>,
    f: &BlockCoefficients<T>,
    n: T,
    mode: NoiseMode,
    seed: &SeedSpec,
) -> Result<BlockCoefficients<T>> {
    NoiseModel::new(mode, f.structure())?.observe(k, f, n, seed)
}
