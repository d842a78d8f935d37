//! Fourier analysis on the torus `T^d`.
//!
//! The index `k ∈ Z^d` sits in block `1 + Σ|k_j|`. Within a block indices are
//! kept in lexicographic order, which makes the block closed under `k ↦ -k`
//! and gives a deterministic layout for the coefficient vectors.
//!
//! The power-law families use `(1 ∨ |k|)^{-p}`: the bare `|k|^{-p}` is
//! undefined at `k = 0`, and `1 ∨ |k|` keeps the zero frequency at weight one.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::{BlockCoefficients, BlockOperator, BlockStructure};
use crate::scalar::{re, Real};

/// Tolerance on the imaginary residue of synthesised real signals.
pub const SYNTH_IMAG_TOL: f64 = 1e-8;

/// A Fourier index `k ∈ Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FourierIndex(pub Vec<i64>);

impl FourierIndex {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Block level `1 + Σ|k_j|`.
    pub fn level(&self) -> usize {
        1 + self.0.iter().map(|k| k.unsigned_abs() as usize).sum::<usize>()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|k| -k).collect())
    }
}

impl fmt::Display for FourierIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// `#{k ∈ Z^d : 1 + Σ|k_j| = level}` by exact counting.
pub fn circular_block_size(d: usize, level: usize) -> usize {
    assert!(d >= 1 && level >= 1);
    let r = level - 1;
    // counts[t] = number of k in Z^j with Σ|k| = t, built up one coordinate at a time
    let one_dim = |t: usize| if t == 0 { 1usize } else { 2 };
    let mut counts: Vec<usize> = (0..=r).map(one_dim).collect();
    for _ in 1..d {
        counts = (0..=r).map(|t| (0..=t).map(|u| one_dim(u) * counts[t - u]).sum()).collect();
    }
    counts[r]
}

/// All `k ∈ Z^d` in block `level`, lexicographically sorted.
pub fn level_indices(d: usize, level: usize) -> Vec<Vec<i64>> {
    fn fill(d: usize, remaining: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() + 1 == d {
            prefix.push(-remaining);
            out.push(prefix.clone());
            prefix.pop();
            if remaining != 0 {
                prefix.push(remaining);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for k in -remaining..=remaining {
            prefix.push(k);
            fill(d, remaining - k.abs(), prefix, out);
            prefix.pop();
        }
    }
    assert!(d >= 1 && level >= 1);
    let mut out = Vec::new();
    fill(d, (level - 1) as i64, &mut Vec::with_capacity(d), &mut out);
    out.sort();
    out
}

/// Index lists for levels `1..=l_max`.
pub fn index_blocks(d: usize, l_max: usize) -> Vec<Vec<FourierIndex>> {
    (1..=l_max).map(|level| level_indices(d, level).into_iter().map(FourierIndex).collect()).collect()
}

/// Coefficients on `T^d` together with the index of every entry.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusCoeffs<T> {
    coeffs: BlockCoefficients<T>,
    indices: Vec<Vec<FourierIndex>>,
    real: bool,
}

impl<T: Real> TorusCoeffs<T> {
    /// Wraps circular block coefficients. With `real = true` the conjugate
    /// symmetry `c_{-k} = conj(c_k)` is checked to `1e-10`.
    pub fn new(coeffs: BlockCoefficients<T>, real: bool) -> Result<Self> {
        let d = match coeffs.structure().kind() {
            crate::model::StructureKind::Circular { d } => *d,
            other => return Err(Error::Shape(format!("torus coefficients need a circular structure, got {other:?}"))),
        };
        let indices = index_blocks(d, coeffs.levels());
        if real {
            let residue = coeffs.real_residue()?;
            let tol = T::lit(1e-10) * coeffs.norm().max(T::one());
            if residue > tol {
                return Err(Error::Symmetry { residue: residue.as_f64(), tolerance: tol.as_f64() });
            }
        }
        Ok(Self { coeffs, indices, real })
    }

    /// Builds coefficients from a function of the index.
    pub fn from_fn(
        d: usize,
        l_max: usize,
        real: bool,
        mut value: impl FnMut(&FourierIndex) -> Complex<T>,
    ) -> Result<Self> {
        let structure = BlockStructure::circular(d, l_max)?;
        let indices = index_blocks(d, l_max);
        let blocks = indices.iter().map(|b| b.iter().map(&mut value).collect()).collect();
        Self::new(BlockCoefficients::new(structure, blocks)?, real)
    }

    pub fn coeffs(&self) -> &BlockCoefficients<T> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> BlockCoefficients<T> {
        self.coeffs
    }

    pub fn indices(&self) -> &[Vec<FourierIndex>] {
        &self.indices
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn dim(&self) -> usize {
        self.indices[0][0].dim()
    }

    /// Coefficient at `k`, zero outside the stored levels.
    pub fn coefficient(&self, k: &FourierIndex) -> Complex<T> {
        let level = k.level();
        if k.dim() != self.dim() || level > self.coeffs.levels() {
            return re(T::zero());
        }
        match self.indices[level - 1].binary_search(k) {
            Ok(pos) => self.coeffs.block(level)[pos],
            Err(_) => re(T::zero()),
        }
    }
}

/// `c_k = (1 ∨ |k|)^{-exponent}` for `|k| ≤ k_max` on the circle.
pub fn power_law_signal<T: Real>(exponent: T, k_max: usize) -> Result<TorusCoeffs<T>> {
    if !(exponent > T::zero()) || !exponent.is_finite() {
        return Err(Error::Config("power-law exponent must be positive".into()));
    }
    TorusCoeffs::from_fn(1, k_max + 1, true, |k| re(power_law_weight(k.0[0], exponent)))
}

/// Diagonal operator with entry `(1 ∨ |k|)^{-nu}` at index `k`, `|k| ≤ k_max`.
pub fn power_law_operator<T: Real>(nu: T, k_max: usize) -> Result<BlockOperator<T>> {
    if !(nu >= T::zero()) || !nu.is_finite() {
        return Err(Error::Config("nu must be >= 0".into()));
    }
    let structure = BlockStructure::circular(1, k_max + 1)?;
    let blocks = index_blocks(1, k_max + 1)
        .iter()
        .map(|b| {
            let diag: Vec<_> = b.iter().map(|k| re(power_law_weight(k.0[0], nu))).collect();
            DenseMatrix::from_diag(&diag)
        })
        .collect();
    BlockOperator::new(structure, blocks)
}

fn power_law_weight<T: Real>(k: i64, p: T) -> T {
    let base = T::from_u64(k.unsigned_abs().max(1)).expect("index fits scalar");
    base.powf(-p)
}

/// Values `f(j / grid_size)`, `j = 0..grid_size`, by direct summation.
pub fn synthesize_1d<T: Real>(f: &TorusCoeffs<T>, grid_size: usize) -> Result<Vec<T>> {
    if f.dim() != 1 {
        return Err(Error::Shape("synthesis is implemented for d = 1 only".into()));
    }
    if !f.is_real() {
        return Err(Error::Domain("synthesis expects real-flagged coefficients".into()));
    }
    if grid_size == 0 {
        return Err(Error::Config("grid_size must be positive".into()));
    }
    let two_pi = T::PI() + T::PI();
    let n = T::from_usize_lossy(grid_size);
    let terms: Vec<(i64, Complex<T>)> = f
        .indices()
        .iter()
        .flatten()
        .map(|k| (k.0[0], f.coefficient(k)))
        .filter(|(_, c)| c.norm_sqr() > T::zero())
        .collect();
    let scale = terms.iter().map(|(_, c)| c.norm()).sum::<T>().max(T::one());
    let tol = T::lit(SYNTH_IMAG_TOL) * scale;
    let mut out = Vec::with_capacity(grid_size);
    for j in 0..grid_size {
        let mut acc = re(T::zero());
        for &(k, c) in &terms {
            // reduce k·j mod N before scaling to keep the phase argument small
            let kj = (k as i128 * j as i128).rem_euclid(grid_size as i128) as usize;
            let phase = two_pi * T::from_usize_lossy(kj) / n;
            acc = acc + c * Complex::new(phase.cos(), phase.sin());
        }
        if acc.im.abs() > tol {
            return Err(Error::Symmetry { residue: acc.im.abs().as_f64(), tolerance: tol.as_f64() });
        }
        out.push(acc.re);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_examples() {
        assert_eq!(level_indices(1, 1), vec![vec![0]]);
        assert_eq!(level_indices(1, 3), vec![vec![-2], vec![2]]);
        assert_eq!(level_indices(2, 2), vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
        for d in 1..=3 {
            for level in 1..=12 {
                assert_eq!(level_indices(d, level).len(), circular_block_size(d, level));
            }
        }
    }

    #[test]
    fn index_level_roundtrip() {
        for block in index_blocks(3, 6).iter() {
            let level = block[0].level();
            assert!(block.iter().all(|k| k.level() == level));
            assert!(block.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn power_law_signal_values() {
        let f = power_law_signal(5.0f64, 1000).unwrap();
        assert_eq!(f.coefficient(&FourierIndex(vec![2])).re, 0.03125);
        assert_eq!(f.coefficient(&FourierIndex(vec![-2])).re, 0.03125);
        assert_eq!(f.coefficient(&FourierIndex(vec![0])).re, 1.0);
        assert_eq!(f.coefficient(&FourierIndex(vec![1001])).re, 0.0);
        assert!(power_law_signal(0.0f64, 3).is_err());
    }

    #[test]
    fn power_law_sobolev_norm_matches_partial_sum() {
        let f = power_law_signal(5.0f64, 1000).unwrap();
        // oracle: pairwise-compensated direct sum over k with weights (1+|k|)^{2s}
        let s = 4.0;
        let mut terms: Vec<f64> = Vec::new();
        for k in -1000i64..=1000 {
            let a = (k.unsigned_abs().max(1) as f64).powi(-5);
            terms.push((1.0 + k.unsigned_abs() as f64).powf(2.0 * s) * a * a);
        }
        terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let oracle = terms.iter().sum::<f64>().sqrt();
        assert_relative_eq!(f.coeffs().sobolev_norm(s), oracle, max_relative = 1e-12);
    }

    #[test]
    fn sobolev_membership_boundary() {
        // s = 4 converges, s = 5 keeps growing like log k_max
        let norm = |s: f64, kmax: usize| power_law_signal(5.0f64, kmax).unwrap().coeffs().sobolev_norm(s);
        // tail Σ_{|k|>K} (1+|k|)^8 |k|^{-10} ≤ 2.2/K
        let a4 = norm(4.0, 100).powi(2);
        let b4 = norm(4.0, 1000).powi(2);
        let c4 = norm(4.0, 10000).powi(2);
        assert!(b4 - a4 < 2.2 / 100.0 && c4 - b4 < 2.2 / 1000.0);
        let a5 = norm(5.0, 100).powi(2);
        let b5 = norm(5.0, 1000).powi(2);
        let c5 = norm(5.0, 10000).powi(2);
        assert!(b5 - a5 > 4.0 && c5 - b5 > 4.0);
    }

    #[test]
    fn power_law_operator_values() {
        let id = power_law_operator(0.0f64, 5).unwrap();
        assert_eq!(id, BlockOperator::identity(BlockStructure::circular(1, 6).unwrap()));
        let k = power_law_operator(2.0f64, 5).unwrap();
        assert_relative_eq!(k.block(4).get(0, 0).re, 1.0 / 9.0, max_relative = 1e-15);
        for b in k.blocks() {
            assert!(b.is_diagonal());
        }
    }

    #[test]
    fn power_law_operator_constants_bounded_by_scan() {
        let nu = 3.0f64;
        let k = power_law_operator(nu, 200).unwrap();
        let (q1, q2) = k.operator_constants(nu).unwrap();
        // scan of ℓ^{∓ν}(1∨|k|)^{±ν} with ℓ = 1 + |k|
        let mut e1 = 0f64;
        let mut e2 = 0f64;
        for kk in 0..=200u32 {
            let l = f64::from(kk + 1);
            let w = f64::from(kk.max(1));
            e1 = e1.max(l.powf(-nu) * w.powf(nu));
            e2 = e2.max(l.powf(nu) * w.powf(-nu));
        }
        assert_relative_eq!(q1, e1, max_relative = 1e-12);
        assert_relative_eq!(q2, e2, max_relative = 1e-12);
        assert!(q1 <= 1.0 && q2 <= 2f64.powf(nu));
    }

    #[test]
    fn convolution_is_entrywise_product() {
        let f = power_law_signal(2.0f64, 50).unwrap();
        let k = power_law_operator(1.5f64, 50).unwrap();
        let out = k.apply(f.coeffs()).unwrap();
        for (level, block) in f.indices().iter().enumerate() {
            for (pos, idx) in block.iter().enumerate() {
                let w = (idx.0[0].unsigned_abs().max(1) as f64).powf(-1.5);
                let expected = f.coefficient(idx) * w;
                assert_eq!(out.block(level + 1)[pos], expected);
            }
        }
    }

    #[test]
    fn synthesis_examples() {
        let constant = TorusCoeffs::from_fn(1, 3, true, |k| re(if k.0[0] == 0 { 1.0f64 } else { 0.0 })).unwrap();
        assert!(synthesize_1d(&constant, 16).unwrap().iter().all(|&v| (v - 1.0).abs() < 1e-15));

        let cosine = TorusCoeffs::from_fn(1, 3, true, |k| re(if k.0[0].abs() == 1 { 0.5f64 } else { 0.0 })).unwrap();
        let vals = synthesize_1d(&cosine, 32).unwrap();
        for (j, v) in vals.iter().enumerate() {
            let x = j as f64 / 32.0;
            assert!((v - (2.0 * std::f64::consts::PI * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn synthesis_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let kmax = 20i64;
        let pos: Vec<Complex<f64>> = (0..=kmax)
            .map(|k| {
                if k == 0 {
                    Complex::new(rng.random::<f64>(), 0.0)
                } else {
                    Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                }
            })
            .collect();
        let f = TorusCoeffs::from_fn(1, kmax as usize + 1, true, |k| {
            let c = pos[k.0[0].unsigned_abs() as usize];
            if k.0[0] < 0 {
                c.conj()
            } else {
                c
            }
        })
        .unwrap();
        let n = 50;
        let vals = synthesize_1d(&f, n).unwrap();
        for (j, v) in vals.iter().enumerate() {
            // real form: c0 + 2 Σ_{k>0} (Re c_k cos 2πkx − Im c_k sin 2πkx)
            let x = j as f64 / n as f64;
            let mut acc = pos[0].re;
            for k in 1..=kmax {
                let t = 2.0 * std::f64::consts::PI * k as f64 * x;
                let c = pos[k as usize];
                acc += 2.0 * (c.re * t.cos() - c.im * t.sin());
            }
            assert!((v - acc).abs() < 1e-10);
        }
    }

    #[test]
    fn synthesis_rejects_asymmetric() {
        let s = BlockStructure::circular(1, 2).unwrap();
        let bad = BlockCoefficients::new(s, vec![vec![re(0.0f64)], vec![re(0.0), Complex::new(0.5, 0.0)]]).unwrap();
        assert!(matches!(TorusCoeffs::new(bad.clone(), true), Err(Error::Symmetry { .. })));
        let unflagged = TorusCoeffs::new(bad, false).unwrap();
        assert!(synthesize_1d(&unflagged, 8).is_err());
    }
}
