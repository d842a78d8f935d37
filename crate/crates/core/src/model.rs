//! Block index structure, coefficient and operator containers, Sobolev norms
//! and the spectral constants of an operator.
//!
//! Blocks are indexed by `level = 1, 2, 3, …` everywhere. For the sphere the
//! block at `level` holds spherical degree `level - 1`, so block sizes are
//! `1, 3, 5, …`. Internally blocks live in 0-based vectors; every public
//! accessor takes the 1-based level.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{cz, is_finite_c, re, Real};
use crate::torus;

/// How the index set is partitioned into blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    /// Fourier indices `k ∈ Z^d`, block `1 + Σ|k_j|`.
    Circular { d: usize },
    /// Spherical harmonics, block `l + 1` for degree `l`.
    Spherical,
    /// Arbitrary block sizes.
    Custom { sizes: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockStructure {
    kind: StructureKind,
    max_level: usize,
}

impl BlockStructure {
    pub fn circular(d: usize, max_level: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("circular dimension d must be >= 1".into()));
        }
        Self::checked(StructureKind::Circular { d }, max_level)
    }

    pub fn spherical(max_level: usize) -> Result<Self> {
        Self::checked(StructureKind::Spherical, max_level)
    }

    /// Spherical structure holding degrees `0..=l_max`.
    pub fn spherical_degrees(l_max: usize) -> Self {
        Self { kind: StructureKind::Spherical, max_level: l_max + 1 }
    }

    pub fn custom(sizes: Vec<usize>) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::Config("custom block sizes must be positive".into()));
        }
        let max_level = sizes.len();
        Self::checked(StructureKind::Custom { sizes }, max_level)
    }

    fn checked(kind: StructureKind, max_level: usize) -> Result<Self> {
        if max_level == 0 {
            return Err(Error::Config("max_level must be >= 1".into()));
        }
        Ok(Self { kind, max_level })
    }

    pub fn kind(&self) -> &StructureKind {
        &self.kind
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Same partition, restricted (or extended) to `max_level` levels.
    /// Custom structures cannot be extended past their size list.
    pub fn with_max_level(&self, max_level: usize) -> Result<Self> {
        match &self.kind {
            StructureKind::Custom { sizes } => {
                if max_level > sizes.len() {
                    return Err(Error::Config(format!("custom structure has only {} levels", sizes.len())));
                }
                Self::custom(sizes[..max_level].to_vec())
            }
            kind => Self::checked(kind.clone(), max_level),
        }
    }

    /// `|Λ_level|`.
    pub fn block_size(&self, level: usize) -> Result<usize> {
        if level == 0 || level > self.max_level {
            return Err(Error::LevelOutOfRange { level, max: self.max_level });
        }
        Ok(match &self.kind {
            StructureKind::Circular { d } => torus::circular_block_size(*d, level),
            StructureKind::Spherical => 2 * level - 1,
            StructureKind::Custom { sizes } => sizes[level - 1],
        })
    }

    pub fn sizes(&self) -> Vec<usize> {
        (1..=self.max_level).map(|l| self.block_size(l).expect("level in range")).collect()
    }

    /// Dimension parameter `d` of the growth `|Λ_ℓ| ~ ℓ^{d-1}` when it is known.
    pub fn dimension(&self) -> Option<f64> {
        match self.kind {
            StructureKind::Circular { d } => Some(d as f64),
            StructureKind::Spherical => Some(2.0),
            StructureKind::Custom { .. } => None,
        }
    }

    /// Same partition type, ignoring `max_level`.
    pub fn compatible(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (StructureKind::Custom { sizes: a }, StructureKind::Custom { sizes: b }) => {
                let n = a.len().min(b.len());
                a[..n] == b[..n]
            }
            (a, b) => a == b,
        }
    }

    /// Unitary map `U` from real coordinates to block coefficients such that
    /// real coordinate vectors are exactly the coefficient vectors of
    /// real-valued functions (cos/sin pairs on the torus, real spherical
    /// harmonics on the sphere). Custom structures use the identity.
    pub fn real_basis<T: Real>(&self, level: usize) -> Result<DenseMatrix<T>> {
        let size = self.block_size(level)?;
        let h = T::FRAC_1_SQRT_2();
        let mut u = DenseMatrix::zeros(size);
        match &self.kind {
            StructureKind::Custom { .. } => return Ok(DenseMatrix::identity(size)),
            StructureKind::Spherical => {
                let l = level - 1;
                u.set(l, l, re(T::one()));
                for m in 1..=l {
                    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
                    let (pos, neg) = (l + m, l - m);
                    u.set(pos, pos, re(h));
                    u.set(neg, pos, re(sign * h));
                    u.set(pos, neg, Complex::new(T::zero(), h));
                    u.set(neg, neg, Complex::new(T::zero(), -sign * h));
                }
            }
            StructureKind::Circular { d } => {
                let indices = torus::level_indices(*d, level);
                for (pos, k) in indices.iter().enumerate() {
                    let neg_k: Vec<i64> = k.iter().map(|x| -x).collect();
                    if *k == neg_k {
                        u.set(pos, pos, re(T::one()));
                        continue;
                    }
                    // handle each pair once, from its lexicographically larger member
                    if *k < neg_k {
                        continue;
                    }
                    let neg = indices.binary_search(&neg_k).expect("blocks are closed under k -> -k");
                    u.set(pos, pos, re(h));
                    u.set(neg, pos, re(h));
                    u.set(pos, neg, Complex::new(T::zero(), h));
                    u.set(neg, neg, Complex::new(T::zero(), -h));
                }
            }
        }
        Ok(u)
    }
}

/// Free-function form of [`BlockStructure::block_size`].
pub fn block_size(structure: &BlockStructure, level: usize) -> Result<usize> {
    structure.block_size(level)
}

/// A signal as per-block complex coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCoefficients<T> {
    structure: BlockStructure,
    blocks: Vec<Vec<Complex<T>>>,
}

impl<T: Real> BlockCoefficients<T> {
    pub fn new(structure: BlockStructure, blocks: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if blocks.len() != structure.max_level() {
            return Err(Error::Shape(format!(
                "{} blocks for a structure with {} levels",
                blocks.len(),
                structure.max_level()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            let expected = structure.block_size(i + 1)?;
            if b.len() != expected {
                return Err(Error::Shape(format!("level {} has {} coefficients, expected {expected}", i + 1, b.len())));
            }
            if !b.iter().all(is_finite_c) {
                return Err(Error::NonFinite("coefficients"));
            }
        }
        Ok(Self { structure, blocks })
    }

    pub fn zeros(structure: BlockStructure) -> Self {
        let blocks = structure.sizes().into_iter().map(|s| vec![cz(); s]).collect();
        Self { structure, blocks }
    }

    /// Builds coefficients level by level from `fill(level, size)`.
    pub fn from_fn(structure: BlockStructure, mut fill: impl FnMut(usize, usize) -> Vec<Complex<T>>) -> Result<Self> {
        let blocks = structure.sizes().into_iter().enumerate().map(|(i, s)| fill(i + 1, s)).collect();
        Self::new(structure, blocks)
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn levels(&self) -> usize {
        self.blocks.len()
    }

    /// Coefficients of block `level` (1-based).
    pub fn block(&self, level: usize) -> &[Complex<T>] {
        &self.blocks[level - 1]
    }

    pub fn blocks(&self) -> &[Vec<Complex<T>>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vec<Complex<T>>> {
        self.blocks
    }

    /// Squared Euclidean norm of each block.
    pub fn block_energies(&self) -> Vec<T> {
        self.blocks.iter().map(|b| b.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    pub fn norm(&self) -> T {
        self.block_energies().into_iter().sum::<T>().sqrt()
    }

    pub fn sobolev_norm(&self, s: T) -> T {
        sobolev_norm(self, s)
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: Complex<T>, other: &Self, beta: Complex<T>) -> Result<Self> {
        if self.structure != other.structure {
            return Err(Error::Shape("linear combination of different structures".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x * alpha + y * beta).collect())
            .collect();
        Ok(Self { structure: self.structure.clone(), blocks })
    }

    /// Same coefficients on `max_level` levels, zero-padding or truncating.
    pub fn resized(&self, max_level: usize) -> Result<Self> {
        let structure = self.structure.with_max_level(max_level)?;
        let mut out = Self::zeros(structure);
        for (dst, src) in out.blocks.iter_mut().zip(&self.blocks) {
            dst.copy_from_slice(src);
        }
        Ok(out)
    }

    /// Largest imaginary part of the coordinates in the real basis of the
    /// structure; zero (up to rounding) iff the coefficients describe a
    /// real-valued function.
    pub fn real_residue(&self) -> Result<T> {
        let mut worst = T::zero();
        for level in 1..=self.levels() {
            let u = self.structure.real_basis::<T>(level)?;
            let coords = u.adjoint().matvec(self.block(level))?;
            for z in coords {
                worst = worst.max(z.im.abs());
            }
        }
        Ok(worst)
    }

    /// Flattened view of all coefficients, level by level.
    pub fn flatten(&self) -> Vec<Complex<T>> {
        self.blocks.iter().flatten().copied().collect()
    }
}

/// `(Σ_ℓ ℓ^{2s} ‖f_ℓ‖²)^{1/2}` over the stored levels.
pub fn sobolev_norm<T: Real>(f: &BlockCoefficients<T>, s: T) -> T {
    f.block_energies()
        .into_iter()
        .enumerate()
        .map(|(i, e)| T::from_usize_lossy(i + 1).powf(s + s) * e)
        .sum::<T>()
        .sqrt()
}

/// An operator as per-block square matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator<T> {
    structure: BlockStructure,
    blocks: Vec<DenseMatrix<T>>,
}

impl<T: Real> BlockOperator<T> {
    pub fn new(structure: BlockStructure, blocks: Vec<DenseMatrix<T>>) -> Result<Self> {
        if blocks.len() != structure.max_level() {
            return Err(Error::Shape(format!(
                "{} operator blocks for a structure with {} levels",
                blocks.len(),
                structure.max_level()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            let expected = structure.block_size(i + 1)?;
            if b.side() != expected {
                return Err(Error::Shape(format!(
                    "operator block {} is {}x{}, expected side {expected}",
                    i + 1,
                    b.side(),
                    b.side()
                )));
            }
        }
        Ok(Self { structure, blocks })
    }

    pub fn identity(structure: BlockStructure) -> Self {
        Self::from_level_scalars(structure, |_| T::one())
    }

    /// Block `level` equals `value(level) · I`.
    pub fn from_level_scalars(structure: BlockStructure, mut value: impl FnMut(usize) -> T) -> Self {
        let blocks =
            structure.sizes().into_iter().enumerate().map(|(i, s)| DenseMatrix::scalar(s, value(i + 1))).collect();
        Self { structure, blocks }
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn levels(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, level: usize) -> &DenseMatrix<T> {
        &self.blocks[level - 1]
    }

    pub fn blocks(&self) -> &[DenseMatrix<T>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<DenseMatrix<T>> {
        self.blocks
    }

    pub fn apply(&self, f: &BlockCoefficients<T>) -> Result<BlockCoefficients<T>> {
        apply_operator(self, f)
    }

    /// `(c·K_ℓ)` for every block.
    pub fn scaled(&self, c: T) -> Self {
        Self { structure: self.structure.clone(), blocks: self.blocks.iter().map(|b| b.scale(re(c))).collect() }
    }

    pub fn operator_constants(&self, nu: T) -> Result<(T, T)> {
        operator_constants(self, nu)
    }
}

/// Block-wise matrix-vector product `(K f)_ℓ = K_ℓ f_ℓ`.
pub fn apply_operator<T: Real>(k: &BlockOperator<T>, f: &BlockCoefficients<T>) -> Result<BlockCoefficients<T>> {
    if !k.structure.compatible(&f.structure) {
        return Err(Error::Shape(format!(
            "operator structure {:?} does not match signal structure {:?}",
            k.structure.kind(),
            f.structure.kind()
        )));
    }
    if k.levels() < f.levels() {
        return Err(Error::Shape(format!("operator has {} levels, signal has {}", k.levels(), f.levels())));
    }
    let blocks = f.blocks.iter().zip(&k.blocks).map(|(v, m)| m.matvec(v)).collect::<Result<Vec<_>>>()?;
    BlockCoefficients::new(f.structure.clone(), blocks)
}

/// `(Q1, Q2)` with `Q1 = max_ℓ ℓ^{-ν}‖K_ℓ⁻¹‖` and `Q2 = max_ℓ ℓ^{ν}‖K_ℓ‖`.
///
/// The supremum runs over the stored levels only, so this is a truncated
/// estimate of the constants of the infinite operator.
pub fn operator_constants<T: Real>(k: &BlockOperator<T>, nu: T) -> Result<(T, T)> {
    let mut q1 = T::zero();
    let mut q2 = T::zero();
    for (i, block) in k.blocks.iter().enumerate() {
        let level = i + 1;
        let lv = T::from_usize_lossy(level);
        let inv = block.inverse_norm().map_err(|e| match e {
            Error::Singular { .. } => Error::Singular { level: Some(level) },
            other => other,
        })?;
        q1 = q1.max(lv.powf(-nu) * inv);
        q2 = q2.max(lv.powf(nu) * block.spectral_norm());
    }
    Ok((q1, q2))
}

/// Sobolev ball `W^s(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessClass<T> {
    pub s: T,
    pub radius: T,
}

impl<T: Real> SmoothnessClass<T> {
    pub fn new(s: T, radius: T) -> Result<Self> {
        if !(s >= T::zero()) || !(radius > T::zero()) {
            return Err(Error::Config("Sobolev class needs s >= 0 and M > 0".into()));
        }
        Ok(Self { s, radius })
    }

    pub fn contains(&self, f: &BlockCoefficients<T>) -> bool {
        sobolev_norm(f, self.s) <= self.radius
    }
}

/// Operator class `G^ν(Q)`: degree of ill-posedness with its mapping constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IllPosedness<T> {
    pub nu: T,
    pub q1: T,
    pub q2: T,
}

impl<T: Real> IllPosedness<T> {
    pub fn new(nu: T, q1: T, q2: T) -> Result<Self> {
        if !(nu >= T::zero()) || !(q1 > T::zero()) || !(q2 > T::zero()) || !(q1 * q2 >= T::one()) {
            return Err(Error::Config("ill-posedness needs nu >= 0, Q1, Q2 > 0, Q1*Q2 >= 1".into()));
        }
        Ok(Self { nu, q1, q2 })
    }

    /// Tightest class containing `k` at degree `nu`, over its stored levels.
    pub fn of_operator(k: &BlockOperator<T>, nu: T) -> Result<Self> {
        let (q1, q2) = operator_constants(k, nu)?;
        Self::new(nu, q1, q2)
    }

    pub fn contains(&self, k: &BlockOperator<T>) -> Result<bool> {
        let (q1, q2) = operator_constants(k, self.nu)?;
        Ok(q1 <= self.q1 && q2 <= self.q2)
    }
}
