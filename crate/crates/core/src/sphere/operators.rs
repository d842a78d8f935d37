use num_complex::Complex;

use super::harmonics::SphericalCoeffs;
use super::wigner::little_d_table;
use super::RotationZYZ;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::{BlockOperator, BlockStructure, StructureKind};
use crate::quadrature::gauss_legendre;
use crate::scalar::{cz, Real};

/// Convolution operator on the sphere in block form: the degree-`l` block is
/// the matrix `F(g)^l_{mn}`, `m, n = -l..=l`.
#[derive(Debug, Clone, PartialEq)]
pub struct So3BlockOperator<T>(BlockOperator<T>);

impl<T: Real> So3BlockOperator<T> {
    pub fn new(op: BlockOperator<T>) -> Result<Self> {
        if *op.structure().kind() != StructureKind::Spherical {
            return Err(Error::Shape("SO(3) operator needs a spherical structure".into()));
        }
        Ok(Self(op))
    }

    pub fn l_max(&self) -> usize {
        self.0.levels() - 1
    }

    pub fn as_block_operator(&self) -> &BlockOperator<T> {
        &self.0
    }

    pub fn into_block_operator(self) -> BlockOperator<T> {
        self.0
    }

    /// Degree-`l` block.
    pub fn degree_block(&self, l: usize) -> &DenseMatrix<T> {
        self.0.block(l + 1)
    }
}

/// Blocks `(1 + l(l+1))^{-ν/2} I`.
pub fn ordinary_smooth_operator<T: Real>(l_max: usize, nu: T) -> Result<So3BlockOperator<T>> {
    if !(nu >= T::zero()) {
        return Err(Error::Config(format!("ν = {nu} must be nonnegative")));
    }
    let structure = BlockStructure::spherical_degrees(l_max);
    let half = nu / T::lit(2.0);
    So3BlockOperator::new(BlockOperator::from_level_scalars(structure, |level| {
        let l = T::from_usize_lossy(level - 1);
        (T::one() + l * (l + T::one())).powf(-half)
    }))
}

/// Density of the Laplace law on `SO(3)`: blocks `(1 + l(l+1))^{-1} I`.
pub fn laplace_operator<T: Real>(l_max: usize) -> So3BlockOperator<T> {
    let structure = BlockStructure::spherical_degrees(l_max);
    So3BlockOperator(BlockOperator::from_level_scalars(structure, |level| {
        let l = T::from_usize_lossy(level - 1);
        (T::one() + l * (l + T::one())).recip()
    }))
}

/// Coefficients of `g ⋆ f (ω) = ∫ g(r) f(r⁻¹ω) dr`, blockwise `F(g)^l c^l`.
///
/// The result is flagged real when `f` is and the product keeps the
/// conjugation symmetry (true whenever `g` is real).
pub fn convolve_blocks<T: Real>(g: &So3BlockOperator<T>, f: &SphericalCoeffs<T>) -> Result<SphericalCoeffs<T>> {
    let out = g.0.apply(f.coeffs())?;
    if f.is_real() {
        if let Ok(real) = SphericalCoeffs::new(out.clone(), true) {
            return Ok(real);
        }
    }
    SphericalCoeffs::new(out, false)
}

/// Product rule on `SO(3)` for the Haar probability measure: Gauss–Legendre in
/// `cos θ`, trapezoid in `φ` and `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct So3Quadrature {
    pub n_theta: usize,
    pub n_angle: usize,
}

impl So3Quadrature {
    pub fn new(n_theta: usize, n_angle: usize) -> Self {
        assert!(n_theta >= 1 && n_angle >= 1);
        Self { n_theta, n_angle }
    }

    /// Exact for band-limited `g` of degree at most `l_max`.
    pub fn for_degree(l_max: usize) -> Self {
        Self::new(l_max + 2, 2 * l_max + 2)
    }

    /// `(rotation, weight)` pairs; weights sum to one.
    pub fn nodes<T: Real>(&self) -> Vec<(RotationZYZ<T>, T)> {
        let (x, w) = gauss_legendre::<T>(self.n_theta);
        let na = T::from_usize_lossy(self.n_angle);
        let two_pi = T::PI() + T::PI();
        let angles: Vec<T> = (0..self.n_angle).map(|j| two_pi * T::from_usize_lossy(j) / na).collect();
        let mut out = Vec::with_capacity(self.n_theta * self.n_angle * self.n_angle);
        for (&c, &wt) in x.iter().zip(&w).rev() {
            let theta = c.acos();
            let wt = wt / (T::lit(2.0) * na * na);
            for &phi in &angles {
                for &psi in &angles {
                    out.push((RotationZYZ { phi, theta, psi }, wt));
                }
            }
        }
        out
    }
}

/// `F(g)^l_{mn} = ∫ g(r) D^l_{mn}(r) dr` for `l <= l_max`.
///
/// Per θ node the `(φ, ψ)` grid is reduced to its 2D Fourier sums first.
pub fn so3_transform<T: Real>(
    g: impl Fn(&RotationZYZ<T>) -> Complex<T>,
    l_max: usize,
    quad: &So3Quadrature,
) -> Result<So3BlockOperator<T>> {
    let na = quad.n_angle;
    let naf = T::from_usize_lossy(na);
    let two_pi = T::PI() + T::PI();
    let angles: Vec<T> = (0..na).map(|j| two_pi * T::from_usize_lossy(j) / naf).collect();
    let lm = l_max as i64;
    let width = 2 * l_max + 1;
    // e^{-imα_j} for m = -l_max..=l_max
    let phases: Vec<Vec<Complex<T>>> = (-lm..=lm)
        .map(|m| {
            angles
                .iter()
                .map(|&a| {
                    let (s, c) = (T::from_i64(m).expect("order") * a).sin_cos();
                    Complex::new(c, -s)
                })
                .collect()
        })
        .collect();
    let mut blocks: Vec<Vec<Complex<T>>> = (0..=l_max).map(|l| vec![cz(); (2 * l + 1) * (2 * l + 1)]).collect();
    let (x, w) = gauss_legendre::<T>(quad.n_theta);
    let mut grid = vec![cz::<T>(); na * na];
    let mut half = vec![cz::<T>(); width * na];
    for (&c, &wt) in x.iter().zip(&w) {
        let theta = c.acos();
        for (j, &phi) in angles.iter().enumerate() {
            for (k, &psi) in angles.iter().enumerate() {
                let v = g(&RotationZYZ { phi, theta, psi });
                if !crate::scalar::is_finite_c(&v) {
                    return Err(Error::NonFinite("SO(3) integrand"));
                }
                grid[j * na + k] = v;
            }
        }
        // sum over ψ: half[n][j] = Σ_k g_{jk} e^{-inψ_k}
        for n in 0..width {
            for j in 0..na {
                half[n * na + j] = (0..na).fold(cz(), |acc, k| acc + grid[j * na + k] * phases[n][k]);
            }
        }
        let d = little_d_table(l_max, theta);
        let scale = wt / (T::lit(2.0) * naf * naf);
        for m in 0..width {
            for n in 0..width {
                let s = (0..na).fold(cz::<T>(), |acc, j| acc + half[n * na + j] * phases[m][j]) * scale;
                let (mi, ni) = (m as i64 - lm, n as i64 - lm);
                let l0 = mi.unsigned_abs().max(ni.unsigned_abs()) as usize;
                for l in l0..=l_max {
                    let side = 2 * l + 1;
                    let row = (mi + l as i64) as usize;
                    let col = (ni + l as i64) as usize;
                    blocks[l][row * side + col] = blocks[l][row * side + col] + s * d[l][row * side + col];
                }
            }
        }
    }
    let mats =
        blocks.into_iter().enumerate().map(|(l, e)| DenseMatrix::new(2 * l + 1, e)).collect::<Result<Vec<_>>>()?;
    So3BlockOperator::new(BlockOperator::new(BlockStructure::spherical_degrees(l_max), mats)?)
}
