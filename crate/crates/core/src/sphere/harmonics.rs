use num_complex::Complex;

use super::legendre::{normalized_legendre_table, tri_index};
use super::SpherePoint;
use crate::error::{Error, Result};
use crate::model::{BlockCoefficients, BlockStructure, StructureKind};
use crate::quadrature::gauss_legendre;
use crate::scalar::{cz, re, Real};

/// Tolerance on the imaginary residue of synthesised real functions,
/// relative to `max(1, Σ|c|)`.
pub const SPHERE_SYNTH_IMAG_TOL: f64 = 1e-8;

/// Spherical-harmonic coefficients (block level `l + 1` holds degree `l`).
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalCoeffs<T> {
    coeffs: BlockCoefficients<T>,
    real: bool,
}

impl<T: Real> SphericalCoeffs<T> {
    /// With `real = true` the symmetry `c_{l,-m} = (-1)^m conj(c_{l,m})` is
    /// checked to `1e-10` relative to `max(1, ‖c‖)`.
    pub fn new(coeffs: BlockCoefficients<T>, real: bool) -> Result<Self> {
        if *coeffs.structure().kind() != StructureKind::Spherical {
            return Err(Error::Shape("spherical coefficients need a spherical structure".into()));
        }
        if real {
            let residue = coeffs.real_residue()?;
            let tol = T::lit(1e-10) * coeffs.norm().max(T::one());
            if residue > tol {
                return Err(Error::Symmetry { residue: residue.as_f64(), tolerance: tol.as_f64() });
            }
        }
        Ok(Self { coeffs, real })
    }

    pub fn zeros(l_max: usize) -> Self {
        Self { coeffs: BlockCoefficients::zeros(BlockStructure::spherical_degrees(l_max)), real: true }
    }

    /// From a flat vector indexed by `l² + l + m`.
    pub fn from_flat(l_max: usize, flat: &[Complex<T>], real: bool) -> Result<Self> {
        if flat.len() != (l_max + 1) * (l_max + 1) {
            return Err(Error::Shape(format!("{} values for degree {l_max}", flat.len())));
        }
        let blocks = (0..=l_max).map(|l| flat[l * l..(l + 1) * (l + 1)].to_vec()).collect();
        Self::new(BlockCoefficients::new(BlockStructure::spherical_degrees(l_max), blocks)?, real)
    }

    pub fn coeffs(&self) -> &BlockCoefficients<T> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> BlockCoefficients<T> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn l_max(&self) -> usize {
        self.coeffs.levels() - 1
    }

    /// Coefficient of `Y_l^m`; zero above the stored degree.
    pub fn get(&self, l: usize, m: i64) -> Complex<T> {
        if l > self.l_max() || m.unsigned_abs() as usize > l {
            return cz();
        }
        self.coeffs.block(l + 1)[(m + l as i64) as usize]
    }

    pub fn norm(&self) -> T {
        self.coeffs.norm()
    }
}

/// `Y_l^m` at `p`, normalised for the uniform probability measure.
pub fn spherical_harmonic<T: Real>(l: usize, m: i64, p: &SpherePoint<T>) -> Result<Complex<T>> {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Err(Error::Domain(format!("|m| = {am} exceeds l = {l}")));
    }
    let table = normalized_legendre_table(l, p.theta.cos());
    Ok(harmonic_from_table(&table, l, m, p.phi))
}

fn harmonic_from_table<T: Real>(table: &[T], l: usize, m: i64, phi: T) -> Complex<T> {
    let am = m.unsigned_abs() as usize;
    let (s, c) = (T::from_u64(am as u64).expect("order") * phi).sin_cos();
    let y = Complex::new(c, s) * table[tri_index(l, am)];
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

/// All `Y_l^m(p)` for `l <= l_max`, flat at `l² + l + m`.
pub fn harmonics_at<T: Real>(l_max: usize, p: &SpherePoint<T>) -> Vec<Complex<T>> {
    let table = normalized_legendre_table(l_max, p.theta.cos());
    let mut out = vec![cz(); (l_max + 1) * (l_max + 1)];
    // e^{imφ} by repeated multiplication
    let (s, c) = p.phi.sin_cos();
    let step = Complex::new(c, s);
    let mut phases = vec![re(T::one()); l_max + 1];
    for m in 1..=l_max {
        phases[m] = phases[m - 1] * step;
    }
    for l in 0..=l_max {
        let base = l * l + l;
        for m in 0..=l {
            let y = phases[m] * table[tri_index(l, m)];
            out[base + m] = y;
            if m > 0 {
                out[base - m] = if m % 2 == 0 { y.conj() } else { -y.conj() };
            }
        }
    }
    out
}

/// Pointwise values `Σ c_{l,m} Y_l^m(ω)` of a real-flagged expansion.
pub fn synthesize<T: Real>(f: &SphericalCoeffs<T>, grid: &[SpherePoint<T>]) -> Result<Vec<T>> {
    if !f.is_real() {
        return Err(Error::Domain("synthesis expects real-flagged coefficients".into()));
    }
    let l_max = f.l_max();
    let flat = f.coeffs().flatten();
    let scale = flat.iter().map(|z| z.norm()).sum::<T>().max(T::one());
    let tol = T::lit(SPHERE_SYNTH_IMAG_TOL) * scale;
    grid.iter()
        .map(|p| {
            let y = harmonics_at(l_max, p);
            let v = flat.iter().zip(&y).fold(cz::<T>(), |acc, (&c, &y)| acc + c * y);
            if v.im.abs() > tol {
                Err(Error::Symmetry { residue: v.im.abs().as_f64(), tolerance: tol.as_f64() })
            } else {
                Ok(v.re)
            }
        })
        .collect()
}

/// Product rule on the sphere: Gauss–Legendre in `cos θ` and the trapezoid
/// rule in `φ`. Weights sum to one (probability measure).
#[derive(Debug, Clone)]
pub struct SphereQuadrature<T> {
    n_theta: usize,
    n_phi: usize,
    thetas: Vec<T>,
    theta_weights: Vec<T>,
    phis: Vec<T>,
}

impl<T: Real> SphereQuadrature<T> {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        assert!(n_theta >= 1 && n_phi >= 1);
        let (x, w) = gauss_legendre::<T>(n_theta);
        // descending cos θ gives ascending θ
        let thetas = x.iter().rev().map(|&c| c.acos()).collect();
        let theta_weights = w.iter().rev().map(|&w| w / T::lit(2.0)).collect();
        let two_pi = T::PI() + T::PI();
        let phis = (0..n_phi).map(|j| two_pi * T::from_usize_lossy(j) / T::from_usize_lossy(n_phi)).collect();
        Self { n_theta, n_phi, thetas, theta_weights, phis }
    }

    /// Exact for products of two expansions of degree at most `l_max`.
    pub fn for_degree(l_max: usize) -> Self {
        Self::new(l_max + 2, 2 * l_max + 2)
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(point, weight)` pairs, rings of constant θ in order.
    pub fn nodes(&self) -> impl Iterator<Item = (SpherePoint<T>, T)> + '_ {
        let wphi = T::one() / T::from_usize_lossy(self.n_phi);
        self.thetas
            .iter()
            .zip(&self.theta_weights)
            .flat_map(move |(&theta, &wt)| self.phis.iter().map(move |&phi| (SpherePoint { theta, phi }, wt * wphi)))
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, mut f: impl FnMut(&SpherePoint<T>) -> T) -> T {
        self.nodes().map(|(p, w)| w * f(&p)).sum()
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn phis(&self) -> &[T] {
        &self.phis
    }
}

/// Coefficients `∫ f conj(Y_l^m) dμ`, `l <= l_max`, by quadrature.
///
/// Each θ ring is first reduced to its azimuthal Fourier sums, so the cost is
/// `O(n_theta · (n_phi + l_max) · l_max)`.
pub fn analyze<T: Real>(
    f: impl Fn(&SpherePoint<T>) -> T,
    l_max: usize,
    quad: &SphereQuadrature<T>,
) -> Result<SphericalCoeffs<T>> {
    let size = (l_max + 1) * (l_max + 1);
    let mut flat = vec![cz::<T>(); size];
    let n_phi = T::from_usize_lossy(quad.n_phi);
    for (&theta, &wt) in quad.thetas.iter().zip(&quad.theta_weights) {
        let values: Vec<T> = quad.phis.iter().map(|&phi| f(&SpherePoint { theta, phi })).collect();
        // F_m = (1/n_phi) Σ_j f_j e^{-imφ_j}, m >= 0; F_{-m} = conj(F_m) for real f
        let fourier: Vec<Complex<T>> = (0..=l_max)
            .map(|m| {
                let mf = T::from_usize_lossy(m);
                quad.phis.iter().zip(&values).fold(cz::<T>(), |acc, (&phi, &v)| {
                    let (s, c) = (mf * phi).sin_cos();
                    acc + Complex::new(c, -s) * v
                }) / n_phi
            })
            .collect();
        let table = normalized_legendre_table(l_max, theta.cos());
        for l in 0..=l_max {
            let base = l * l + l;
            for m in 0..=l {
                let p = table[tri_index(l, m)] * wt;
                flat[base + m] = flat[base + m] + fourier[m] * p;
                if m > 0 {
                    let sign = if m % 2 == 0 { p } else { -p };
                    flat[base - m] = flat[base - m] + fourier[m].conj() * sign;
                }
            }
        }
    }
    SphericalCoeffs::from_flat(l_max, &flat, true)
}
