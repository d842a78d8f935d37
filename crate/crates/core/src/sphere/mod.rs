//! Harmonic analysis on the sphere `S²` and the rotation group `SO(3)`.
//!
//! Conventions:
//! - points are `(θ, φ)` with colatitude `θ ∈ [0, π]`, longitude `φ ∈ [0, 2π)`;
//! - spherical harmonics are orthonormal for the uniform *probability*
//!   measure `μ` on the sphere, i.e. `√(4π)` times the surface-normalised
//!   functions, so `Y_0^0 = 1`. The Condon–Shortley phase is included;
//! - within the block of degree `l` (block level `l + 1`) entries are ordered
//!   `m = -l, …, l`;
//! - rotations use z-y-z Euler angles, `r = u(φ) a(θ) u(ψ)` with active
//!   rotations about the z and y axes, and
//!   `D^l_{mn}(φ, θ, ψ) = e^{-i(mφ + nψ)} d^l_{mn}(θ)`.
//!
//! With these choices `D^l(r₁ r₂) = D^l(r₁) D^l(r₂)`, and rotating a function,
//! `f ↦ f(r⁻¹ ·)`, multiplies its degree-`l` block by `D^l(r)`.

mod bump;
mod harmonics;
mod legendre;
mod operators;
mod wigner;

pub use bump::{gaussian_bump_coeffs, GaussianBump, BUMP_NORMALIZER};
pub use harmonics::{
    analyze, harmonics_at, spherical_harmonic, synthesize, SphereQuadrature, SphericalCoeffs, SPHERE_SYNTH_IMAG_TOL,
};
pub use legendre::{assoc_legendre, normalized_legendre_table};
pub use operators::{
    convolve_blocks, laplace_operator, ordinary_smooth_operator, so3_transform, So3BlockOperator, So3Quadrature,
};
pub use wigner::{little_d, rotate_coeffs, wigner_d, wigner_d_block};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point of `S²` in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> SpherePoint<T> {
    pub fn new(theta: T, phi: T) -> Result<Self> {
        let two_pi = T::PI() + T::PI();
        if !(theta >= T::zero() && theta <= T::PI()) || !(phi >= T::zero() && phi < two_pi) {
            return Err(Error::Domain(format!("point (θ={theta}, φ={phi}) outside [0,π]×[0,2π)")));
        }
        Ok(Self { theta, phi })
    }

    /// Spherical coordinates of a nonzero vector (normalised internally).
    pub fn from_cartesian(v: [T; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let z = (v[2] / r).max(-T::one()).min(T::one());
        let theta = z.acos();
        let mut phi = v[1].atan2(v[0]);
        if phi < T::zero() {
            phi = phi + T::PI() + T::PI();
        }
        if phi >= T::PI() + T::PI() {
            phi = T::zero();
        }
        Self { theta, phi }
    }

    /// `ω = (sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn to_cartesian(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn north_pole() -> Self {
        Self { theta: T::zero(), phi: T::zero() }
    }
}

/// A rotation in z-y-z Euler angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationZYZ<T> {
    pub phi: T,
    pub theta: T,
    pub psi: T,
}

pub type Mat3<T> = [[T; 3]; 3];

impl<T: Real> RotationZYZ<T> {
    pub fn new(phi: T, theta: T, psi: T) -> Result<Self> {
        let two_pi = T::PI() + T::PI();
        let ok = phi >= T::zero()
            && phi < two_pi
            && theta >= T::zero()
            && theta <= T::PI()
            && psi >= T::zero()
            && psi < two_pi;
        if !ok {
            return Err(Error::Domain(format!("Euler angles ({phi}, {theta}, {psi}) out of range")));
        }
        Ok(Self { phi, theta, psi })
    }

    pub fn identity() -> Self {
        Self { phi: T::zero(), theta: T::zero(), psi: T::zero() }
    }

    /// `u(φ) a(θ) u(ψ)`.
    pub fn matrix(&self) -> Mat3<T> {
        let (sf, cf) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.psi.sin_cos();
        [
            [cf * ct * cp - sf * sp, -cf * ct * sp - sf * cp, cf * st],
            [sf * ct * cp + cf * sp, -sf * ct * sp + cf * cp, sf * st],
            [-st * cp, st * sp, ct],
        ]
    }

    /// Euler angles of a rotation matrix. In the gimbal cases `θ ∈ {0, π}`
    /// the angle `ψ` is set to zero.
    pub fn from_matrix(m: &Mat3<T>) -> Self {
        let two_pi = T::PI() + T::PI();
        let wrap = |a: T| {
            let mut a = a % two_pi;
            if a < T::zero() {
                a = a + two_pi;
            }
            if a >= two_pi {
                a = T::zero();
            }
            a
        };
        let ct = m[2][2].max(-T::one()).min(T::one());
        let st = (m[0][2] * m[0][2] + m[1][2] * m[1][2]).sqrt();
        let theta = st.atan2(ct);
        if st > T::lit(64.0) * T::eps() {
            let phi = m[1][2].atan2(m[0][2]);
            let psi = m[2][1].atan2(-m[2][0]);
            Self { phi: wrap(phi), theta, psi: wrap(psi) }
        } else if ct > T::zero() {
            Self { phi: wrap(m[1][0].atan2(m[0][0])), theta: T::zero(), psi: T::zero() }
        } else {
            Self { phi: wrap((-m[0][1]).atan2(m[1][1])), theta: T::PI(), psi: T::zero() }
        }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix(&mat_mul(&self.matrix(), &other.matrix()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_matrix(&transpose(&self.matrix()))
    }

    pub fn apply(&self, p: &SpherePoint<T>) -> SpherePoint<T> {
        SpherePoint::from_cartesian(mat_vec(&self.matrix(), &p.to_cartesian()))
    }

    /// Rotation by `angle` about the unit vector `axis` (Rodrigues formula).
    pub fn from_axis_angle(axis: [T; 3], angle: T) -> Self {
        Self::from_matrix(&axis_angle_matrix(axis, angle))
    }

    /// A rotation taking the north pole to `p`.
    pub fn pole_to(p: &SpherePoint<T>) -> Self {
        Self { phi: p.phi, theta: p.theta, psi: T::zero() }
    }
}

pub fn axis_angle_matrix<T: Real>(axis: [T; 3], angle: T) -> Mat3<T> {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (s, c) = angle.sin_cos();
    let t = T::one() - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

pub fn mat_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_vec<T: Real>(a: &Mat3<T>, v: &[T; 3]) -> [T; 3] {
    [0, 1, 2].map(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

fn transpose<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_rotation(rng: &mut impl Rng) -> RotationZYZ<f64> {
        RotationZYZ::new(rng.random::<f64>() * 2.0 * PI, rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI)
            .unwrap()
    }

    #[test]
    fn euler_matrix_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let r = random_rotation(&mut rng);
            let back = RotationZYZ::from_matrix(&r.matrix());
            let (a, b) = (r.matrix(), back.matrix());
            for i in 0..3 {
                for j in 0..3 {
                    assert!((a[i][j] - b[i][j]).abs() < 1e-12);
                }
            }
        }
        for r in [RotationZYZ::new(0.3, 0.0, 0.4).unwrap(), RotationZYZ::new(0.3, PI, 0.4).unwrap()] {
            let back = RotationZYZ::from_matrix(&r.matrix());
            let (a, b) = (r.matrix(), back.matrix());
            for i in 0..3 {
                for j in 0..3 {
                    assert!((a[i][j] - b[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pole_to_reaches_target() {
        let p = SpherePoint::new(PI / 2.0, PI / 2.0).unwrap();
        let q = RotationZYZ::pole_to(&p).apply(&SpherePoint::north_pole());
        let (a, b) = (p.to_cartesian(), q.to_cartesian());
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn point_validation() {
        assert!(SpherePoint::new(-0.1, 0.0).is_err());
        assert!(SpherePoint::new(0.1, 2.0 * PI).is_err());
        assert!(RotationZYZ::new(0.0, 4.0, 0.0).is_err());
        let p = SpherePoint::from_cartesian([0.0, -1.0, 0.0]);
        assert!((p.phi - 1.5 * PI).abs() < 1e-15 && (p.theta - PI / 2.0).abs() < 1e-15);
    }
}
