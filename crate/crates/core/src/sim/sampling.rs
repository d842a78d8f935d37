//! Sample-based data on the sphere: draws from a density, random rotations
//! `ε_i` and empirical harmonic coefficients `n⁻¹ Σ conj(Y(Z_i))`.

use num_complex::Complex;

use super::seed::SeedSpec;
use crate::error::{Error, Result};
use crate::scalar::{cz, Real};
use crate::sphere::{harmonics_at, RotationZYZ, SpherePoint, SphericalCoeffs};

/// Proposals per efficiency probe.
pub const PROBE_PROPOSALS: usize = 100_000;
/// Smallest acceptance rate tolerated by the rejection sampler.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

fn uniform_point<T: Real, R: rand::Rng + ?Sized>(rng: &mut R) -> SpherePoint<T> {
    let two = T::lit(2.0);
    let z = (two * T::sample_unit(rng) - T::one()).max(-T::one()).min(T::one());
    let phi = (T::PI() + T::PI()) * T::sample_unit(rng);
    SpherePoint { theta: z.acos(), phi }
}

/// `n` draws from the density `f_eval` (with respect to the uniform law) by
/// rejection against uniform proposals. `f_max` must bound `f_eval`.
pub fn sample_sphere_density<T: Real>(
    f_eval: impl Fn(&SpherePoint<T>) -> T,
    f_max: T,
    n: usize,
    seed: &SeedSpec,
) -> Result<Vec<SpherePoint<T>>> {
    if !(f_max > T::zero()) || !f_max.is_finite() {
        return Err(Error::Domain(format!("density bound {f_max} must be positive")));
    }
    let mut rng = seed.rng("sphere-sample");
    let mut out = Vec::with_capacity(n);
    let mut proposals = 0usize;
    while out.len() < n {
        let p = uniform_point::<T, _>(&mut rng);
        let u = T::sample_unit(&mut rng);
        let v = f_eval(&p);
        if v > f_max {
            return Err(Error::Domain(format!("density value {v} exceeds the bound {f_max}")));
        }
        proposals += 1;
        if u * f_max < v {
            out.push(p);
        }
        if proposals.is_multiple_of(PROBE_PROPOSALS) {
            let rate = out.len() as f64 / proposals as f64;
            if rate < MIN_ACCEPTANCE {
                return Err(Error::Efficiency { rate, min: MIN_ACCEPTANCE });
            }
        }
    }
    Ok(out)
}

/// `n` rotations with uniform axis and angle `angle_quantile(U)`, `U` uniform
/// on `[0, 1]`. The law is invariant under conjugation.
pub fn sample_rotation_conjinv<T: Real>(
    angle_quantile: impl Fn(T) -> T,
    n: usize,
    seed: &SeedSpec,
) -> Vec<RotationZYZ<T>> {
    let mut rng = seed.rng("rotation-sample");
    (0..n)
        .map(|_| {
            let axis = uniform_point::<T, _>(&mut rng).to_cartesian();
            let angle = angle_quantile(T::sample_unit(&mut rng));
            RotationZYZ::from_axis_angle(axis, angle)
        })
        .collect()
}

/// Quantile of the rotation angle of a Haar-distributed rotation, whose
/// distribution function is `(ω − sin ω)/π` on `[0, π]`.
pub fn haar_angle_quantile<T: Real>(u: T) -> T {
    let target = u.max(T::zero()).min(T::one()) * T::PI();
    let (mut lo, mut hi) = (T::zero(), T::PI());
    for _ in 0..100 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid - mid.sin() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// `ε_i X_i` for paired rotations and points.
pub fn rotate_points<T: Real>(rotations: &[RotationZYZ<T>], points: &[SpherePoint<T>]) -> Result<Vec<SpherePoint<T>>> {
    if rotations.len() != points.len() {
        return Err(Error::Shape(format!("{} rotations for {} points", rotations.len(), points.len())));
    }
    Ok(rotations.iter().zip(points).map(|(r, p)| r.apply(p)).collect())
}

/// Empirical coefficients `n⁻¹ Σ_i conj(Y_l^m(Z_i))`, `l <= l_max`.
pub fn empirical_coeffs<T: Real>(points: &[SpherePoint<T>], l_max: usize) -> Result<SphericalCoeffs<T>> {
    if points.is_empty() {
        return Err(Error::Shape("empirical coefficients of an empty sample".into()));
    }
    let mut acc = vec![cz::<T>(); (l_max + 1) * (l_max + 1)];
    for p in points {
        for (a, y) in acc.iter_mut().zip(harmonics_at(l_max, p)) {
            *a = *a + y.conj();
        }
    }
    let n = T::from_usize_lossy(points.len());
    let flat: Vec<Complex<T>> = acc.into_iter().map(|a| a / n).collect();
    SphericalCoeffs::from_flat(l_max, &flat, true)
}
