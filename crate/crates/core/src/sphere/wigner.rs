use num_complex::Complex;

use super::harmonics::SphericalCoeffs;
use super::RotationZYZ;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::BlockCoefficients;
use crate::scalar::Real;

/// Wigner small-d function `d^l_{mn}(β)`.
pub fn little_d<T: Real>(l: usize, m: i64, n: i64, beta: T) -> Result<T> {
    check_orders(l, m, n)?;
    Ok(d_column(l, m, n, beta)[l - max_abs(m, n)])
}

/// `D^l_{mn}(r) = e^{-i(mφ + nψ)} d^l_{mn}(θ)`.
pub fn wigner_d<T: Real>(l: usize, m: i64, n: i64, r: &RotationZYZ<T>) -> Result<Complex<T>> {
    let d = little_d(l, m, n, r.theta)?;
    Ok(phase(m, r.phi) * phase(n, r.psi) * d)
}

/// The full `(2l+1) × (2l+1)` matrix `D^l(r)`, row `m + l`, column `n + l`.
pub fn wigner_d_block<T: Real>(l: usize, r: &RotationZYZ<T>) -> DenseMatrix<T> {
    let table = little_d_table(l, r.theta);
    let side = 2 * l + 1;
    let li = l as i64;
    let row_phase: Vec<_> = (-li..=li).map(|m| phase(m, r.phi)).collect();
    let col_phase: Vec<_> = (-li..=li).map(|n| phase(n, r.psi)).collect();
    let block = &table[l];
    let entries = (0..side * side).map(|k| row_phase[k / side] * col_phase[k % side] * block[k]).collect();
    DenseMatrix::new(side, entries).expect("square block")
}

/// Coefficients of `ω ↦ f(r⁻¹ ω)`.
pub fn rotate_coeffs<T: Real>(f: &SphericalCoeffs<T>, r: &RotationZYZ<T>) -> Result<SphericalCoeffs<T>> {
    let blocks = f
        .coeffs()
        .blocks()
        .iter()
        .enumerate()
        .map(|(l, c)| wigner_d_block(l, r).matvec(c))
        .collect::<Result<Vec<_>>>()?;
    SphericalCoeffs::new(BlockCoefficients::new(f.coeffs().structure().clone(), blocks)?, f.is_real())
}

/// `d^l_{mn}(β)` for every `l <= l_max`; entry `l` is row-major over
/// `m, n ∈ -l..=l`.
pub(crate) fn little_d_table<T: Real>(l_max: usize, beta: T) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = (0..=l_max).map(|l| vec![T::zero(); (2 * l + 1) * (2 * l + 1)]).collect();
    let lm = l_max as i64;
    for m in -lm..=lm {
        for n in -lm..=lm {
            let j0 = max_abs(m, n);
            for (k, v) in d_column(l_max, m, n, beta).into_iter().enumerate() {
                let l = j0 + k;
                let side = 2 * l + 1;
                let row = (m + l as i64) as usize;
                let col = (n + l as i64) as usize;
                out[l][row * side + col] = v;
            }
        }
    }
    out
}

fn check_orders(l: usize, m: i64, n: i64) -> Result<()> {
    if max_abs(m, n) > l {
        return Err(Error::Domain(format!("orders ({m}, {n}) exceed degree {l}")));
    }
    Ok(())
}

fn max_abs(m: i64, n: i64) -> usize {
    m.unsigned_abs().max(n.unsigned_abs()) as usize
}

fn phase<T: Real>(m: i64, angle: T) -> Complex<T> {
    let (s, c) = (T::from_i64(m).expect("order") * angle).sin_cos();
    Complex::new(c, -s)
}

/// `d^J_{mn}(β)` for `J = max(|m|,|n|) ..= l_max` by the three-term
/// recurrence in `J`.
fn d_column<T: Real>(l_max: usize, m: i64, n: i64, beta: T) -> Vec<T> {
    let j0 = max_abs(m, n);
    let mut out = Vec::with_capacity(l_max + 1 - j0);
    out.push(seed(m, n, beta));
    let cb = beta.cos();
    let (mf, nf) = (T::from_i64(m).expect("order"), T::from_i64(n).expect("order"));
    let (m2, n2) = (mf * mf, nf * nf);
    let mut prev = T::zero();
    for j in j0..l_max {
        let jf = T::from_usize_lossy(j);
        let j1 = jf + T::one();
        let denom = ((j1 * j1 - m2) * (j1 * j1 - n2)).sqrt();
        let cur = *out.last().expect("seeded");
        let next = if j == 0 {
            cb * cur
        } else {
            let a = j1 * (jf + jf + T::one()) / denom * (cb - mf * nf / (jf * j1));
            let b = ((jf * jf - m2) * (jf * jf - n2)).sqrt() / denom * j1 / jf;
            a * cur - b * prev
        };
        prev = cur;
        out.push(next);
    }
    out
}

/// `d^J_{mn}` at `J = max(|m|, |n|)`.
fn seed<T: Real>(m: i64, n: i64, beta: T) -> T {
    if n.abs() > m.abs() {
        let sign = if (m - n).rem_euclid(2) == 0 { T::one() } else { -T::one() };
        return sign * seed(n, m, beta);
    }
    let j = m.abs();
    let (s, c) = (beta / T::lit(2.0)).sin_cos();
    let root = (ln_binomial::<T>(2 * j, j + n) * T::lit(0.5)).exp();
    let pow = |x: T, e: i64| x.powi(e as i32);
    if m >= 0 {
        root * pow(c, j + n) * pow(-s, j - n)
    } else {
        root * pow(c, j - n) * pow(s, j + n)
    }
}

fn ln_binomial<T: Real>(n: i64, k: i64) -> T {
    let k = k.min(n - k);
    (0..k).map(|i| (T::from_i64(n - i).expect("int") / T::from_i64(i + 1).expect("int")).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{analyze, synthesize, SpherePoint, SphereQuadrature};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn fact(n: i64) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Wigner's explicit sum.
    fn d_sum(j: i64, m: i64, n: i64, beta: f64) -> f64 {
        let (s, c) = (beta / 2.0).sin_cos();
        let pre = (fact(j + m) * fact(j - m) * fact(j + n) * fact(j - n)).sqrt();
        let lo = 0.max(n - m);
        let hi = (j + n).min(j - m);
        (lo..=hi)
            .map(|k| {
                let sign = if (m - n + k) % 2 == 0 { 1.0 } else { -1.0 };
                sign * pre / (fact(j + n - k) * fact(k) * fact(m - n + k) * fact(j - m - k))
                    * c.powi((2 * j + n - m - 2 * k) as i32)
                    * s.powi((m - n + 2 * k) as i32)
            })
            .sum()
    }

    fn random_rotation(rng: &mut impl Rng) -> RotationZYZ<f64> {
        RotationZYZ::new(rng.random::<f64>() * 2.0 * PI, rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI)
            .unwrap()
    }

    #[test]
    fn matches_explicit_sum() {
        for &beta in &[0.0, 0.3, 1.2, PI / 2.0, 2.9, PI] {
            for j in 0..=9i64 {
                for m in -j..=j {
                    for n in -j..=j {
                        let a = little_d(j as usize, m, n, beta).unwrap();
                        let b = d_sum(j, m, n, beta);
                        assert!((a - b).abs() < 1e-11, "j={j} m={m} n={n} β={beta}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn textbook_values() {
        let b = 0.7f64;
        assert_relative_eq!(little_d(1, 1, 0, b).unwrap(), -b.sin() / 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(little_d(1, 1, 1, b).unwrap(), (1.0 + b.cos()) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(little_d(2, 0, 0, b).unwrap(), 1.5 * b.cos().powi(2) - 0.5, max_relative = 1e-14);
        assert!(little_d(1, 2, 0, b).is_err());
    }

    #[test]
    fn identity_gives_kronecker() {
        let id = RotationZYZ::<f64>::identity();
        for l in 0..6usize {
            let d = wigner_d_block(l, &id);
            for i in 0..2 * l + 1 {
                for j in 0..2 * l + 1 {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((d.get(i, j) - Complex::new(expected, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn blocks_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r = random_rotation(&mut rng);
            for l in 0..=8usize {
                let d = wigner_d_block(l, &r);
                let prod = d.matmul(&d.adjoint()).unwrap();
                let id = DenseMatrix::<f64>::identity(2 * l + 1);
                assert!(prod.add_scaled(&id, -1.0).unwrap().max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn representation_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let (r1, r2) = (random_rotation(&mut rng), random_rotation(&mut rng));
            let r12 = r1.compose(&r2);
            for l in [1usize, 2, 5] {
                let lhs = wigner_d_block(l, &r12);
                let rhs = wigner_d_block(l, &r1).matmul(&wigner_d_block(l, &r2)).unwrap();
                assert!(lhs.add_scaled(&rhs, -1.0).unwrap().max_abs() < 1e-8);
            }
        }
    }

    #[test]
    fn table_matches_single_entries() {
        let beta = 1.9;
        let table = little_d_table::<f64>(6, beta);
        for l in 0..=6usize {
            let li = l as i64;
            let side = 2 * l + 1;
            for m in -li..=li {
                for n in -li..=li {
                    let k = (m + li) as usize * side + (n + li) as usize;
                    assert!((table[l][k] - d_sum(li, m, n, beta)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rotating_coefficients_rotates_the_function() {
        let l_max = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let quad = SphereQuadrature::for_degree(l_max);
        // a degree-3 polynomial in Cartesian coordinates
        let poly = |p: &SpherePoint<f64>| {
            let [x, y, z] = p.to_cartesian();
            1.0 + 0.5 * x - y * z + 2.0 * x * x * z + 0.3 * y * y * y
        };
        let f = analyze(poly, l_max, &quad).unwrap();
        let r = random_rotation(&mut rng);
        let rotated = rotate_coeffs(&f, &r).unwrap();
        let inv = r.inverse();
        let direct = analyze(|p| poly(&inv.apply(p)), l_max, &quad).unwrap();
        for (a, b) in rotated.coeffs().flatten().iter().zip(direct.coeffs().flatten()) {
            assert!((a - b).norm() < 1e-11);
        }
        let p = SpherePoint::new(0.4, 1.0).unwrap();
        let v = synthesize(&rotated, &[p]).unwrap()[0];
        assert!((v - poly(&inv.apply(&p))).abs() < 1e-11);
    }
}
