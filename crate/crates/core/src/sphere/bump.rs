use num_complex::Complex;

use super::harmonics::SphericalCoeffs;
use super::wigner::wigner_d_block;
use super::{RotationZYZ, SpherePoint};
use crate::error::{Error, Result};
use crate::model::{BlockCoefficients, BlockStructure};
use crate::quadrature::gauss_legendre;
use crate::scalar::{cz, re, Real};

/// Prefactor `C` of the reference bump. The constant is the rounded
/// `0.7854`, not `π/4`.
#[allow(clippy::approx_constant)]
pub const BUMP_NORMALIZER: f64 = 1.0 / 0.7854;

const MAX_NODES: usize = 1 << 13;
const COEFF_TOL: f64 = 1e-10;

/// `f(ω) = C exp(-a ‖ω - ω₁‖²)` with chordal distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump<T> {
    pub center: [T; 3],
    pub width: T,
    pub scale: T,
}

impl<T: Real> Default for GaussianBump<T> {
    /// Centre `(0, 1, 0)`, `a = 4`, `C = 1/0.7854`.
    fn default() -> Self {
        Self { center: [T::zero(), T::one(), T::zero()], width: T::lit(4.0), scale: T::lit(BUMP_NORMALIZER) }
    }
}

impl<T: Real> GaussianBump<T> {
    pub fn eval(&self, p: &SpherePoint<T>) -> T {
        let w = p.to_cartesian();
        let dist2: T = (0..3).map(|i| (w[i] - self.center[i]).powi(2)).sum();
        self.scale * (-self.width * dist2).exp()
    }

    /// Profile as a function of `t = cos γ`, `γ` the angle to the centre.
    fn profile(&self, t: T) -> T {
        self.scale * (-(self.width + self.width) * (T::one() - t)).exp()
    }

    /// Supremum of the bump (its value at the centre).
    pub fn max_value(&self) -> T {
        self.scale
    }

    /// Zonal coefficients `c_l = ∫ f Y_l^0 dμ` of the bump centred at the
    /// north pole, by Gauss–Legendre quadrature with node doubling.
    pub fn zonal_coeffs(&self, l_max: usize) -> Result<Vec<T>> {
        let mut nodes = (2 * l_max + 16).next_power_of_two();
        let mut prev = self.zonal_with(l_max, nodes);
        while nodes < MAX_NODES {
            nodes *= 2;
            let next = self.zonal_with(l_max, nodes);
            let change = prev.iter().zip(&next).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max);
            if change <= T::lit(COEFF_TOL) {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Accuracy(format!("bump coefficients did not settle with {MAX_NODES} nodes")))
    }

    fn zonal_with(&self, l_max: usize, nodes: usize) -> Vec<T> {
        let (x, w) = gauss_legendre::<T>(nodes);
        let mut out = vec![T::zero(); l_max + 1];
        for (&t, &wt) in x.iter().zip(&w) {
            let h = self.profile(t) * wt / T::lit(2.0);
            // P_l(t) by the three-term recurrence
            let (mut p0, mut p1) = (T::one(), t);
            out[0] = out[0] + h;
            for (l, c) in out.iter_mut().enumerate().skip(1) {
                if l > 1 {
                    let lf = T::from_usize_lossy(l);
                    let p2 = ((lf + lf - T::one()) * t * p1 - (lf - T::one()) * p0) / lf;
                    p0 = p1;
                    p1 = p2;
                }
                *c = *c + h * p1;
            }
        }
        for (l, c) in out.iter_mut().enumerate() {
            *c = *c * T::from_usize_lossy(2 * l + 1).sqrt();
        }
        out
    }

    /// Coefficients up to degree `l_max`: zonal coefficients rotated from the
    /// pole to the centre, `c_{l,m} = D^l_{m0}(r) c_l`.
    pub fn coeffs(&self, l_max: usize) -> Result<SphericalCoeffs<T>> {
        let zonal = self.zonal_coeffs(l_max)?;
        let r = RotationZYZ::pole_to(&SpherePoint::from_cartesian(self.center));
        let blocks = zonal
            .iter()
            .enumerate()
            .map(|(l, &c)| {
                let mut v = vec![cz::<T>(); 2 * l + 1];
                v[l] = re(c);
                wigner_d_block(l, &r).matvec(&v)
            })
            .collect::<Result<Vec<Vec<Complex<T>>>>>()?;
        SphericalCoeffs::new(BlockCoefficients::new(BlockStructure::spherical_degrees(l_max), blocks)?, true)
    }

    /// `‖f‖` in `L²(μ)`, closed form.
    pub fn l2_norm(&self) -> T {
        let four_a = T::lit(4.0) * self.width;
        self.scale * ((T::one() - (-(four_a + four_a)).exp()) / (four_a + four_a)).sqrt()
    }

    /// `∫ f dμ`, closed form.
    pub fn mean(&self) -> T {
        let two_a = self.width + self.width;
        self.scale * (T::one() - (-(two_a + two_a)).exp()) / (two_a + two_a)
    }
}

/// Coefficients of the reference bump `C exp(-4‖ω - (0,1,0)‖²)`.
pub fn gaussian_bump_coeffs<T: Real>(l_max: usize) -> Result<SphericalCoeffs<T>> {
    GaussianBump::default().coeffs(l_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::synthesize;
    use std::f64::consts::PI;

    /// Modified spherical Bessel `i_l(x)` by Miller's backward recurrence,
    /// normalised with `i_0 = sinh(x)/x`.
    fn bessel_i(l_max: usize, x: f64) -> Vec<f64> {
        let start = l_max + 60;
        let mut vals = vec![0.0; start + 2];
        vals[start] = 1e-300;
        for l in (1..=start).rev() {
            vals[l - 1] = (2 * l + 1) as f64 / x * vals[l] + vals[l + 1];
        }
        let scale = (x.sinh() / x) / vals[0];
        vals.truncate(l_max + 1);
        vals.iter().map(|v| v * scale).collect()
    }

    #[test]
    fn zonal_coefficients_match_bessel_closed_form() {
        let bump = GaussianBump::<f64>::default();
        let zonal = bump.zonal_coeffs(30).unwrap();
        let i = bessel_i(30, 8.0);
        for l in 0..=30 {
            let exact = BUMP_NORMALIZER * (-8.0f64).exp() * ((2 * l + 1) as f64).sqrt() * i[l];
            assert!((zonal[l] - exact).abs() < 1e-12, "l={l}");
        }
    }

    #[test]
    fn mass_matches_closed_form() {
        let f = gaussian_bump_coeffs::<f64>(4).unwrap();
        // surface integral C (π/4)(1 - e^{-16}) equals 4π c_00
        let surface = BUMP_NORMALIZER * PI / 4.0 * (1.0 - (-16.0f64).exp());
        assert!((4.0 * PI * f.get(0, 0).re - surface).abs() < 1e-10);
        assert!((surface - 1.0).abs() < 1e-5);
        assert!((GaussianBump::<f64>::default().mean() - f.get(0, 0).re).abs() < 1e-12);
    }

    #[test]
    fn norm_converges_to_closed_form() {
        let bump = GaussianBump::<f64>::default();
        let exact = BUMP_NORMALIZER * ((1.0 - (-32.0f64).exp()) / 32.0).sqrt();
        assert!((bump.l2_norm() - exact).abs() < 1e-15);
        let n10 = bump.coeffs(10).unwrap().norm();
        let n30 = bump.coeffs(30).unwrap().norm();
        assert!((n30 - exact).abs() < 1e-8);
        assert!((n10 - exact).abs() > (n30 - exact).abs());
    }

    #[test]
    fn block_norms_decay() {
        let f = gaussian_bump_coeffs::<f64>(30).unwrap();
        let e = f.coeffs().block_energies();
        // beyond l ≈ 25 the coefficients sit at the quadrature noise floor
        let resolved = e.iter().take_while(|&&x| x.sqrt() > 1e-13).count();
        assert!(resolved > 20);
        for l in 2..resolved - 1 {
            assert!(e[l + 1] < e[l], "l={l}");
        }
    }

    #[test]
    fn synthesis_matches_direct_formula() {
        let bump = GaussianBump::<f64>::default();
        let f = bump.coeffs(20).unwrap();
        let grid: Vec<_> = (0..=30)
            .flat_map(|i| {
                (0..60).map(move |j| SpherePoint::new(PI * i as f64 / 30.0, 2.0 * PI * j as f64 / 60.0).unwrap())
            })
            .collect();
        let values = synthesize(&f, &grid).unwrap();
        let sup = grid.iter().zip(&values).map(|(p, v)| (bump.eval(p) - v).abs()).fold(0.0, f64::max);
        assert!(sup <= 1e-3, "sup error {sup}");
        let (best, _) =
            grid.iter().zip(&values).fold((grid[0], f64::MIN), |acc, (p, &v)| if v > acc.1 { (*p, v) } else { acc });
        let c = best.to_cartesian();
        assert!((c[0]).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_centre_matches_addition_theorem() {
        // zonal expansion about an arbitrary centre: f(ω) = Σ c_l P_l(ω·ω₁)√(2l+1)
        let bump = GaussianBump { center: [0.3, -0.5, 0.81], width: 2.0, scale: 1.0 };
        let f = bump.coeffs(25).unwrap();
        let zonal = bump.zonal_coeffs(25).unwrap();
        let n = 0.3f64.hypot(0.5).hypot(0.81);
        let axis = [0.3 / n, -0.5 / n, 0.81 / n];
        let p = SpherePoint::new(1.2, 4.0).unwrap();
        let w = p.to_cartesian();
        let t: f64 = (0..3).map(|i| w[i] * axis[i]).sum();
        let mut sum = 0.0;
        let (mut p0, mut p1) = (1.0, t);
        for (l, c) in zonal.iter().enumerate() {
            let pl = match l {
                0 => 1.0,
                1 => t,
                _ => {
                    let lf = l as f64;
                    let p2 = ((2.0 * lf - 1.0) * t * p1 - (lf - 1.0) * p0) / lf;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            sum += c * ((2 * l + 1) as f64).sqrt() * pl;
        }
        let v = synthesize(&f, &[p]).unwrap()[0];
        assert!((v - sum).abs() < 1e-10);
    }
}
