use crate::error::{Error, Result};
use crate::scalar::Real;

/// Associated Legendre function `P_l^m(x)` including the Condon–Shortley
/// phase `(-1)^m`, so that `P_1^1(x) = -sqrt(1 - x²)`. Negative orders follow
/// `P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m`.
pub fn assoc_legendre<T: Real>(l: usize, m: i64, x: T) -> Result<T> {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Err(Error::Domain(format!("|m| = {am} exceeds l = {l}")));
    }
    if !(x >= -T::one() && x <= T::one()) {
        return Err(Error::Domain(format!("x = {x} outside [-1, 1]")));
    }
    let s = ((T::one() - x) * (T::one() + x)).sqrt();
    // P_m^m = (-1)^m (2m-1)!! s^m
    let mut pmm = T::one();
    for i in 0..am {
        pmm = -pmm * T::from_usize_lossy(2 * i + 1) * s;
    }
    let value = if l == am {
        pmm
    } else {
        let mut p0 = pmm;
        let mut p1 = x * T::from_usize_lossy(2 * am + 1) * pmm;
        for ll in (am + 2)..=l {
            let p2 = (x * T::from_usize_lossy(2 * ll - 1) * p1 - T::from_usize_lossy(ll + am - 1) * p0)
                / T::from_usize_lossy(ll - am);
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    if m >= 0 {
        return Ok(value);
    }
    // (l-m)!/(l+m)! for the positive order am
    let mut ratio = T::one();
    for k in (l - am + 1)..=(l + am) {
        ratio = ratio / T::from_usize_lossy(k);
    }
    let sign = if am.is_multiple_of(2) { T::one() } else { -T::one() };
    Ok(sign * ratio * value)
}

/// Normalised functions `P̄_l^m(x) = sqrt((2l+1)(l-m)!/(l+m)!) P_l^m(x)`
/// for `0 <= m <= l <= l_max`, stored at `l(l+1)/2 + m`.
///
/// With this scaling `P̄_l^m(cos θ) e^{imφ}` is orthonormal for the uniform
/// probability measure on the sphere. The recurrence never forms factorials.
pub fn normalized_legendre_table<T: Real>(l_max: usize, x: T) -> Vec<T> {
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut out = vec![T::zero(); idx(l_max, l_max) + 1];
    let s = ((T::one() - x) * (T::one() + x)).max(T::zero()).sqrt();
    out[0] = T::one();
    for m in 1..=l_max {
        let mf = T::from_usize_lossy(m);
        let prev = out[idx(m - 1, m - 1)];
        out[idx(m, m)] = -((mf + mf + T::one()) / (mf + mf)).sqrt() * s * prev;
    }
    for m in 0..l_max {
        let mf = T::from_usize_lossy(m);
        out[idx(m + 1, m)] = (mf + mf + T::lit(3.0)).sqrt() * x * out[idx(m, m)];
        for l in (m + 2)..=l_max {
            let lf = T::from_usize_lossy(l);
            let l1 = lf - T::one();
            let a = ((T::lit(4.0) * lf * lf - T::one()) / (lf * lf - mf * mf)).sqrt();
            let b = ((l1 * l1 - mf * mf) / (T::lit(4.0) * l1 * l1 - T::one())).sqrt();
            out[idx(l, m)] = a * (x * out[idx(l - 1, m)] - b * out[idx(l - 2, m)]);
        }
    }
    out
}

#[inline]
pub(crate) fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}
