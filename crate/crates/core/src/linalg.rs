//! Dense complex linear algebra on the small square blocks of a block operator.
//!
//! Blocks are at most a few hundred wide, so everything here is direct: LU with
//! partial pivoting for inversion and one-sided Jacobi for singular values.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cz, is_finite_c, re, Real};

/// Relative pivot size below which a matrix is declared singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix<T> {
    side: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn new(side: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if side == 0 {
            return Err(Error::Shape("matrix side must be positive".into()));
        }
        if entries.len() != side * side {
            return Err(Error::Shape(format!("{} entries cannot form a {side}x{side} matrix", entries.len())));
        }
        if !entries.iter().all(is_finite_c) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { side, entries })
    }

    /// Builds from real row-major entries.
    pub fn from_real(side: usize, entries: &[T]) -> Result<Self> {
        Self::new(side, entries.iter().map(|&x| re(x)).collect())
    }

    pub fn zeros(side: usize) -> Self {
        Self { side, entries: vec![cz(); side * side] }
    }

    pub fn identity(side: usize) -> Self {
        Self::scalar(side, T::one())
    }

    /// `value` times the identity.
    pub fn scalar(side: usize, value: T) -> Self {
        let mut m = Self::zeros(side);
        for i in 0..side {
            m.entries[i * side + i] = re(value);
        }
        m
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let side = diag.len();
        let mut m = Self::zeros(side);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * side + i] = d;
        }
        m
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.side + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex<T>) {
        self.entries[i * self.side + j] = value;
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.side).all(|i| (0..self.side).all(|j| i == j || self.get(i, j) == cz()))
    }

    pub fn adjoint(&self) -> Self {
        let n = self.side;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self { side: self.side, entries: self.entries.iter().map(|&z| z * factor).collect() }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: T) -> Result<Self> {
        self.check_same_side(other)?;
        Ok(Self {
            side: self.side,
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b * factor).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_side(other)?;
        let n = self.side;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == cz() {
                    continue;
                }
                let row = &other.entries[k * n..(k + 1) * n];
                let dst = &mut out.entries[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.side {
            return Err(Error::Shape(format!(
                "vector of length {} against {}x{} matrix",
                v.len(),
                self.side,
                self.side
            )));
        }
        let n = self.side;
        Ok((0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].iter().zip(v).fold(cz(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<T> {
        jacobi_singular_values(self)
    }

    /// Operator norm, i.e. the largest singular value.
    pub fn spectral_norm(&self) -> T {
        spectral_norm(self)
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self)
    }

    pub fn invert(&self) -> Result<Self> {
        invert(self)
    }

    pub fn inverse_norm(&self) -> Result<T> {
        inverse_norm(self)
    }

    fn check_same_side(&self, other: &Self) -> Result<()> {
        if self.side != other.side {
            return Err(Error::Shape(format!("{}x{} against {}x{}", self.side, self.side, other.side, other.side)));
        }
        Ok(())
    }
}

/// Largest singular value of `m`.
pub fn spectral_norm<T: Real>(m: &DenseMatrix<T>) -> T {
    if m.is_diagonal() {
        return (0..m.side).map(|i| m.get(i, i).norm()).fold(T::zero(), T::max);
    }
    jacobi_singular_values(m)[0]
}

/// Inverse by LU with partial pivoting.
pub fn invert<T: Real>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    m.lu()?.inverse()
}

/// `‖M⁻¹‖_op = 1 / σ_min(M)`. Singular input is reported as [`Error::Singular`].
pub fn inverse_norm<T: Real>(m: &DenseMatrix<T>) -> Result<T> {
    // Pivoted elimination decides singularity so that gate semantics do not
    // depend on how small a singular value Jacobi happens to resolve.
    m.lu()?;
    if m.is_diagonal() {
        let smallest = (0..m.side).map(|i| m.get(i, i).norm()).fold(T::infinity(), T::min);
        return Ok(T::one() / smallest);
    }
    let sv = jacobi_singular_values(m);
    let smallest = sv[sv.len() - 1];
    if smallest <= T::zero() {
        return Err(Error::Singular { level: None });
    }
    Ok(T::one() / smallest)
}

/// LU factorisation `P·M = L·U` with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    side: usize,
    /// Packed factors: unit lower part below the diagonal, U on and above it.
    packed: Vec<Complex<T>>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(m: &DenseMatrix<T>) -> Result<Self> {
        let n = m.side;
        let mut a = m.entries.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = T::lit(SINGULAR_PIVOT_RTOL) * m.max_abs();
        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|i| (i, a[i * n + k].norm()))
                    .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_abs > threshold) {
                return Err(Error::Singular { level: None });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                a[i * n + k] = factor;
                if factor == cz() {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = a[k * n + j];
                    a[i * n + j] = a[i * n + j] - factor * u;
                }
            }
        }
        Ok(Self { side: n, packed: a, perm })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.side;
        if b.len() != n {
            return Err(Error::Shape(format!("rhs of length {} for side {n}", b.len())));
        }
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.packed[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc = acc - self.packed[i * n + j] * x[j];
            }
            x[i] = acc / self.packed[i * n + i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<DenseMatrix<T>> {
        let n = self.side;
        let mut out = DenseMatrix::zeros(n);
        let mut e = vec![cz(); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = cz());
            e[j] = re(T::one());
            let col = self.solve(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                out.entries[i * n + j] = v;
            }
        }
        if !out.entries.iter().all(is_finite_c) {
            return Err(Error::Singular { level: None });
        }
        Ok(out)
    }
}

/// One-sided (Hestenes) Jacobi: orthogonalise the columns by plane rotations;
/// the final column norms are the singular values.
fn jacobi_singular_values<T: Real>(m: &DenseMatrix<T>) -> Vec<T> {
    let n = m.side;
    // column-major working copy
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| (0..n).map(|i| m.get(i, j)).collect()).collect();
    let tol = T::eps();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (left, right) = cols.split_at_mut(q);
                let a = &mut left[p];
                let b = &mut right[0];
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = cz::<T>();
                for (x, y) in a.iter().zip(b.iter()) {
                    alpha = alpha + x.norm_sqr();
                    beta = beta + y.norm_sqr();
                    gamma = gamma + x.conj() * y;
                }
                let g = gamma.norm();
                if g == T::zero() || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / re(g);
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                // b ← conj(phase)·b makes ⟨a, b⟩ real, then a real rotation.
                let ph = phase.conj();
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let yb = *y * ph;
                    let xn = *x * c - yb * s;
                    let yn = *x * s + yb * c;
                    *x = xn;
                    *y = yn;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Largest singular value of a real square matrix (row-major) by
/// Golub–Kahan–Lanczos bidiagonalisation.
///
/// Much cheaper than a full decomposition for the repeated 64×64 draws of the
/// concentration diagnostics. The Krylov space is grown until the estimate
/// stabilises to relative `1e-13` or the full dimension is reached.
pub fn real_spectral_norm<T: Real>(a: &[T], side: usize) -> T {
    assert_eq!(a.len(), side * side, "real_spectral_norm: shape");
    let n = side;
    if n == 1 {
        return a[0].abs();
    }
    let mut v: Vec<T> = (0..n).map(|i| T::one() + T::lit(0.37) * T::from_usize_lossy(i).sin()).collect();
    normalize(&mut v);
    let mut u_prev = vec![T::zero(); n];
    let mut u = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut alphas: Vec<T> = Vec::with_capacity(n);
    let mut betas: Vec<T> = Vec::with_capacity(n);
    let mut beta_prev = T::zero();
    let mut last = T::zero();
    for step in 0..n {
        // u = A v − β u_prev
        for i in 0..n {
            let row = &a[i * n..(i + 1) * n];
            let dot = row.iter().zip(&v).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            u[i] = dot - beta_prev * u_prev[i];
        }
        let alpha = normalize(&mut u);
        alphas.push(alpha);
        if alpha == T::zero() {
            break;
        }
        // w = Aᵀ u − α v
        w.iter_mut().zip(&v).for_each(|(wi, &vi)| *wi = -alpha * vi);
        for i in 0..n {
            let ui = u[i];
            let row = &a[i * n..(i + 1) * n];
            w.iter_mut().zip(row).for_each(|(wi, &x)| *wi = *wi + x * ui);
        }
        let beta = normalize(&mut w);
        let done = step + 1 == n || beta <= T::eps() * alpha;
        if step % 4 == 3 || done {
            let est = bidiag_largest_singular(&alphas, &betas);
            if done || (est - last).abs() <= T::lit(1e-13) * est {
                return est;
            }
            last = est;
        }
        betas.push(beta);
        beta_prev = beta;
        std::mem::swap(&mut u_prev, &mut u);
        std::mem::swap(&mut v, &mut w);
    }
    bidiag_largest_singular(&alphas, &betas)
}

fn normalize<T: Real>(v: &mut [T]) -> T {
    let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm > T::zero() {
        v.iter_mut().for_each(|x| *x = *x / norm);
    }
    norm
}

/// Largest singular value of the upper bidiagonal matrix with diagonal
/// `alphas` and superdiagonal `betas` (`betas.len() >= alphas.len() - 1`), by
/// bisection on the Sturm sequence of BᵀB.
fn bidiag_largest_singular<T: Real>(alphas: &[T], betas: &[T]) -> T {
    let k = alphas.len();
    let mut diag = Vec::with_capacity(k);
    let mut off = Vec::with_capacity(k.saturating_sub(1));
    for j in 0..k {
        let b_prev = if j > 0 { betas[j - 1] } else { T::zero() };
        diag.push(alphas[j] * alphas[j] + b_prev * b_prev);
        if j + 1 < k {
            off.push(alphas[j] * betas[j]);
        }
    }
    // Gershgorin upper bound
    let mut hi = T::zero();
    for j in 0..k {
        let r = if j > 0 { off[j - 1].abs() } else { T::zero() } + if j + 1 < k { off[j].abs() } else { T::zero() };
        hi = hi.max(diag[j] + r);
    }
    let mut lo = T::zero();
    // count of eigenvalues strictly greater than x
    let count_above = |x: T| -> usize {
        let mut count_below = 0usize;
        let mut q = T::one();
        for j in 0..k {
            let o2 = if j > 0 { off[j - 1] * off[j - 1] } else { T::zero() };
            q = diag[j] - x - if j > 0 { o2 / q } else { T::zero() };
            if q == T::zero() {
                q = T::eps() * (diag[j].abs() + T::min_positive_value());
            }
            if q < T::zero() {
                count_below += 1;
            }
        }
        k - count_below
    };
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_above(mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((lo + hi) / T::lit(2.0)).sqrt()
}
