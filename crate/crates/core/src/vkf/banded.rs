//! Hermitian positive-definite band matrices and their Cholesky factor.

use std::ops::{AddAssign, Div, Mul, SubAssign};

use num_complex::Complex64;

use crate::error::{Result, VkfError};

/// Entry type of a Hermitian band: `f64` for symmetric, `Complex64` for Hermitian.
pub trait BandScalar:
    Copy
    + Default
    + PartialEq
    + std::fmt::Debug
    + AddAssign
    + SubAssign
    + Mul<Output = Self>
    + Div<f64, Output = Self>
    + Send
    + Sync
{
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn from_real(v: f64) -> Self;

    fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl BandScalar for f64 {
    fn conj(self) -> Self {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn from_real(v: f64) -> Self {
        v
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
}

impl BandScalar for Complex64 {
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
}

/// Relative pivot threshold below which a factorization is declared singular.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Lower band of a Hermitian matrix, row-major: entry `(i, i − d)` lives at
/// `i·(bandwidth + 1) + d`.
#[derive(Debug, Clone)]
pub struct HermitianBand<T: BandScalar> {
    dim: usize,
    bandwidth: usize,
    lower: Vec<T>,
}

impl<T: BandScalar> HermitianBand<T> {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        Self {
            dim,
            bandwidth,
            lower: vec![T::default(); dim * (bandwidth + 1)],
        }
    }

    /// Bytes held by a band of this shape.
    pub fn storage_bytes(dim: usize, bandwidth: usize) -> usize {
        dim.saturating_mul(bandwidth + 1)
            .saturating_mul(std::mem::size_of::<T>())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn slot(&self, i: usize, d: usize) -> usize {
        i * (self.bandwidth + 1) + d
    }

    /// Adds `value` to entry `(i, j)`, `j ≤ i`.
    #[inline]
    pub fn add_lower(&mut self, i: usize, j: usize, value: T) {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        let s = self.slot(i, i - j);
        self.lower[s] += value;
    }

    /// Entry `(i, j)` of the full Hermitian matrix.
    pub fn get(&self, i: usize, j: usize) -> T {
        let (r, c, conj) = if j <= i { (i, j, false) } else { (j, i, true) };
        if r - c > self.bandwidth {
            return T::default();
        }
        let v = self.lower[self.slot(r, r - c)];
        if conj {
            v.conj()
        } else {
            v
        }
    }

    /// `A·x` using both triangles.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim);
        let b = self.bandwidth;
        let mut y = vec![T::default(); self.dim];
        for i in 0..self.dim {
            let base = i * (b + 1);
            y[i] += self.lower[base] * x[i];
            for d in 1..=b.min(i) {
                let a = self.lower[base + d];
                let j = i - d;
                y[i] += a * x[j];
                y[j] += a.conj() * x[i];
            }
        }
        y
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let b = self.bandwidth;
        let mut rows = vec![0.0; self.dim];
        for i in 0..self.dim {
            let base = i * (b + 1);
            rows[i] += self.lower[base].abs();
            for d in 1..=b.min(i) {
                let a = self.lower[base + d].abs();
                rows[i] += a;
                rows[i - d] += a;
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry on the diagonal (imaginary parts).
    pub fn max_diagonal_imag(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.lower[self.slot(i, 0)].im().abs())
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.lower[self.slot(i, 0)]).collect()
    }

    /// Band Cholesky `A = L·Lᴴ`; O(n·b²).
    ///
    /// A pivot below `PIVOT_FLOOR` times its original diagonal entry is treated
    /// as a numerically singular matrix.
    pub fn cholesky(&self) -> Result<BandCholesky<T>> {
        let n = self.dim;
        let b = self.bandwidth;
        let w = b + 1;
        let mut l = self.lower.clone();
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(b);
            for j in lo..i {
                let mut acc = l[i * w + (i - j)];
                for k in lo.max(j.saturating_sub(b))..j {
                    acc -= l[i * w + (i - k)] * l[j * w + (j - k)].conj();
                }
                l[i * w + (i - j)] = acc / diag[j];
            }
            let a_ii = l[i * w].re();
            let mut pivot = a_ii;
            for k in lo..i {
                pivot -= l[i * w + (i - k)].norm_sqr();
            }
            if !(pivot > PIVOT_FLOOR * a_ii && pivot.is_finite()) {
                return Err(VkfError::Factorization {
                    row: i,
                    pivot,
                    sample: None,
                    order: None,
                });
            }
            let d = pivot.sqrt();
            diag[i] = d;
            l[i * w] = T::from_real(d);
        }
        Ok(BandCholesky {
            dim: n,
            bandwidth: b,
            lower: l,
            diag,
        })
    }
}

/// Lower-triangular band factor `L` with `A = L·Lᴴ`.
#[derive(Debug, Clone)]
pub struct BandCholesky<T: BandScalar> {
    dim: usize,
    bandwidth: usize,
    lower: Vec<T>,
    diag: Vec<f64>,
}

impl<T: BandScalar> BandCholesky<T> {
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        assert_eq!(rhs.len(), self.dim);
        let n = self.dim;
        let b = self.bandwidth;
        let w = b + 1;
        let mut z = rhs.to_vec();
        for i in 0..n {
            let mut acc = z[i];
            for j in i.saturating_sub(b)..i {
                acc -= self.lower[i * w + (i - j)] * z[j];
            }
            z[i] = acc / self.diag[i];
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for j in (i + 1)..n.min(i + b + 1) {
                acc -= self.lower[j * w + (j - i)].conj() * z[j];
            }
            z[i] = acc / self.diag[i];
        }
        z
    }

    /// Smallest diagonal entry of `L`.
    pub fn min_pivot(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
