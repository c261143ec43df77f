//! Finite-difference smoothness operator.

use std::ops::{AddAssign, Mul};

use crate::error::{Result, VkfError};

/// The `(n − q) × n` band matrix of `q`-th order backward differences.
///
/// Row `i` evaluates the difference ending at sample `i + q`; its nonzeros sit in
/// columns `i..=i + q` and hold the alternating-sign binomial coefficients of
/// order `q`, ending in `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceMatrix {
    n_samples: usize,
    order: usize,
    coeffs: Vec<i64>,
}

/// Alternating-sign binomial coefficients `(−1)^{q−j}·C(q, j)`, `j = 0..=q`.
pub fn difference_coefficients(q: usize) -> Vec<i64> {
    let mut binom = 1i64;
    let mut out = Vec::with_capacity(q + 1);
    for j in 0..=q {
        if j > 0 {
            binom = binom * (q - j + 1) as i64 / j as i64;
        }
        let sign = if (q - j) % 2 == 0 { 1 } else { -1 };
        out.push(sign * binom);
    }
    out
}

pub fn build_difference_matrix(n_samples: usize, q: usize) -> Result<DifferenceMatrix> {
    if !(1..=3).contains(&q) {
        return Err(VkfError::UnsupportedOrder(q));
    }
    if n_samples <= q {
        return Err(VkfError::InvalidInput(format!(
            "difference of order {q} needs more than {q} samples, got {n_samples}"
        )));
    }
    Ok(DifferenceMatrix {
        n_samples,
        order: q,
        coeffs: difference_coefficients(q),
    })
}

impl DifferenceMatrix {
    pub fn rows(&self) -> usize {
        self.n_samples - self.order
    }

    pub fn cols(&self) -> usize {
        self.n_samples
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Nonzero coefficients shared by every row.
    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    /// First column and coefficients of row `i`.
    pub fn row(&self, i: usize) -> (usize, &[i64]) {
        assert!(i < self.rows(), "row {i} out of range");
        (i, &self.coeffs)
    }

    /// Entry `(i, j)` of the matrix.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        if i >= self.rows() || j < i || j > i + self.order {
            0
        } else {
            self.coeffs[j - i]
        }
    }

    /// `S·x`.
    pub fn apply<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
    {
        assert_eq!(x.len(), self.n_samples);
        (0..self.rows())
            .map(|i| {
                let mut acc = T::default();
                for (j, &c) in self.coeffs.iter().enumerate() {
                    acc += x[i + j] * c as f64;
                }
                acc
            })
            .collect()
    }

    /// `Sᵀ·e`.
    pub fn apply_transpose<T>(&self, e: &[T]) -> Vec<T>
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
    {
        assert_eq!(e.len(), self.rows());
        let mut out = vec![T::default(); self.n_samples];
        for (i, &ei) in e.iter().enumerate() {
            for (j, &c) in self.coeffs.iter().enumerate() {
                out[i + j] += ei * c as f64;
            }
        }
        out
    }

    /// Upper band of `SᵀS`: `gram[k][d] = (SᵀS)[k][k + d]` for `d = 0..=q`.
    pub fn gram_band(&self) -> Vec<[f64; 4]> {
        let q = self.order;
        let mut gram = vec![[0.0; 4]; self.n_samples];
        for i in 0..self.rows() {
            for a in 0..=q {
                for b in a..=q {
                    gram[i + a][b - a] += (self.coeffs[a] * self.coeffs[b]) as f64;
                }
            }
        }
        gram
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        (0..self.rows())
            .map(|i| (0..self.n_samples).map(|j| self.get(i, j)).collect())
            .collect()
    }
}
