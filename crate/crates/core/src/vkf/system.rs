//! The regularized least-squares system for `s` simultaneous orders.
//!
//! Unknowns are interleaved by time: index `k·s + n` holds `A_n[k]`. With that
//! layout the data term is block diagonal with `s × s` blocks and each
//! `r_n²·SᵀS` couples samples at most `q` apart, so the normal matrix is a band
//! of half-bandwidth `s·q` (complex unknowns) or `2·s·q` (real and imaginary
//! parts as separate real unknowns).
//!
//! Both formulations share the right-hand side `Cᴴy` and the regularizer; they
//! differ in the data operator:
//!
//! * [`Formulation::RealProjection`] fits `y ≈ Re(C·a)`, giving the normal
//!   equations `Cᴴ·Re(C·a) + Σ_n r_n²·SᵀS·A_n = Cᴴy`. These are real-linear only,
//!   so the direct route assembles them over `(Re A, Im A)` pairs.
//! * [`Formulation::SingleSided`] fits the complex model `y ≈ C·a`, i.e.
//!   `[CᴴC + (RS)ᵀ(RS)]·a = Cᴴy`; a real cosine of amplitude `a` then yields an
//!   envelope of `a/2` plus a suppressed conjugate image.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::banded::{BandCholesky, HermitianBand};
use super::difference::{build_difference_matrix, DifferenceMatrix};
use super::phase::build_carrier;
use super::types::PhaseTrack;
use crate::error::{check_len, Result, VkfError};

/// Which data model the least-squares problem fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `y ≈ Re(Σ_n A_n·e^{jφ_n})`; envelopes are cosine amplitudes directly.
    ///
    /// The penalty is `Σ_n (r_n²/2)·‖S A_n‖²`. Since `Re(C a)` carries half the
    /// energy of `C a`, this gives a weight `r` the same envelope bandwidth
    /// as in the single-sided form.
    #[default]
    RealProjection,
    /// `y ≈ Σ_n A_n·e^{jφ_n}` with complex residual; envelopes are doubled.
    SingleSided,
}

impl Formulation {
    /// Factor applied to the solution to express envelopes as cosine amplitudes.
    pub fn envelope_gain(self) -> f64 {
        match self {
            Formulation::RealProjection => 1.0,
            Formulation::SingleSided => 2.0,
        }
    }

    /// Multiplier applied to each weight `r_n` inside the penalty.
    pub fn weight_scale(self) -> f64 {
        match self {
            Formulation::RealProjection => std::f64::consts::FRAC_1_SQRT_2,
            Formulation::SingleSided => 1.0,
        }
    }
}

/// Smallest admissible pivot of the unit-diagonal observability Gram matrix.
const OBSERVABILITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct NormalSystem {
    n_samples: usize,
    carriers: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
    diff: DifferenceMatrix,
    formulation: Formulation,
}

impl NormalSystem {
    pub fn new(
        phases: &[PhaseTrack],
        weights: &[f64],
        q: usize,
        formulation: Formulation,
    ) -> Result<Self> {
        if phases.is_empty() {
            return Err(VkfError::InvalidInput("at least one order is required".into()));
        }
        check_len("weights", phases.len(), weights.len())?;
        let n_samples = phases[0].len();
        for p in phases {
            check_len("phase track", n_samples, p.len())?;
        }
        Ok(Self {
            n_samples,
            carriers: phases.iter().map(build_carrier).collect(),
            weights: weights.iter().map(|w| w * formulation.weight_scale()).collect(),
            diff: build_difference_matrix(n_samples, q)?,
            formulation,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_orders(&self) -> usize {
        self.carriers.len()
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    /// Number of complex unknowns.
    pub fn dim(&self) -> usize {
        self.n_samples * self.n_orders()
    }

    /// Half-bandwidth of the assembled matrix for the given formulation.
    pub fn bandwidth_for(n_orders: usize, q: usize, formulation: Formulation) -> usize {
        match formulation {
            Formulation::RealProjection => 2 * n_orders * q,
            Formulation::SingleSided => n_orders * q,
        }
    }

    /// Bytes of one band of the assembled matrix.
    pub fn band_bytes(n_samples: usize, n_orders: usize, q: usize, f: Formulation) -> usize {
        let bw = Self::bandwidth_for(n_orders, q, f);
        let dim = n_samples.saturating_mul(n_orders);
        match f {
            Formulation::RealProjection => {
                HermitianBand::<f64>::storage_bytes(dim.saturating_mul(2), bw)
            }
            Formulation::SingleSided => HermitianBand::<Complex64>::storage_bytes(dim, bw),
        }
    }

    pub fn difference(&self) -> &DifferenceMatrix {
        &self.diff
    }

    pub fn carriers(&self) -> &[Vec<Complex64>] {
        &self.carriers
    }

    #[inline]
    pub fn index(&self, k: usize, n: usize) -> usize {
        k * self.n_orders() + n
    }

    /// Sample and order of a complex unknown.
    pub fn locate(&self, index: usize) -> (usize, usize) {
        (index / self.n_orders(), index % self.n_orders())
    }

    /// Assembles `CᴴC + (RS)ᵀ(RS)` over complex unknowns.
    pub fn assemble_single_sided(&self) -> HermitianBand<Complex64> {
        let s = self.n_orders();
        let q = self.diff.order();
        let mut band = HermitianBand::zeros(
            self.dim(),
            Self::bandwidth_for(s, q, Formulation::SingleSided),
        );
        for k in 0..self.n_samples {
            for n in 0..s {
                let cn = self.carriers[n][k].conj();
                for m in 0..=n {
                    let v = if m == n {
                        Complex64::new(self.carriers[n][k].norm_sqr(), 0.0)
                    } else {
                        cn * self.carriers[m][k]
                    };
                    band.add_lower(self.index(k, n), self.index(k, m), v);
                }
            }
        }
        let gram = self.diff.gram_band();
        for (n, &w) in self.weights.iter().enumerate() {
            let w2 = w * w;
            for k in 0..self.n_samples {
                for off in 0..=q.min(k) {
                    let g = gram[k - off][off];
                    if g != 0.0 {
                        band.add_lower(
                            self.index(k, n),
                            self.index(k - off, n),
                            Complex64::new(w2 * g, 0.0),
                        );
                    }
                }
            }
        }
        band
    }

    /// Assembles `GᵀG + P` over real unknowns `x[2i] = Re a_i`, `x[2i+1] = Im a_i`,
    /// where row `k` of `G` is `(cos φ_n[k], −sin φ_n[k])` for each order.
    pub fn assemble_real_projection(&self) -> HermitianBand<f64> {
        let s = self.n_orders();
        let q = self.diff.order();
        let mut band = HermitianBand::zeros(
            2 * self.dim(),
            Self::bandwidth_for(s, q, Formulation::RealProjection),
        );
        let mut g = vec![0.0; 2 * s];
        for k in 0..self.n_samples {
            for n in 0..s {
                let c = self.carriers[n][k];
                g[2 * n] = c.re;
                g[2 * n + 1] = -c.im;
            }
            let base = 2 * k * s;
            for i in 0..2 * s {
                for j in 0..=i {
                    band.add_lower(base + i, base + j, g[i] * g[j]);
                }
            }
        }
        let gram = self.diff.gram_band();
        for (n, &w) in self.weights.iter().enumerate() {
            let w2 = w * w;
            for k in 0..self.n_samples {
                for off in 0..=q.min(k) {
                    let gv = gram[k - off][off];
                    if gv != 0.0 {
                        for part in 0..2 {
                            band.add_lower(
                                2 * self.index(k, n) + part,
                                2 * self.index(k - off, n) + part,
                                w2 * gv,
                            );
                        }
                    }
                }
            }
        }
        band
    }

    /// Direct solve of the normal equations with one step of iterative
    /// refinement, the residual being evaluated through the factors.
    pub fn solve_direct(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut a = self.factor_solve(rhs)?;
        let residual: Vec<Complex64> = self
            .apply_normal(&a)
            .iter()
            .zip(rhs)
            .map(|(m, b)| b - m)
            .collect();
        let correction = self.factor_solve(&residual)?;
        for (ai, ci) in a.iter_mut().zip(correction) {
            *ai += ci;
        }
        Ok(a)
    }

    fn factor_solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let locate_err = |e: VkfError, per_unknown: usize| match e {
            VkfError::Factorization { row, pivot, .. } => {
                let (sample, order) = self.locate(row / per_unknown);
                VkfError::Factorization {
                    row,
                    pivot,
                    sample: Some(sample),
                    order: Some(order),
                }
            }
            other => other,
        };
        match self.formulation {
            Formulation::SingleSided => {
                let factor = self
                    .assemble_single_sided()
                    .cholesky()
                    .map_err(|e| locate_err(e, 1))?;
                Ok(factor.solve(rhs))
            }
            Formulation::RealProjection => {
                let factor = self
                    .assemble_real_projection()
                    .cholesky()
                    .map_err(|e| locate_err(e, 2))?;
                let flat: Vec<f64> = rhs.iter().flat_map(|c| [c.re, c.im]).collect();
                let x = factor.solve(&flat);
                Ok(x.chunks_exact(2)
                    .map(|p| Complex64::new(p[0], p[1]))
                    .collect())
            }
        }
    }

    /// `Cᴴy`.
    pub fn rhs(&self, y: &[f64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.n_samples);
        let u: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply_carrier_adjoint(&u)
    }

    /// `C·a`, the complex model signal.
    pub fn apply_carrier(&self, a: &[Complex64]) -> Vec<Complex64> {
        let s = self.n_orders();
        (0..self.n_samples)
            .map(|k| (0..s).map(|n| self.carriers[n][k] * a[k * s + n]).sum())
            .collect()
    }

    /// The data operator of the active formulation: `Re(C·a)` or `C·a`.
    pub fn apply_data(&self, a: &[Complex64]) -> Vec<Complex64> {
        let model = self.apply_carrier(a);
        match self.formulation {
            Formulation::SingleSided => model,
            Formulation::RealProjection => model
                .into_iter()
                .map(|v| Complex64::new(v.re, 0.0))
                .collect(),
        }
    }

    /// `Cᴴ·u`; the adjoint of both data operators under the real inner product
    /// when `u` lies in the operator's range.
    pub fn apply_carrier_adjoint(&self, u: &[Complex64]) -> Vec<Complex64> {
        let s = self.n_orders();
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (k, &uk) in u.iter().enumerate() {
            for n in 0..s {
                out[k * s + n] = self.carriers[n][k].conj() * uk;
            }
        }
        out
    }

    /// Checks that the data term sees every envelope the penalty ignores.
    ///
    /// `M = DᴴD + RᵀR` is positive definite exactly when no nonzero envelope
    /// with vanishing `q`-th differences (a polynomial of degree `< q`, real or
    /// imaginary, per order) maps to zero under the data operator `D`. The Gram
    /// matrix of `D` on that basis is small, so the test is independent of the
    /// weights that make pivot thresholds unreliable.
    pub fn check_observable(&self) -> Result<()> {
        let s = self.n_orders();
        let q = self.diff.order();
        let m = 2 * q * s;
        let n = self.n_samples;
        let span = (n.max(2) - 1) as f64;
        let mut gram = vec![0.0; m * m];
        let mut z = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..n {
            let tau = 2.0 * k as f64 / span - 1.0;
            for order in 0..s {
                let c = self.carriers[order][k];
                let mut p = 1.0;
                for d in 0..q {
                    for (part, unit) in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]
                        .into_iter()
                        .enumerate()
                    {
                        let v = c * unit * p;
                        z[(order * q + d) * 2 + part] = match self.formulation {
                            Formulation::RealProjection => Complex64::new(v.re, 0.0),
                            Formulation::SingleSided => v,
                        };
                    }
                    p *= tau;
                }
            }
            for i in 0..m {
                for j in 0..=i {
                    gram[i * m + j] += (z[i].conj() * z[j]).re;
                }
            }
        }
        // Unit-diagonal scaling, then an unpivoted Cholesky on the lower triangle.
        let scale: Vec<f64> = (0..m).map(|i| gram[i * m + i].sqrt()).collect();
        for i in 0..m {
            if !(scale[i] > 0.0) {
                return Err(VkfError::Unobservable { order: i / (2 * q), pivot: 0.0 });
            }
        }
        for i in 0..m {
            for j in 0..=i {
                gram[i * m + j] /= scale[i] * scale[j];
            }
        }
        for i in 0..m {
            for j in 0..=i {
                let mut acc = gram[i * m + j];
                for k in 0..j {
                    acc -= gram[i * m + k] * gram[j * m + k];
                }
                if i == j {
                    if !(acc > OBSERVABILITY_FLOOR) {
                        return Err(VkfError::Unobservable { order: i / (2 * q), pivot: acc });
                    }
                    gram[i * m + i] = acc.sqrt();
                } else {
                    gram[i * m + j] = acc / gram[j * m + j];
                }
            }
        }
        Ok(())
    }

    /// Extracts order `n` from the interleaved vector.
    pub fn order_slice(&self, a: &[Complex64], n: usize) -> Vec<Complex64> {
        let s = self.n_orders();
        a.iter().skip(n).step_by(s).copied().collect()
    }

    /// `r_n·S·A_n` for every order.
    pub fn apply_regularizer(&self, a: &[Complex64]) -> Vec<Vec<Complex64>> {
        (0..self.n_orders())
            .map(|n| {
                let w = self.weights[n];
                self.diff
                    .apply(&self.order_slice(a, n))
                    .into_iter()
                    .map(|v| v * w)
                    .collect()
            })
            .collect()
    }

    /// `Σ_n r_n·Sᵀ·v_n` scattered back into interleaved layout.
    pub fn apply_regularizer_adjoint(&self, v: &[Vec<Complex64>]) -> Vec<Complex64> {
        let s = self.n_orders();
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (n, vn) in v.iter().enumerate() {
            let w = self.weights[n];
            for (k, x) in self.diff.apply_transpose(vn).into_iter().enumerate() {
                out[k * s + n] += x * w;
            }
        }
        out
    }

    /// Normal operator evaluated through the factors.
    pub fn apply_normal(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.apply_carrier_adjoint(&self.apply_data(a));
        let reg = self.apply_regularizer_adjoint(&self.apply_regularizer(a));
        for (o, r) in out.iter_mut().zip(reg) {
            *o += r;
        }
        out
    }

    /// Per-order factors of `d·I + r_n²·SᵀS`, where `d` is the diagonal of
    /// the data term. This is the normal matrix without the oscillating carrier
    /// products, and preconditions the iterative solver.
    pub fn block_preconditioner(&self) -> Result<Vec<BandCholesky<Complex64>>> {
        let q = self.diff.order();
        let gram = self.diff.gram_band();
        let data = match self.formulation {
            Formulation::SingleSided => 1.0,
            Formulation::RealProjection => 0.5,
        };
        self.weights
            .iter()
            .map(|&w| {
                let mut band = HermitianBand::<Complex64>::zeros(self.n_samples, q);
                for (k, g) in gram.iter().enumerate() {
                    band.add_lower(k, k, Complex64::new(data + w * w * g[0], 0.0));
                    for d in (1..=q).filter(|d| k + d < self.n_samples) {
                        band.add_lower(k + d, k, Complex64::new(w * w * g[d], 0.0));
                    }
                }
                band.cholesky()
            })
            .collect()
    }

    /// Upper bound on the infinity norm of the normal matrix.
    pub fn norm_inf_bound(&self) -> f64 {
        let q = self.diff.order() as i32;
        let wmax = self.weights.iter().copied().fold(0.0, f64::max);
        let data = match self.formulation {
            Formulation::SingleSided => self.n_orders() as f64,
            Formulation::RealProjection => 2.0 * self.n_orders() as f64,
        };
        data + wmax * wmax * 4f64.powi(q)
    }
}

/// Relative residual and normwise backward error of `a` for `M a = b`.
pub(crate) fn residual_stats(
    system: &NormalSystem,
    a: &[Complex64],
    rhs: &[Complex64],
) -> (f64, f64) {
    let ma = system.apply_normal(a);
    let res = norm(ma.iter().zip(rhs).map(|(x, y)| x - y));
    let rhs_norm = norm(rhs.iter().copied());
    let a_norm = norm(a.iter().copied());
    let relative = if rhs_norm > 0.0 {
        res / rhs_norm
    } else if res == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let denom = system.norm_inf_bound() * a_norm + rhs_norm;
    let backward = if denom > 0.0 { res / denom } else { 0.0 };
    (relative, backward)
}

pub(crate) fn norm(v: impl Iterator<Item = Complex64>) -> f64 {
    v.map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vkf::phase::build_phase;
    use crate::vkf::types::FrequencyTrack;

    fn system(n: usize, freqs: &[f64], weights: &[f64], q: usize, f: Formulation) -> NormalSystem {
        let phases: Vec<_> = freqs
            .iter()
            .map(|&fr| build_phase(&FrequencyTrack::constant(fr, n).unwrap(), 1000.0).unwrap())
            .collect();
        NormalSystem::new(&phases, weights, q, f).unwrap()
    }

    fn probe(dim: usize) -> Vec<Complex64> {
        (0..dim)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect()
    }

    #[test]
    fn single_sided_band_agrees_with_factored_operator() {
        let sys = system(40, &[50.0, 120.0, 131.0], &[3.0, 10.0, 0.5], 2, Formulation::SingleSided);
        let a = probe(sys.dim());
        let lhs = sys.assemble_single_sided().mul_vec(&a);
        for (x, y) in lhs.iter().zip(sys.apply_normal(&a)) {
            assert!((x - y).norm() < 1e-10 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn real_band_agrees_with_factored_operator() {
        let sys = system(40, &[50.0, 120.0], &[3.0, 0.5], 3, Formulation::RealProjection);
        let a = probe(sys.dim());
        let flat: Vec<f64> = a.iter().flat_map(|c| [c.re, c.im]).collect();
        let lhs = sys.assemble_real_projection().mul_vec(&flat);
        for (pair, y) in lhs.chunks_exact(2).zip(sys.apply_normal(&a)) {
            assert!((Complex64::new(pair[0], pair[1]) - y).norm() < 1e-10 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn single_sided_diagonal_is_real_and_at_least_one() {
        let sys = system(30, &[10.0, 80.0], &[1e3, 1e4], 3, Formulation::SingleSided);
        let band = sys.assemble_single_sided();
        assert_eq!(band.max_diagonal_imag(), 0.0);
        assert!(band.diagonal().iter().all(|d| d.re >= 1.0 - 1e-15));
    }

    #[test]
    fn single_sided_matrix_is_hermitian() {
        let sys = system(25, &[33.0, 71.0], &[2.0, 5.0], 2, Formulation::SingleSided);
        let band = sys.assemble_single_sided();
        for i in 0..sys.dim() {
            for j in 0..sys.dim() {
                assert_eq!(band.get(i, j), band.get(j, i).conj());
            }
        }
    }

    #[test]
    fn norm_bound_dominates_actual_norm() {
        let s = system(50, &[20.0, 40.0, 60.0], &[7.0, 70.0, 700.0], 3, Formulation::SingleSided);
        assert!(s.assemble_single_sided().norm_inf() <= s.norm_inf_bound() * (1.0 + 1e-12));
        let r = system(50, &[20.0, 40.0, 60.0], &[7.0, 70.0, 700.0], 3, Formulation::RealProjection);
        assert!(r.assemble_real_projection().norm_inf() <= r.norm_inf_bound() * (1.0 + 1e-12));
    }

    #[test]
    fn observability_flags_invisible_envelopes() {
        assert!(matches!(
            system(200, &[0.0], &[1e4], 2, Formulation::RealProjection).check_observable(),
            Err(VkfError::Unobservable { order: 0, .. })
        ));
        // The complex model sees the imaginary part even at zero frequency.
        assert!(system(200, &[0.0], &[1e4], 2, Formulation::SingleSided).check_observable().is_ok());
        // Identical tracks leave the difference of the two envelopes unpinned.
        assert!(matches!(
            system(200, &[30.0, 55.0, 55.0], &[1.0; 3], 1, Formulation::RealProjection)
                .check_observable(),
            Err(VkfError::Unobservable { order: 2, .. })
        ));
        assert!(system(200, &[30.0, 55.0, 80.0], &[1.0; 3], 3, Formulation::RealProjection)
            .check_observable()
            .is_ok());
    }

    #[test]
    fn zero_frequency_projection_is_singular_and_located() {
        let sys = system(20, &[0.0], &[1.0], 2, Formulation::RealProjection);
        match sys.solve_direct(&sys.rhs(&[1.0; 20])) {
            Err(VkfError::Factorization { order, .. }) => assert_eq!(order, Some(0)),
            other => panic!("expected factorization failure, got {other:?}"),
        }
    }
}
