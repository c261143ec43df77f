//! Preconditioned conjugate gradients on the normal equations.
//!
//! The preconditioner keeps each order's data diagonal and smoothness penalty
//! and drops the carrier cross products, which oscillate at the difference of
//! two order frequencies (or twice one frequency in the real projection).

use num_complex::Complex64;

use super::system::{norm, NormalSystem};
use crate::error::Result;

pub(crate) struct PcgOutcome {
    pub solution: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Real inner product `Re⟨a, b⟩`, under which the normal operator is
/// self-adjoint for both formulations.
fn dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Solves `M a = Cᴴy`.
///
/// Stops once the normwise backward error of the true residual drops to
/// `tolerance`, or after `max_iterations`.
pub(crate) fn pcg(
    system: &NormalSystem,
    rhs: &[Complex64],
    tolerance: f64,
    max_iterations: usize,
) -> Result<PcgOutcome> {
    let s = system.n_orders();
    let blocks = system.block_preconditioner()?;
    let precondition = |r: &[Complex64]| -> Vec<Complex64> {
        let mut z = vec![Complex64::new(0.0, 0.0); r.len()];
        for (n, block) in blocks.iter().enumerate() {
            for (k, v) in block.solve(&system.order_slice(r, n)).into_iter().enumerate() {
                z[k * s + n] = v;
            }
        }
        z
    };
    let norm_bound = system.norm_inf_bound();
    let rhs_norm = norm(rhs.iter().copied());
    let backward = |r: &[Complex64], x: &[Complex64]| {
        norm(r.iter().copied()) / (norm_bound * norm(x.iter().copied()) + rhs_norm)
    };

    let mut x = vec![Complex64::new(0.0, 0.0); rhs.len()];
    if rhs_norm == 0.0 {
        return Ok(PcgOutcome { solution: x, iterations: 0, converged: true });
    }
    let mut r = rhs.to_vec();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);

    for it in 1..=max_iterations {
        let mp = system.apply_normal(&p);
        let pmp = dot(&p, &mp);
        if !(pmp > 0.0) {
            break;
        }
        let alpha = rz / pmp;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += pi * alpha;
        }
        for (ri, qi) in r.iter_mut().zip(&mp) {
            *ri -= qi * alpha;
        }
        if backward(&r, &x) <= tolerance {
            // The recursive residual drifts; confirm against the true one and
            // restart from it if they disagree.
            let mx = system.apply_normal(&x);
            r = rhs.iter().zip(&mx).map(|(b, m)| b - m).collect();
            if backward(&r, &x) <= tolerance {
                return Ok(PcgOutcome { solution: x, iterations: it, converged: true });
            }
            z = precondition(&r);
            p = z.clone();
            rz = dot(&r, &z);
            continue;
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + *pi * beta;
        }
    }
    Ok(PcgOutcome { solution: x, iterations: max_iterations, converged: false })
}
