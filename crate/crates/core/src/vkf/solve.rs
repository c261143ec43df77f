use num_complex::Complex64;

use super::iterative::pcg;
use super::phase::{build_phase_for, reconstruct_component};
use super::system::{residual_stats, NormalSystem};
use super::types::{
    ComplexEnvelope, Decomposition, OrderSpec, PhaseTrack, SampledSignal, SolveStats, Solver,
    VkfConfig, Warning,
};
use crate::error::{Result, VkfError};

/// Tracks closer than this (Hz) count as coincident.
const COINCIDENT_HZ: f64 = 1.0;
/// Fraction of samples two tracks may coincide before a warning is raised.
const COINCIDENT_FRACTION: f64 = 0.01;

/// Solves the whole record as one regularized least-squares problem.
pub fn solve_block(
    y: &SampledSignal,
    orders: &[OrderSpec],
    config: &VkfConfig,
) -> Result<Decomposition> {
    config.validate()?;
    let phases = order_phases(y, orders)?;
    let weights: Vec<f64> = orders.iter().map(|o| o.weight).collect();
    let (envelopes, stats) = solve_phased(y.samples(), &phases, &weights, config)?;
    let warnings = coincident_tracks(orders);
    assemble_decomposition(y.samples(), envelopes, phases, vec![stats], warnings, config)
}

pub(crate) fn order_phases(y: &SampledSignal, orders: &[OrderSpec]) -> Result<Vec<PhaseTrack>> {
    if orders.is_empty() {
        return Err(VkfError::InvalidInput("at least one order is required".into()));
    }
    orders
        .iter()
        .map(|o| build_phase_for(&o.track, y.sample_rate(), y.len()))
        .collect()
}

/// Factor storage (direct) or work vectors (iterative) for one block.
pub(crate) fn memory_needed(n_samples: usize, n_orders: usize, config: &VkfConfig) -> usize {
    match config.solver {
        // Assembled band plus its factor.
        Solver::DirectBanded { .. } => NormalSystem::band_bytes(
            n_samples,
            n_orders,
            config.diff_order,
            config.formulation,
        )
        .saturating_mul(2),
        // Work vectors plus the per-order preconditioner factors.
        Solver::Iterative { .. } => n_samples
            .saturating_mul(n_orders)
            .saturating_mul(16 * (8 + config.diff_order + 1)),
    }
}

/// Core solve on pre-built phase tracks; returns scaled envelopes and accuracy.
pub(crate) fn solve_phased(
    y: &[f64],
    phases: &[PhaseTrack],
    weights: &[f64],
    config: &VkfConfig,
) -> Result<(Vec<ComplexEnvelope>, SolveStats)> {
    let n = y.len();
    let q = config.diff_order;
    if n <= q {
        return Err(VkfError::InvalidInput(format!(
            "record of {n} samples is too short for difference order {q}"
        )));
    }
    let needed = memory_needed(n, phases.len(), config);
    if needed > config.memory_budget_bytes {
        return Err(VkfError::MemoryBudget {
            unknowns: n * phases.len(),
            needed,
            budget: config.memory_budget_bytes,
        });
    }
    let system = NormalSystem::new(phases, weights, q, config.formulation)?;
    system.check_observable()?;
    let rhs = system.rhs(y);

    let (solution, iterations) = match config.solver {
        Solver::DirectBanded { tolerance } => {
            let a = system.solve_direct(&rhs)?;
            let (relative, backward) = residual_stats(&system, &a, &rhs);
            if !(backward <= tolerance) {
                return Err(VkfError::NotConverged {
                    tolerance,
                    backward_error: backward,
                    iterations: 0,
                });
            }
            return finish(&system, a, relative, backward, 0);
        }
        Solver::Iterative {
            tolerance,
            max_iterations,
        } => {
            let out = pcg(&system, &rhs, tolerance, max_iterations)?;
            if !out.converged {
                let (_, backward) = residual_stats(&system, &out.solution, &rhs);
                return Err(VkfError::NotConverged {
                    tolerance,
                    backward_error: backward,
                    iterations: out.iterations,
                });
            }
            (out.solution, out.iterations)
        }
    };
    let (relative, backward) = residual_stats(&system, &solution, &rhs);
    finish(&system, solution, relative, backward, iterations)
}

fn finish(
    system: &NormalSystem,
    solution: Vec<Complex64>,
    relative: f64,
    backward: f64,
    iterations: usize,
) -> Result<(Vec<ComplexEnvelope>, SolveStats)> {
    let gain = system.formulation().envelope_gain();
    let envelopes = (0..system.n_orders())
        .map(|n| {
            ComplexEnvelope::new(
                system
                    .order_slice(&solution, n)
                    .into_iter()
                    .map(|v| v * gain)
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        envelopes,
        SolveStats {
            relative_residual: relative,
            backward_error: backward,
            iterations,
        },
    ))
}

pub(crate) fn assemble_decomposition(
    samples: &[f64],
    envelopes: Vec<ComplexEnvelope>,
    phases: Vec<PhaseTrack>,
    stats: Vec<SolveStats>,
    warnings: Vec<Warning>,
    config: &VkfConfig,
) -> Result<Decomposition> {
    let components = envelopes
        .iter()
        .zip(&phases)
        .map(|(e, p)| reconstruct_component(e, p))
        .collect::<Result<Vec<_>>>()?;
    let mut residual = samples.to_vec();
    for c in &components {
        for (r, v) in residual.iter_mut().zip(c) {
            *r -= v;
        }
    }
    Ok(Decomposition {
        envelopes,
        phases,
        components,
        residual,
        stats,
        warnings,
        low_confidence: edge_samples(samples.len(), config.diff_order),
    })
}

/// The first and last `q` sample indices of a record.
pub fn edge_samples(n: usize, q: usize) -> Vec<usize> {
    if n <= 2 * q {
        return (0..n).collect();
    }
    (0..q).chain(n - q..n).collect()
}

pub(crate) fn coincident_tracks(orders: &[OrderSpec]) -> Vec<Warning> {
    let mut out = Vec::new();
    for i in 0..orders.len() {
        for j in (i + 1)..orders.len() {
            let a = orders[i].track.freqs();
            let b = orders[j].track.freqs();
            if a.is_empty() {
                continue;
            }
            let close = a
                .iter()
                .zip(b)
                .filter(|(x, y)| (*x - *y).abs() < COINCIDENT_HZ)
                .count();
            let fraction = close as f64 / a.len() as f64;
            if fraction > COINCIDENT_FRACTION {
                log::warn!(
                    "orders {i} and {j} stay within {COINCIDENT_HZ} Hz for {:.1}% of samples",
                    100.0 * fraction
                );
                out.push(Warning::CoincidentTracks {
                    first: i,
                    second: j,
                    fraction,
                });
            }
        }
    }
    out
}
