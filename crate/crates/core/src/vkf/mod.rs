//! Vold-Kalman order-tracking filter.
//!
//! Given a real record `y[k]` and instantaneous-frequency tracks `f_n[k]`, the
//! filter estimates slowly varying complex envelopes `A_n[k]` such that
//! `y[k] ≈ Σ_n Re(A_n[k]·e^{jφ_n[k]})`, where `φ_n` is the integrated track. The
//! estimate minimizes the data misfit plus `Σ_n r_n²·‖∇^q A_n‖²`, a penalty on the
//! `q`-th finite difference of each envelope.

pub mod banded;
pub mod binning;
pub mod difference;
mod iterative;
pub mod phase;
pub mod solve;
pub mod system;
pub mod types;
pub mod weight;

pub use binning::{blend_plan, blend_weights, bin_layout, solve_long, BinSpan, Segment};
pub use difference::{build_difference_matrix, difference_coefficients, DifferenceMatrix};
pub use phase::{build_carrier, build_phase, build_phase_for, reconstruct_component};
pub use solve::{edge_samples, solve_block};
pub use system::{Formulation, NormalSystem};
pub use types::{
    unwrap_phase, ComplexEnvelope, Decomposition, FrequencyTrack, OrderSpec, PhaseTrack,
    SampledSignal, SolveStats, Solver, VkfConfig, Warning,
};
pub use weight::{bandwidth_for_weight, envelope_response, weight_for_bandwidth, DEFAULT_WEIGHT};
