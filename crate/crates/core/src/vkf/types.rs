use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::system::Formulation;
use crate::error::{check_finite, Result, VkfError};

/// Uniformly sampled real time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(VkfError::InvalidInput(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        if samples.is_empty() {
            return Err(VkfError::InvalidInput("signal has no samples".into()));
        }
        check_finite("signal", &samples)?;
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn nyquist(&self) -> f64 {
        0.5 * self.sample_rate
    }

    /// Time stamp of sample `k` in seconds.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.sample_rate
    }

    /// Returns a copy with every sample multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.samples.iter().map(|v| v * factor).collect(),
            self.sample_rate,
        )
    }

    /// Sub-record `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.samples.len() || len == 0 {
            return Err(VkfError::InvalidInput(format!(
                "slice [{start}, {}) out of range for {} samples",
                start + len,
                self.samples.len()
            )));
        }
        Self::new(self.samples[start..start + len].to_vec(), self.sample_rate)
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Instantaneous frequency in Hz, one value per signal sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTrack {
    freqs: Vec<f64>,
}

impl FrequencyTrack {
    pub fn new(freqs: Vec<f64>) -> Result<Self> {
        check_finite("frequency track", &freqs)?;
        if let Some(index) = freqs.iter().position(|&f| f < 0.0) {
            return Err(VkfError::InvalidInput(format!(
                "frequency track is negative ({} Hz) at index {index}",
                freqs[index]
            )));
        }
        Ok(Self { freqs })
    }

    pub fn constant(freq: f64, len: usize) -> Result<Self> {
        Self::new(vec![freq; len])
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// First sample at or above `nyquist`, if any.
    pub fn first_alias(&self, nyquist: f64) -> Option<(usize, f64)> {
        self.freqs
            .iter()
            .enumerate()
            .find(|(_, &f)| f >= nyquist)
            .map(|(i, &f)| (i, f))
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        Self {
            freqs: self.freqs[start..start + len].to_vec(),
        }
    }
}

/// One order to extract: its frequency track and smoothness weight.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSpec {
    pub track: FrequencyTrack,
    pub weight: f64,
}

impl OrderSpec {
    pub fn new(track: FrequencyTrack, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(VkfError::InvalidInput(format!(
                "order weight must be positive and finite, got {weight}"
            )));
        }
        Ok(Self { track, weight })
    }
}

/// Cumulative carrier phase in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrack {
    pub(crate) phases: Vec<f64>,
}

impl PhaseTrack {
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        Self {
            phases: self.phases[start..start + len].to_vec(),
        }
    }

    pub fn from_raw(phases: Vec<f64>) -> Result<Self> {
        check_finite("phase track", &phases)?;
        Ok(Self { phases })
    }
}

/// Per-sample complex amplitude of one order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    pub(crate) values: Vec<Complex64>,
}

impl ComplexEnvelope {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(VkfError::NonFinite {
                what: "envelope".into(),
                index,
            });
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn arguments(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.arg()).collect()
    }

    /// Arguments with 2π jumps removed.
    pub fn unwrapped_phase(&self) -> Vec<f64> {
        unwrap_phase(&self.arguments())
    }
}

pub fn unwrap_phase(wrapped: &[f64]) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let mut out = Vec::with_capacity(wrapped.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in wrapped {
        if let Some(q) = prev {
            let d = p - q;
            if d > PI {
                offset -= TAU * ((d + PI) / TAU).floor();
            } else if d < -PI {
                offset += TAU * ((-d + PI) / TAU).floor();
            }
        }
        out.push(p + offset);
        prev = Some(p);
    }
    out
}

/// Linear-system backend for the regularized least-squares problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solver {
    /// Banded Hermitian Cholesky on the normal equations.
    DirectBanded { tolerance: f64 },
    /// Conjugate gradients on the normal equations, preconditioned per order.
    Iterative {
        tolerance: f64,
        max_iterations: usize,
    },
}

impl Solver {
    pub fn direct() -> Self {
        Solver::DirectBanded { tolerance: 1e-10 }
    }

    pub fn iterative() -> Self {
        Solver::Iterative {
            tolerance: 1e-13,
            max_iterations: 10_000,
        }
    }

    pub fn tolerance(&self) -> f64 {
        match *self {
            Solver::DirectBanded { tolerance } | Solver::Iterative { tolerance, .. } => tolerance,
        }
    }
}

impl Default for Solver {
    fn default() -> Self {
        Self::direct()
    }
}

/// Filter configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VkfConfig {
    /// Finite-difference order of the smoothness constraint (1, 2 or 3).
    pub diff_order: usize,
    /// Samples per bin for long records.
    pub bin_length: usize,
    /// Fraction of each bin shared with its neighbour.
    pub overlap: f64,
    pub solver: Solver,
    #[serde(default)]
    pub formulation: Formulation,
    /// Upper bound on the factor storage of a single block solve.
    pub memory_budget_bytes: usize,
}

impl Default for VkfConfig {
    fn default() -> Self {
        Self {
            diff_order: 2,
            bin_length: 16384,
            overlap: 0.5,
            solver: Solver::default(),
            formulation: Formulation::default(),
            memory_budget_bytes: 2 << 30,
        }
    }
}

impl VkfConfig {
    pub fn with_diff_order(mut self, q: usize) -> Self {
        self.diff_order = q;
        self
    }

    pub fn with_bins(mut self, bin_length: usize, overlap: f64) -> Self {
        self.bin_length = bin_length;
        self.overlap = overlap;
        self
    }

    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_formulation(mut self, formulation: Formulation) -> Self {
        self.formulation = formulation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.diff_order) {
            return Err(VkfError::UnsupportedOrder(self.diff_order));
        }
        if self.bin_length <= 4 * self.diff_order {
            return Err(VkfError::InvalidConfig(format!(
                "bin length {} must exceed 4 x difference order ({})",
                self.bin_length,
                4 * self.diff_order
            )));
        }
        if !(self.overlap > 0.0 && self.overlap < 1.0) {
            return Err(VkfError::InvalidConfig(format!(
                "overlap must lie in (0, 1), got {}",
                self.overlap
            )));
        }
        if self.overlap * (self.bin_length as f64) < 2.0 {
            return Err(VkfError::InvalidConfig(format!(
                "overlap of {} x {} samples is shorter than 2 samples",
                self.overlap, self.bin_length
            )));
        }
        let tol = self.solver.tolerance();
        if !(tol.is_finite() && tol > 0.0) {
            return Err(VkfError::InvalidConfig(format!(
                "solver tolerance must be positive, got {tol}"
            )));
        }
        if let Solver::Iterative { max_iterations, .. } = self.solver {
            if max_iterations == 0 {
                return Err(VkfError::InvalidConfig("max_iterations must be > 0".into()));
            }
        }
        Ok(())
    }
}

/// Accuracy figures of one linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// `‖M a − Cᴴy‖ / ‖Cᴴy‖` for the normal operator `M`, evaluated through the
    /// factors. Bounded below by roughly `ε·r²·4^q`, so it is reported only.
    pub relative_residual: f64,
    /// Normwise backward error `‖M a − Cᴴy‖ / (‖M‖ ‖a‖ + ‖Cᴴy‖)`; this is the
    /// figure checked against the solver tolerance.
    pub backward_error: f64,
    /// Iterations for the iterative backend, 0 for the direct one.
    pub iterations: usize,
}

/// Conditions worth surfacing to the caller without failing the solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Two orders stay within 1 Hz of each other for more than 1% of the record.
    CoincidentTracks {
        first: usize,
        second: usize,
        fraction: f64,
    },
}

/// Result of a filter run.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub envelopes: Vec<ComplexEnvelope>,
    pub phases: Vec<PhaseTrack>,
    /// Reconstructed real order signals.
    pub components: Vec<Vec<f64>>,
    /// Input minus the sum of components.
    pub residual: Vec<f64>,
    /// One entry per solved bin.
    pub stats: Vec<SolveStats>,
    pub warnings: Vec<Warning>,
    /// Samples at the record edges whose envelope estimate is weakly constrained.
    pub low_confidence: Vec<usize>,
}

impl Decomposition {
    /// Sum of all reconstructed components.
    pub fn filtered(&self) -> Vec<f64> {
        let n = self.residual.len();
        let mut out = vec![0.0; n];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c) {
                *o += v;
            }
        }
        out
    }

    pub fn worst_stats(&self) -> Option<SolveStats> {
        self.stats.iter().copied().reduce(|a, b| SolveStats {
            relative_residual: a.relative_residual.max(b.relative_residual),
            backward_error: a.backward_error.max(b.backward_error),
            iterations: a.iterations.max(b.iterations),
        })
    }
}
