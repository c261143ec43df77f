//! Three-component non-stationary validation record.
//!
//! Each component is `a_n(t)·cos(φ_n[k] + p_n(t))` where `φ_n` is the discrete
//! running integral of `2π·f_n` produced by [`build_phase`], so a filter fed the
//! same frequency tracks sees carriers identical to the generator's.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laws::Law;
use super::noise::gaussian_noise;
use crate::error::{Result, VkfError};
use crate::vkf::{build_phase, ComplexEnvelope, Decomposition, FrequencyTrack, PhaseTrack, SampledSignal};

pub const VALIDATION_SAMPLE_RATE: f64 = 12_000.0;
pub const VALIDATION_NOISE_SIGMA: f64 = 0.75;
pub const VALIDATION_DURATION: f64 = 50.0;

/// Amplitude, frequency and phase-offset laws of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticComponentSpec {
    pub amplitude: Law,
    pub frequency: Law,
    pub phase: Law,
}

/// The three reference components: a linearly growing amplitude on a
/// cosine-swept carrier, a modulated amplitude on a slower sweep, and a
/// stationary 500 Hz tone.
pub fn validation_components() -> [SyntheticComponentSpec; 3] {
    [
        SyntheticComponentSpec {
            amplitude: Law::Linear { offset: 1.0, slope: 0.02 },
            frequency: Law::Cosine { offset: 600.0, amplitude: 120.0, freq: 0.03 },
            phase: Law::Linear { offset: -2.0, slope: 0.06 },
        },
        SyntheticComponentSpec {
            amplitude: Law::SinCos { offset: 1.0, amplitude: 0.5, sin_freq: 0.02, cos_freq: 0.04 },
            frequency: Law::Cosine { offset: 240.0, amplitude: -120.0, freq: 0.01 },
            phase: Law::Constant { value: 0.0 },
        },
        SyntheticComponentSpec {
            amplitude: Law::Constant { value: 1.0 },
            frequency: Law::Constant { value: 500.0 },
            phase: Law::Constant { value: -1.0 },
        },
    ]
}

/// Ground truth for one generated component.
#[derive(Debug, Clone)]
pub struct ComponentTruth {
    pub spec: SyntheticComponentSpec,
    /// The component signal `X_n`.
    pub signal: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub frequency: FrequencyTrack,
    /// Phase offset `p_n(t)` (not including the carrier).
    pub phase_offset: Vec<f64>,
    pub carrier_phase: PhaseTrack,
}

impl ComponentTruth {
    /// `a_n·e^{j·p_n}`, the envelope a perfect filter would return.
    pub fn envelope(&self) -> ComplexEnvelope {
        ComplexEnvelope::new(
            self.amplitude
                .iter()
                .zip(&self.phase_offset)
                .map(|(&a, &p)| Complex64::from_polar(a, p))
                .collect(),
        )
        .expect("finite laws")
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSignal {
    pub signal: SampledSignal,
    pub components: Vec<ComponentTruth>,
    pub noise: Vec<f64>,
    pub seed: u64,
    pub noise_sigma: f64,
}

impl SyntheticSignal {
    /// Sum of all components without noise.
    pub fn clean(&self) -> Vec<f64> {
        let n = self.signal.len();
        let mut x = vec![0.0; n];
        for c in &self.components {
            for (xi, v) in x.iter_mut().zip(&c.signal) {
                *xi += v;
            }
        }
        x
    }

    pub fn frequency_tracks(&self) -> Vec<FrequencyTrack> {
        self.components.iter().map(|c| c.frequency.clone()).collect()
    }
}

/// Generates the reference validation record.
pub fn generate_validation_signal(
    duration: f64,
    sample_rate: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<SyntheticSignal> {
    generate_synthetic(&validation_components(), duration, sample_rate, noise_sigma, seed)
}

/// Generates `Σ_n a_n·cos(φ_n + p_n) + η` for arbitrary component laws.
pub fn generate_synthetic(
    specs: &[SyntheticComponentSpec],
    duration: f64,
    sample_rate: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<SyntheticSignal> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(VkfError::InvalidInput(format!("duration must be positive, got {duration}")));
    }
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(VkfError::InvalidInput(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    let n = (duration * sample_rate).round() as usize;
    if n == 0 {
        return Err(VkfError::InvalidInput("duration shorter than one sample".into()));
    }

    let mut components = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let freqs = spec.frequency.sample(n, sample_rate);
        let frequency = FrequencyTrack::new(freqs).map_err(|e| match e {
            VkfError::InvalidInput(msg) => VkfError::InvalidInput(format!("component {}: {msg}", i + 1)),
            other => other,
        })?;
        let carrier_phase = build_phase(&frequency, sample_rate).map_err(|e| match e {
            VkfError::Aliasing { freq, index, time, nyquist, .. } => VkfError::Aliasing {
                what: format!("component {}", i + 1),
                freq,
                index,
                time,
                nyquist,
            },
            other => other,
        })?;
        let amplitude = spec.amplitude.sample(n, sample_rate);
        let phase_offset = spec.phase.sample(n, sample_rate);
        let signal = amplitude
            .iter()
            .zip(carrier_phase.phases())
            .zip(&phase_offset)
            .map(|((&a, &phi), &p)| a * (phi + p).cos())
            .collect();
        components.push(ComponentTruth {
            spec: *spec,
            signal,
            amplitude,
            frequency,
            phase_offset,
            carrier_phase,
        });
    }

    let noise = gaussian_noise(n, noise_sigma, seed)?;
    let mut y = vec![0.0; n];
    for c in &components {
        for (yi, v) in y.iter_mut().zip(&c.signal) {
            *yi += v;
        }
    }
    for (yi, e) in y.iter_mut().zip(&noise) {
        *yi += e;
    }
    Ok(SyntheticSignal {
        signal: SampledSignal::new(y, sample_rate)?,
        components,
        noise,
        seed,
        noise_sigma,
    })
}

/// Agreement between a decomposition and the generator's truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationScore {
    /// Envelope-magnitude RMSE per component.
    pub magnitude_rmse: Vec<f64>,
    /// Unwrapped-phase RMSE per component, over samples with `a_n ≥ min_amplitude`.
    pub phase_rmse: Vec<f64>,
    /// Correlation of the summed components with the noise-free signal.
    pub correlation: f64,
    pub evaluated_samples: usize,
}

/// Scores `decomposition` against `truth`, ignoring `trim` samples at each end.
///
/// The estimated phase is aligned to the truth by the multiple of 2π closest
/// to their mean difference.
pub fn score_decomposition(
    truth: &SyntheticSignal,
    decomposition: &Decomposition,
    trim: usize,
    min_amplitude: f64,
) -> Result<ValidationScore> {
    let n = truth.signal.len();
    if 2 * trim >= n {
        return Err(VkfError::InvalidInput(format!("trim {trim} leaves no samples of {n}")));
    }
    if decomposition.envelopes.len() != truth.components.len() {
        return Err(VkfError::LengthMismatch {
            what: "decomposed orders".into(),
            expected: truth.components.len(),
            got: decomposition.envelopes.len(),
        });
    }
    let range = trim..n - trim;
    let mut magnitude_rmse = Vec::new();
    let mut phase_rmse = Vec::new();
    for (c, env) in truth.components.iter().zip(&decomposition.envelopes) {
        let mag = env.magnitudes();
        magnitude_rmse.push(rms(range.clone().map(|k| mag[k] - c.amplitude[k])));

        let est = env.unwrapped_phase();
        let keep: Vec<usize> = range.clone().filter(|&k| c.amplitude[k] >= min_amplitude).collect();
        if keep.is_empty() {
            phase_rmse.push(f64::NAN);
            continue;
        }
        let offset = keep.iter().map(|&k| est[k] - c.phase_offset[k]).sum::<f64>() / keep.len() as f64;
        let wraps = (offset / std::f64::consts::TAU).round() * std::f64::consts::TAU;
        phase_rmse.push(rms(keep.iter().map(|&k| est[k] - wraps - c.phase_offset[k])));
    }
    let filtered = decomposition.filtered();
    let clean = truth.clean();
    Ok(ValidationScore {
        magnitude_rmse,
        phase_rmse,
        correlation: correlation(&filtered[range.clone()], &clean[range.clone()]),
        evaluated_samples: range.len(),
    })
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v * v, c + 1));
    (sum / count.max(1) as f64).sqrt()
}

/// Pearson correlation coefficient.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}
