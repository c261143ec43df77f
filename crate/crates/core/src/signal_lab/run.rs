//! Phenomenological railway run: wheel out-of-roundness harmonics and a
//! sleeper-passage response whose amplitude steps across stiffness segments,
//! observed as axle-box acceleration with additive Gaussian noise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::noise::gaussian_noise;
use crate::error::{Result, VkfError};
use crate::railway::{
    sleeper_track, wheel_order_track, SpeedProfile, TrackGeometry, WheelGeometry,
};
use crate::vkf::{build_phase, reconstruct_component, ComplexEnvelope, PhaseTrack, SampledSignal};

/// Offset between the acceleration and force noise streams.
const FORCE_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpeedLaw {
    Constant { speed: f64 },
    /// Linear from `start` at t = 0 to `end` at the end of the run.
    Ramp { start: f64, end: f64 },
    /// Linear interpolation through `(time, speed)` points, held flat outside.
    Piecewise { points: Vec<(f64, f64)> },
}

impl SpeedLaw {
    fn validate(&self) -> Result<()> {
        let bad = |v: f64| !(v >= 0.0 && v.is_finite());
        match self {
            SpeedLaw::Constant { speed } if bad(*speed) => {}
            SpeedLaw::Ramp { start, end } if bad(*start) || bad(*end) => {}
            SpeedLaw::Piecewise { points } => {
                if points.is_empty() {
                    return Err(VkfError::InvalidInput("piecewise speed law has no points".into()));
                }
                if points.iter().any(|&(t, v)| !t.is_finite() || bad(v)) {
                    return Err(VkfError::InvalidInput(
                        "piecewise speed points must be finite with speed ≥ 0".into(),
                    ));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(VkfError::InvalidInput(
                        "piecewise speed times must be strictly increasing".into(),
                    ));
                }
                return Ok(());
            }
            _ => return Ok(()),
        }
        Err(VkfError::InvalidInput("speeds must be finite and ≥ 0".into()))
    }

    fn eval(&self, t: f64, duration: f64) -> f64 {
        match self {
            SpeedLaw::Constant { speed } => *speed,
            SpeedLaw::Ramp { start, end } => start + (end - start) * (t / duration),
            SpeedLaw::Piecewise { points } => {
                let i = points.partition_point(|&(pt, _)| pt <= t);
                if i == 0 {
                    points[0].1
                } else if i == points.len() {
                    points[i - 1].1
                } else {
                    let (t0, v0) = points[i - 1];
                    let (t1, v1) = points[i];
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }
}

/// One out-of-roundness harmonic; amplitude in metres of radius deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OorOrder {
    pub order: usize,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Track stretch `[start, end)` in metres with its sleeper-passage response
/// amplitude in m/s².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessSegment {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
}

impl StiffnessSegment {
    /// Splits `[0, length)` into equal contiguous segments, one per amplitude.
    pub fn split(length: f64, amplitudes: &[f64]) -> Vec<Self> {
        let m = amplitudes.len() as f64;
        amplitudes
            .iter()
            .enumerate()
            .map(|(i, &amplitude)| Self {
                start: length * i as f64 / m,
                end: length * (i + 1) as f64 / m,
                amplitude,
            })
            .collect()
    }
}

/// Wheel-rail force channel: `mass · sleeper acceleration` plus noise whose
/// standard deviation is `noise_fraction` of the clean force RMS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceChannel {
    pub unsprung_mass: f64,
    pub noise_fraction: f64,
}

impl Default for ForceChannel {
    fn default() -> Self {
        Self { unsprung_mass: 300.0, noise_fraction: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunScenario {
    pub duration: f64,
    pub speed: SpeedLaw,
    pub wheel: WheelGeometry,
    pub track: TrackGeometry,
    pub oor: Vec<OorOrder>,
    pub stiffness: Vec<StiffnessSegment>,
    pub noise_sigma: f64,
    pub force: Option<ForceChannel>,
}

impl Default for RunScenario {
    /// 20 s at 100 km/h with OOR orders 1–3 and three stiffness segments.
    fn default() -> Self {
        let duration = 20.0;
        let speed = 27.8;
        Self {
            duration,
            speed: SpeedLaw::Constant { speed },
            wheel: WheelGeometry::default(),
            track: TrackGeometry::default(),
            oor: vec![
                OorOrder { order: 1, amplitude: 200e-6, phase: 0.0 },
                OorOrder { order: 2, amplitude: 100e-6, phase: 0.0 },
                OorOrder { order: 3, amplitude: 50e-6, phase: 0.0 },
            ],
            stiffness: StiffnessSegment::split(duration * speed, &[0.5, 2.0, 1.0]),
            noise_sigma: 0.1,
            force: Some(ForceChannel::default()),
        }
    }
}

impl RunScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(VkfError::InvalidInput(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        WheelGeometry::new(self.wheel.diameter)?;
        TrackGeometry::new(self.track.sleeper_spacing)?;
        self.speed.validate()?;
        for o in &self.oor {
            if o.order == 0 || !o.amplitude.is_finite() || !o.phase.is_finite() {
                return Err(VkfError::InvalidInput(format!("invalid OOR order {o:?}")));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(VkfError::InvalidInput("noise sigma must be ≥ 0".into()));
        }
        for w in self.stiffness.windows(2) {
            if w[1].start != w[0].end {
                return Err(VkfError::InvalidInput(format!(
                    "stiffness segments must be contiguous: {} m ends where {} m starts",
                    w[0].end, w[1].start
                )));
            }
        }
        if self.stiffness.iter().any(|s| !(s.end > s.start) || !s.amplitude.is_finite()) {
            return Err(VkfError::InvalidInput(
                "stiffness segments need end > start and a finite amplitude".into(),
            ));
        }
        if let Some(f) = &self.force {
            if !(f.unsprung_mass.is_finite() && f.noise_fraction >= 0.0 && f.noise_fraction.is_finite()) {
                return Err(VkfError::InvalidInput("invalid force channel".into()));
            }
        }
        Ok(())
    }

    /// Sleeper-response amplitude at track position `s`.
    fn stiffness_at(&self, s: f64) -> Option<f64> {
        self.stiffness
            .iter()
            .find(|seg| s >= seg.start && s < seg.end)
            .or_else(|| self.stiffness.last().filter(|seg| s == seg.end))
            .map(|seg| seg.amplitude)
    }
}

#[derive(Debug, Clone)]
pub struct RunTruth {
    /// `(order, amplitude·e^{j·phase})` per OOR harmonic.
    pub oor: Vec<(usize, ComplexEnvelope)>,
    pub oor_phases: Vec<PhaseTrack>,
    pub sleeper: ComplexEnvelope,
    pub sleeper_phase: PhaseTrack,
    /// Signal before noise.
    pub clean: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub signal: SampledSignal,
    pub speed: SpeedProfile,
    pub distance: Vec<f64>,
    pub truth: RunTruth,
    pub force: Option<SampledSignal>,
    /// Clean force envelope on the sleeper carrier.
    pub force_truth: Option<ComplexEnvelope>,
}

/// Synthesizes a run; deterministic for a given scenario, rate and seed.
pub fn generate_run(scenario: &RunScenario, sample_rate: f64, seed: u64) -> Result<RunOutput> {
    scenario.validate()?;
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(VkfError::InvalidInput(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    let n = (scenario.duration * sample_rate).round() as usize;
    if n < 2 {
        return Err(VkfError::InvalidInput("run shorter than two samples".into()));
    }
    let speeds = (0..n)
        .map(|k| scenario.speed.eval(k as f64 / sample_rate, scenario.duration))
        .collect();
    let speed = SpeedProfile::new(speeds, sample_rate)?;
    let distance = speed.distance();

    let named = |what: String| {
        move |e: VkfError| match e {
            VkfError::Aliasing { freq, index, time, nyquist, .. } => {
                VkfError::Aliasing { what, freq, index, time, nyquist }
            }
            other => other,
        }
    };

    let mut clean = vec![0.0; n];
    let mut oor = Vec::with_capacity(scenario.oor.len());
    let mut oor_phases = Vec::with_capacity(scenario.oor.len());
    for o in &scenario.oor {
        let track = wheel_order_track(&speed, o.order, &scenario.wheel)?;
        let phase = build_phase(&track, sample_rate)
            .map_err(named(format!("wheel order {}", o.order)))?;
        let env = ComplexEnvelope::new(vec![Complex64::from_polar(o.amplitude, o.phase); n])?;
        for (c, v) in clean.iter_mut().zip(reconstruct_component(&env, &phase)?) {
            *c += v;
        }
        oor.push((o.order, env));
        oor_phases.push(phase);
    }

    let track = sleeper_track(&speed, &scenario.wheel, &scenario.track)?;
    let sleeper_phase =
        build_phase(&track, sample_rate).map_err(named("sleeper passage".to_string()))?;
    let sleeper_amp = distance
        .iter()
        .map(|&s| {
            if scenario.stiffness.is_empty() {
                return Ok(0.0);
            }
            scenario.stiffness_at(s).ok_or_else(|| {
                VkfError::InvalidInput(format!("stiffness segments do not cover position {s} m"))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let sleeper =
        ComplexEnvelope::new(sleeper_amp.iter().map(|&a| Complex64::new(a, 0.0)).collect())?;
    let sleeper_signal = reconstruct_component(&sleeper, &sleeper_phase)?;
    for (c, v) in clean.iter_mut().zip(&sleeper_signal) {
        *c += v;
    }

    let noise = gaussian_noise(n, scenario.noise_sigma, seed)?;
    let y: Vec<f64> = clean.iter().zip(&noise).map(|(c, e)| c + e).collect();

    let (force, force_truth) = match &scenario.force {
        None => (None, None),
        Some(ch) => {
            let m = ch.unsprung_mass;
            let clean_force: Vec<f64> = sleeper_signal.iter().map(|v| m * v).collect();
            let rms = (clean_force.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
            let fnoise =
                gaussian_noise(n, ch.noise_fraction * rms, seed.wrapping_add(FORCE_SEED_OFFSET))?;
            let f = clean_force.iter().zip(&fnoise).map(|(c, e)| c + e).collect();
            let truth =
                ComplexEnvelope::new(sleeper.values().iter().map(|v| v * m).collect())?;
            (Some(SampledSignal::new(f, sample_rate)?), Some(truth))
        }
    };

    Ok(RunOutput {
        signal: SampledSignal::new(y, sample_rate)?,
        speed,
        distance,
        truth: RunTruth { oor, oor_phases, sleeper, sleeper_phase, clean },
        force,
        force_truth,
    })
}
