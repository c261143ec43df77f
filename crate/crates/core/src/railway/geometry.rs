use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Result, VkfError};
use crate::vkf::FrequencyTrack;

pub const DEFAULT_WHEEL_DIAMETER: f64 = 0.92;
pub const DEFAULT_SLEEPER_SPACING: f64 = 0.6;

/// Vehicle speed in m/s, one value per signal sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedProfile {
    speeds: Vec<f64>,
    sample_rate: f64,
}

impl SpeedProfile {
    pub fn new(speeds: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(VkfError::InvalidInput(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        check_finite("speed", &speeds)?;
        if let Some(k) = speeds.iter().position(|&v| v < 0.0) {
            return Err(VkfError::InvalidInput(format!(
                "speed must be non-negative, got {} at sample {k}",
                speeds[k]
            )));
        }
        Ok(Self { speeds, sample_rate })
    }

    pub fn constant(speed: f64, len: usize, sample_rate: f64) -> Result<Self> {
        Self::new(vec![speed; len], sample_rate)
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds.is_empty()
    }

    /// Travelled distance `s[k] = Σ_{i=1..k} v[i]/fs`, with `s[0] = 0`.
    ///
    /// Uses the same rectangle rule as the carrier phase, so `2·s[k]/d_w`
    /// equals the first wheel order's phase up to rounding.
    pub fn distance(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.speeds.len());
        let mut acc = 0.0;
        for (k, &v) in self.speeds.iter().enumerate() {
            if k > 0 {
                acc += v / self.sample_rate;
            }
            s.push(acc);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WheelGeometry {
    pub diameter: f64,
}

impl WheelGeometry {
    pub fn new(diameter: f64) -> Result<Self> {
        if !(diameter > 0.0 && diameter.is_finite()) {
            return Err(VkfError::InvalidInput(format!(
                "wheel diameter must be positive, got {diameter}"
            )));
        }
        Ok(Self { diameter })
    }

    pub fn circumference(&self) -> f64 {
        PI * self.diameter
    }

    pub fn mean_radius(&self) -> f64 {
        0.5 * self.diameter
    }
}

impl Default for WheelGeometry {
    fn default() -> Self {
        Self { diameter: DEFAULT_WHEEL_DIAMETER }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackGeometry {
    pub sleeper_spacing: f64,
}

impl TrackGeometry {
    pub fn new(sleeper_spacing: f64) -> Result<Self> {
        if !(sleeper_spacing > 0.0 && sleeper_spacing.is_finite()) {
            return Err(VkfError::InvalidInput(format!(
                "sleeper spacing must be positive, got {sleeper_spacing}"
            )));
        }
        Ok(Self { sleeper_spacing })
    }
}

impl Default for TrackGeometry {
    fn default() -> Self {
        Self { sleeper_spacing: DEFAULT_SLEEPER_SPACING }
    }
}

/// Rotation rate `v/(π·d_w)` in Hz.
fn rotation_rate(v: f64, geom: &WheelGeometry) -> f64 {
    v / geom.circumference()
}

/// Frequency of wheel order `ℓ`: `ℓ·v/(π·d_w)`.
pub fn wheel_order_track(
    speed: &SpeedProfile,
    order: usize,
    geom: &WheelGeometry,
) -> Result<FrequencyTrack> {
    if order == 0 {
        return Err(VkfError::InvalidInput("wheel order must be at least 1".into()));
    }
    let l = order as f64;
    FrequencyTrack::new(
        speed
            .speeds
            .iter()
            .map(|&v| l * rotation_rate(v, geom))
            .collect(),
    )
}

/// Sleeper-passage frequency `f_w[1]·π·d_w/d_s`, i.e. `v/d_s`.
pub fn sleeper_track(
    speed: &SpeedProfile,
    geom: &WheelGeometry,
    track: &TrackGeometry,
) -> Result<FrequencyTrack> {
    let first = wheel_order_track(speed, 1, geom)?;
    FrequencyTrack::new(
        first
            .freqs()
            .iter()
            .map(|&f| f * PI * geom.diameter / track.sleeper_spacing)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(v: f64) -> SpeedProfile {
        SpeedProfile::constant(v, 8, 1000.0).unwrap()
    }

    #[test]
    fn zero_speed_gives_zero_tracks() {
        let g = WheelGeometry::default();
        let t = TrackGeometry::default();
        assert!(wheel_order_track(&profile(0.0), 3, &g).unwrap().freqs().iter().all(|&f| f == 0.0));
        assert!(sleeper_track(&profile(0.0), &g, &t).unwrap().freqs().iter().all(|&f| f == 0.0));
    }

    #[test]
    fn one_revolution_per_second() {
        let f = wheel_order_track(&profile(PI * 0.92), 1, &WheelGeometry::default()).unwrap();
        assert!((f.freqs()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eleventh_order_at_200_kmh() {
        let f = wheel_order_track(&profile(55.56), 11, &WheelGeometry::default()).unwrap();
        assert!((f.freqs()[0] - 211.4).abs() < 0.1, "{}", f.freqs()[0]);
    }

    #[test]
    fn sleeper_frequency_at_200_kmh() {
        let f = sleeper_track(&profile(55.56), &WheelGeometry::default(), &TrackGeometry::default())
            .unwrap();
        assert!((f.freqs()[0] - 92.6).abs() < 1e-9);
    }

    #[test]
    fn distance_integrates_speed() {
        let s = SpeedProfile::constant(2.0, 5, 10.0).unwrap().distance();
        assert_eq!(s, vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8]);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(SpeedProfile::new(vec![1.0, -0.1], 10.0).is_err());
        assert!(SpeedProfile::new(vec![f64::NAN], 10.0).is_err());
        assert!(WheelGeometry::new(0.0).is_err());
        assert!(TrackGeometry::new(-1.0).is_err());
        assert!(wheel_order_track(&profile(1.0), 0, &WheelGeometry::default()).is_err());
    }
}
