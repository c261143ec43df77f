//! Mapping between smoothness weight and envelope bandwidth.
//!
//! For one order with a unit-modulus carrier, the interior of the solution is the
//! input heterodyned to baseband and passed through the zero-phase filter
//! `H(ω) = 1 / (1 + r²·(2·sin(ω/2))^{2q})`. The weight below places the −3 dB
//! point (`H = 1/√2`) at the requested offset from the carrier. The
//! `calibration` tests check this against the solver on a stationary tone.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Result, VkfError};

/// Default weight for 12 kHz records.
pub const DEFAULT_WEIGHT: f64 = 1e4;

/// Magnitude response of the envelope filter at `offset_hz` from the carrier.
pub fn envelope_response(weight: f64, offset_hz: f64, sample_rate: f64, q: usize) -> f64 {
    let x = 2.0 * (PI * offset_hz / sample_rate).sin();
    1.0 / (1.0 + weight * weight * x.powi(2 * q as i32))
}

/// Weight whose envelope filter is 3 dB down at `bandwidth_hz`.
pub fn weight_for_bandwidth(bandwidth_hz: f64, sample_rate: f64, q: usize) -> Result<f64> {
    if !(1..=3).contains(&q) {
        return Err(VkfError::UnsupportedOrder(q));
    }
    if !(bandwidth_hz > 0.0 && bandwidth_hz < 0.5 * sample_rate) {
        return Err(VkfError::InvalidInput(format!(
            "bandwidth {bandwidth_hz} Hz must lie in (0, {}) Hz",
            0.5 * sample_rate
        )));
    }
    let x = 2.0 * (PI * bandwidth_hz / sample_rate).sin();
    Ok(((SQRT_2 - 1.0) / x.powi(2 * q as i32)).sqrt())
}

/// Inverse of [`weight_for_bandwidth`].
pub fn bandwidth_for_weight(weight: f64, sample_rate: f64, q: usize) -> Result<f64> {
    if !(1..=3).contains(&q) {
        return Err(VkfError::UnsupportedOrder(q));
    }
    if !(weight > 0.0 && weight.is_finite()) {
        return Err(VkfError::InvalidInput(format!("weight must be positive, got {weight}")));
    }
    let x = ((SQRT_2 - 1.0) / (weight * weight)).powf(1.0 / (2 * q) as f64);
    if x >= 2.0 {
        return Ok(0.5 * sample_rate);
    }
    Ok(sample_rate / PI * (0.5 * x).asin())
}
