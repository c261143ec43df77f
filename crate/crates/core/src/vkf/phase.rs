//! Carrier phase, carrier phasors and the real projection of an order.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::types::{ComplexEnvelope, FrequencyTrack, PhaseTrack};
use crate::error::{check_len, Result, VkfError};

/// Integrates an instantaneous-frequency track into a carrier phase.
///
/// `phase[0] = 0` and `phase[k] = phase[k-1] + 2π·freqs[k]/sample_rate`, i.e. the
/// running sum over samples `1..=k`.
pub fn build_phase(track: &FrequencyTrack, sample_rate: f64) -> Result<PhaseTrack> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(VkfError::InvalidInput(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    let nyquist = 0.5 * sample_rate;
    if let Some((index, freq)) = track.first_alias(nyquist) {
        return Err(VkfError::Aliasing {
            what: "frequency track".into(),
            freq,
            index,
            time: index as f64 / sample_rate,
            nyquist,
        });
    }
    let freqs = track.freqs();
    let mut phases = Vec::with_capacity(freqs.len());
    let mut acc = 0.0;
    for (k, &f) in freqs.iter().enumerate() {
        if k > 0 {
            acc += TAU * f / sample_rate;
        }
        phases.push(acc);
    }
    Ok(PhaseTrack { phases })
}

/// [`build_phase`] with a check that the track matches the signal length.
pub fn build_phase_for(
    track: &FrequencyTrack,
    sample_rate: f64,
    n_samples: usize,
) -> Result<PhaseTrack> {
    check_len("frequency track", n_samples, track.len())?;
    build_phase(track, sample_rate)
}

/// Unit-modulus carrier `e^{jφ[k]}`; the diagonal of one carrier block.
pub fn build_carrier(phase: &PhaseTrack) -> Vec<Complex64> {
    phase
        .phases
        .iter()
        .map(|&p| Complex64::new(p.cos(), p.sin()))
        .collect()
}

/// `Re(A[k]·e^{jφ[k]})`.
pub fn reconstruct_component(envelope: &ComplexEnvelope, phase: &PhaseTrack) -> Result<Vec<f64>> {
    check_len("phase track", envelope.len(), phase.len())?;
    Ok(envelope
        .values
        .iter()
        .zip(&phase.phases)
        .map(|(a, &p)| a.re * p.cos() - a.im * p.sin())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_frequency_gives_zero_phase() {
        let track = FrequencyTrack::constant(0.0, 64).unwrap();
        let phase = build_phase(&track, 8000.0).unwrap();
        assert!(phase.phases().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn constant_100hz_at_1khz_reaches_pi_after_five_steps() {
        let track = FrequencyTrack::constant(100.0, 10).unwrap();
        let phase = build_phase(&track, 1000.0).unwrap();
        assert!((phase.phases()[5] - PI).abs() < 1e-12);
        assert_eq!(phase.len(), 10);
    }

    #[test]
    fn nyquist_is_rejected() {
        let mut f = vec![10.0; 20];
        f[7] = 500.0;
        let track = FrequencyTrack::new(f).unwrap();
        match build_phase(&track, 1000.0) {
            Err(VkfError::Aliasing { index, .. }) => assert_eq!(index, 7),
            other => panic!("expected aliasing error, got {other:?}"),
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let track = FrequencyTrack::constant(10.0, 20).unwrap();
        assert!(matches!(
            build_phase_for(&track, 1000.0, 21),
            Err(VkfError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn carrier_identity_and_sign() {
        let zero = PhaseTrack::from_raw(vec![0.0; 4]).unwrap();
        assert!(build_carrier(&zero)
            .iter()
            .all(|c| *c == Complex64::new(1.0, 0.0)));
        let half = PhaseTrack::from_raw(vec![PI]).unwrap();
        let c = build_carrier(&half)[0];
        assert!((c - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn carrier_500hz_at_12khz_has_period_24() {
        let track = FrequencyTrack::constant(500.0, 200).unwrap();
        let carrier = build_carrier(&build_phase(&track, 12_000.0).unwrap());
        for k in 0..(200 - 24) {
            assert!((carrier[k] - carrier[k + 24]).norm() < 1e-12);
            assert!((carrier[k].norm() - 1.0).abs() < 1e-15);
        }
        // No shorter period divides 24 for this carrier.
        assert!((carrier[0] - carrier[12]).norm() > 1.0);
    }

    #[test]
    fn projection_of_real_and_imaginary_envelopes() {
        let phase = PhaseTrack::from_raw(vec![0.0; 5]).unwrap();
        let ones = ComplexEnvelope::new(vec![Complex64::new(1.0, 0.0); 5]).unwrap();
        assert_eq!(reconstruct_component(&ones, &phase).unwrap(), vec![1.0; 5]);
        let j = ComplexEnvelope::new(vec![Complex64::new(0.0, 1.0); 5]).unwrap();
        assert_eq!(reconstruct_component(&j, &phase).unwrap(), vec![0.0; 5]);
    }
}
