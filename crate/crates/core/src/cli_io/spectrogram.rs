use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, VkfError};
use crate::vkf::SampledSignal;

/// Short-time magnitude spectrum on a regular time/frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// Frame centre times, seconds.
    pub times: Vec<f64>,
    /// Bin frequencies from 0 to Nyquist, Hz.
    pub freqs: Vec<f64>,
    /// `magnitudes[frame][bin]`, amplitude-normalized so a unit cosine peaks near 1.
    pub magnitudes: Vec<Vec<f64>>,
}

/// Hann-windowed STFT with frames of `window` samples every `hop` samples.
pub fn spectrogram(signal: &SampledSignal, window: usize, hop: usize) -> Result<Spectrogram> {
    if window < 2 || hop == 0 {
        return Err(VkfError::InvalidInput(format!(
            "spectrogram needs window ≥ 2 and hop ≥ 1, got {window} and {hop}"
        )));
    }
    let y = signal.samples();
    if y.len() < window {
        return Err(VkfError::InvalidInput(format!(
            "record of {} samples is shorter than the {window}-sample window",
            y.len()
        )));
    }
    let fs = signal.sample_rate();
    let w: Vec<f64> = (0..window)
        .map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / window as f64).cos())
        .collect();
    let gain = 2.0 / w.iter().sum::<f64>();
    let fft = FftPlanner::new().plan_fft_forward(window);
    let n_bins = window / 2 + 1;

    let mut times = Vec::new();
    let mut magnitudes = Vec::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); window];
    let mut start = 0;
    while start + window <= y.len() {
        for (b, (&v, &wj)) in buf.iter_mut().zip(y[start..start + window].iter().zip(&w)) {
            *b = Complex64::new(v * wj, 0.0);
        }
        fft.process(&mut buf);
        magnitudes.push(buf[..n_bins].iter().map(|c| c.norm() * gain).collect());
        times.push((start as f64 + 0.5 * window as f64) / fs);
        start += hop;
    }
    Ok(Spectrogram {
        times,
        freqs: (0..n_bins).map(|b| b as f64 * fs / window as f64).collect(),
        magnitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tone_peaks_at_its_bin() {
        let fs = 1024.0;
        let y = (0..4096).map(|k| (2.0 * PI * 100.0 * k as f64 / fs).cos()).collect();
        let s = spectrogram(&SampledSignal::new(y, fs).unwrap(), 256, 128).unwrap();
        assert_eq!(s.freqs.len(), 129);
        let frame = &s.magnitudes[5];
        let peak = (0..frame.len()).max_by(|&a, &b| frame[a].total_cmp(&frame[b])).unwrap();
        assert_eq!(s.freqs[peak], 100.0);
        assert!((frame[peak] - 1.0).abs() < 1e-9);
    }
}
