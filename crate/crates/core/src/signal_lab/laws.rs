use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

/// Closed-form scalar function of time, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Law {
    /// `value`
    Constant { value: f64 },
    /// `offset + slope·t`
    Linear { offset: f64, slope: f64 },
    /// `offset + amplitude·cos(2π·freq·t)`
    Cosine {
        offset: f64,
        amplitude: f64,
        freq: f64,
    },
    /// `offset + amplitude·sin(2π·sin_freq·t)·cos(2π·cos_freq·t)`
    SinCos {
        offset: f64,
        amplitude: f64,
        sin_freq: f64,
        cos_freq: f64,
    },
}

impl Law {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Law::Constant { value } => value,
            Law::Linear { offset, slope } => offset + slope * t,
            Law::Cosine {
                offset,
                amplitude,
                freq,
            } => offset + amplitude * (TAU * freq * t).cos(),
            Law::SinCos {
                offset,
                amplitude,
                sin_freq,
                cos_freq,
            } => offset + amplitude * (TAU * sin_freq * t).sin() * (TAU * cos_freq * t).cos(),
        }
    }

    /// Values at `t_k = k / sample_rate`, `k = 0..n`.
    pub fn sample(&self, n: usize, sample_rate: f64) -> Vec<f64> {
        (0..n).map(|k| self.eval(k as f64 / sample_rate)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_each_law() {
        assert_eq!(Law::Constant { value: 3.0 }.eval(10.0), 3.0);
        assert_eq!(Law::Linear { offset: 1.0, slope: 0.02 }.eval(50.0), 2.0);
        let c = Law::Cosine { offset: 600.0, amplitude: 120.0, freq: 0.03 };
        assert!((c.eval(0.0) - 720.0).abs() < 1e-12);
        let sc = Law::SinCos { offset: 1.0, amplitude: 0.5, sin_freq: 0.02, cos_freq: 0.04 };
        assert!((sc.eval(12.5) - 1.0 - 0.5 * (TAU * 0.25).sin() * (TAU * 0.5).cos()).abs() < 1e-12);
    }

    #[test]
    fn serializes_with_tag() {
        let s = serde_json::to_string(&Law::Linear { offset: -2.0, slope: 0.06 }).unwrap();
        assert_eq!(s, r#"{"law":"linear","offset":-2.0,"slope":0.06}"#);
    }
}
