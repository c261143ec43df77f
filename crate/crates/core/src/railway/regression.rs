use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, VkfError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the residuals.
    pub rmse: f64,
    pub n_samples: usize,
    /// Standard error of the slope; zero when there are no residual degrees of freedom.
    pub slope_stderr: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    #[default]
    Affine,
    ThroughOrigin,
}

/// Ordinary least squares of `u` against `ln x`.
pub fn fit_log_linear(x: &[f64], u: &[f64]) -> Result<RegressionFit> {
    check_len("u", x.len(), u.len())?;
    if let Some(k) = x.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(VkfError::InvalidInput(format!(
            "log-linear regressor must be positive and finite, got {} at {k}",
            x[k]
        )));
    }
    if let Some(k) = u.iter().position(|v| !v.is_finite()) {
        return Err(VkfError::NonFinite { what: "u".into(), index: k });
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    affine(&lx, u)
}

/// Regresses `force` on `accel`; the slope is a mass when the inputs are N and m/s².
///
/// Pairs where either value is not finite are dropped first.
pub fn fit_proportional(force: &[f64], accel: &[f64], mode: FitMode) -> Result<RegressionFit> {
    check_len("acceleration", force.len(), accel.len())?;
    let (a, f): (Vec<f64>, Vec<f64>) = accel
        .iter()
        .zip(force)
        .filter(|(a, f)| a.is_finite() && f.is_finite())
        .map(|(&a, &f)| (a, f))
        .unzip();
    match mode {
        FitMode::Affine => affine(&a, &f),
        FitMode::ThroughOrigin => through_origin(&a, &f),
    }
}

fn affine(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    let n = x.len();
    if n < 2 {
        return Err(VkfError::DegenerateFit(format!("need at least 2 samples, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if sxx <= (f64::EPSILON * scale).powi(2) * nf {
        return Err(VkfError::DegenerateFit("regressor is constant".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(RegressionFit {
        slope,
        intercept,
        rmse: (ssr / nf).sqrt(),
        n_samples: n,
        slope_stderr: if n > 2 { (ssr / (nf - 2.0) / sxx).sqrt() } else { 0.0 },
    })
}

fn through_origin(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    let n = x.len();
    if n < 2 {
        return Err(VkfError::DegenerateFit(format!("need at least 2 samples, got {n}")));
    }
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    if sxx == 0.0 {
        return Err(VkfError::DegenerateFit("regressor is identically zero".into()));
    }
    let slope = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a).powi(2)).sum();
    let nf = n as f64;
    Ok(RegressionFit {
        slope,
        intercept: 0.0,
        rmse: (ssr / nf).sqrt(),
        n_samples: n,
        slope_stderr: (ssr / (nf - 1.0) / sxx).sqrt(),
    })
}
