use serde::Serialize;

use crate::error::{check_len, Result, VkfError};
use crate::vkf::ComplexEnvelope;

pub const DEFAULT_SPATIAL_INTERVAL: f64 = 0.25;

/// Mean envelope magnitude per track-position interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialBins {
    pub interval: f64,
    /// Start position of each interval, metres.
    pub starts: Vec<f64>,
    /// Mean magnitude, NaN where no sample fell in the interval.
    pub values: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Reduces an envelope to one magnitude per `interval` metres of travel,
/// optionally skipping samples flagged in `exclude`.
pub fn spatial_bin_magnitudes(
    envelope: &ComplexEnvelope,
    distance: &[f64],
    interval: f64,
    exclude: &[usize],
) -> Result<SpatialBins> {
    check_len("distance", envelope.len(), distance.len())?;
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(VkfError::InvalidInput(format!(
            "spatial interval must be positive, got {interval}"
        )));
    }
    let end = distance.iter().copied().fold(0.0, f64::max);
    let n_bins = (end / interval).floor() as usize + 1;
    let mut sum = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    let mut skip = vec![false; distance.len()];
    for &k in exclude {
        if k < skip.len() {
            skip[k] = true;
        }
    }
    for (k, (&s, a)) in distance.iter().zip(envelope.values()).enumerate() {
        if skip[k] || !(s >= 0.0) {
            continue;
        }
        let bin = ((s / interval) as usize).min(n_bins - 1);
        sum[bin] += a.norm();
        counts[bin] += 1;
    }
    Ok(SpatialBins {
        interval,
        starts: (0..n_bins).map(|i| i as f64 * interval).collect(),
        values: sum
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| if c > 0 { s / c as f64 } else { f64::NAN })
            .collect(),
        counts,
    })
}
