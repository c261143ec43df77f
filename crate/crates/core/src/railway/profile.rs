use std::ops::Range;

use serde::Serialize;

use super::geometry::{wheel_order_track, SpeedProfile, WheelGeometry};
use crate::error::{check_len, Result, VkfError};
use crate::vkf::{build_phase, reconstruct_component, ComplexEnvelope};

pub const DEFAULT_PROFILE_BINS: usize = 360;

/// Wheel radius against circumferential position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WheelProfile {
    /// Bin centres in `[0, π·d_w)`, metres.
    pub positions: Vec<f64>,
    /// Radius per bin, metres.
    pub radii: Vec<f64>,
    /// Bins that received no samples and were filled by interpolation.
    pub interpolated: Vec<bool>,
    pub mean_radius: f64,
}

impl WheelProfile {
    /// Deviation from the mean radius per bin.
    pub fn deviations(&self) -> Vec<f64> {
        self.radii.iter().map(|r| r - self.mean_radius).collect()
    }

    pub fn peak_to_peak(&self) -> f64 {
        let max = self.radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.radii.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn interpolated_count(&self) -> usize {
        self.interpolated.iter().filter(|&&b| b).count()
    }
}

/// Sums the order components `Re(A_ℓ·e^{jφ_ℓ})` and averages them per
/// circumferential bin, on top of the nominal radius `0.5·d_w`.
pub fn reconstruct_wheel_profile(
    orders: &[(usize, ComplexEnvelope)],
    speed: &SpeedProfile,
    geom: &WheelGeometry,
    n_bins: usize,
) -> Result<WheelProfile> {
    reconstruct_wheel_profile_window(orders, speed, geom, n_bins, 0..speed.len())
}

/// As [`reconstruct_wheel_profile`], using only samples in `window`.
///
/// Phases and positions are still integrated from the start of the record, so
/// windows of one run share an angular origin.
pub fn reconstruct_wheel_profile_window(
    orders: &[(usize, ComplexEnvelope)],
    speed: &SpeedProfile,
    geom: &WheelGeometry,
    n_bins: usize,
    window: Range<usize>,
) -> Result<WheelProfile> {
    if n_bins < 2 {
        return Err(VkfError::InvalidInput(format!("need at least 2 bins, got {n_bins}")));
    }
    let n = speed.len();
    if window.start >= window.end || window.end > n {
        return Err(VkfError::InvalidInput(format!(
            "window {}..{} outside record of {n} samples",
            window.start, window.end
        )));
    }

    let mut sum = vec![0.0; n];
    for (order, env) in orders {
        check_len(&format!("envelope of order {order}"), n, env.len())?;
        let track = wheel_order_track(speed, *order, geom)?;
        let phase = build_phase(&track, speed.sample_rate())?;
        for (s, v) in sum.iter_mut().zip(reconstruct_component(env, &phase)?) {
            *s += v;
        }
    }

    let circumference = geom.circumference();
    let distance = speed.distance();
    let mut acc = vec![0.0; n_bins];
    let mut count = vec![0usize; n_bins];
    for k in window {
        if speed.speeds()[k] <= 0.0 {
            continue;
        }
        let x = distance[k].rem_euclid(circumference);
        let bin = ((x / circumference * n_bins as f64) as usize).min(n_bins - 1);
        acc[bin] += sum[k];
        count[bin] += 1;
    }
    if count.iter().all(|&c| c == 0) {
        return Err(VkfError::NoCoverage(
            "the wheel does not move in the analyzed span".into(),
        ));
    }

    let mut deviation: Vec<Option<f64>> = acc
        .iter()
        .zip(&count)
        .map(|(&a, &c)| (c > 0).then(|| a / c as f64))
        .collect();
    let interpolated: Vec<bool> = deviation.iter().map(Option::is_none).collect();
    fill_circular(&mut deviation);
    let empty = interpolated.iter().filter(|&&b| b).count();
    if empty > 0 {
        log::warn!("{empty} of {n_bins} profile bins had no samples and were interpolated");
    }

    let mean_radius = geom.mean_radius();
    let width = circumference / n_bins as f64;
    Ok(WheelProfile {
        positions: (0..n_bins).map(|i| (i as f64 + 0.5) * width).collect(),
        radii: deviation
            .into_iter()
            .map(|d| mean_radius + d.expect("filled"))
            .collect(),
        interpolated,
        mean_radius,
    })
}

/// Linear interpolation across empty bins, wrapping around the circumference.
fn fill_circular(values: &mut [Option<f64>]) {
    let n = values.len();
    let known: Vec<usize> = (0..n).filter(|&i| values[i].is_some()).collect();
    if known.len() == n || known.is_empty() {
        return;
    }
    for (idx, &left) in known.iter().enumerate() {
        let right = known[(idx + 1) % known.len()];
        let gap = (right + n - left) % n;
        let gap = if gap == 0 { n } else { gap };
        let (a, b) = (values[left].unwrap(), values[right].unwrap());
        for step in 1..gap {
            let i = (left + step) % n;
            let t = step as f64 / gap as f64;
            values[i] = Some(a + (b - a) * t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_envelopes_give_the_nominal_radius() {
        let speed = SpeedProfile::constant(10.0, 5000, 1000.0).unwrap();
        let orders = vec![(1, ComplexEnvelope::zeros(5000)), (2, ComplexEnvelope::zeros(5000))];
        let p = reconstruct_wheel_profile(&orders, &speed, &WheelGeometry::default(), 360).unwrap();
        assert!(p.radii.iter().all(|&r| r == 0.46));
        assert_eq!(p.interpolated_count(), 0);
        assert!(p.positions.iter().all(|&x| (0.0..std::f64::consts::PI * 0.92).contains(&x)));
    }

    #[test]
    fn stationary_wheel_has_no_coverage() {
        let speed = SpeedProfile::constant(0.0, 100, 1000.0).unwrap();
        let orders = vec![(1, ComplexEnvelope::zeros(100))];
        assert!(matches!(
            reconstruct_wheel_profile(&orders, &speed, &WheelGeometry::default(), 36),
            Err(VkfError::NoCoverage(_))
        ));
    }

    #[test]
    fn second_order_gives_two_lobes() {
        let n = 20_000;
        let speed = SpeedProfile::constant(5.0, n, 2000.0).unwrap();
        let a = 1e-4;
        let env = ComplexEnvelope::new(vec![Complex64::new(a, 0.0); n]).unwrap();
        let p = reconstruct_wheel_profile(&[(2, env)], &speed, &WheelGeometry::default(), 72)
            .unwrap();
        let d = p.deviations();
        let circ = WheelGeometry::default().circumference();
        for (x, dv) in p.positions.iter().zip(&d) {
            let expected = a * (2.0 * std::f64::consts::TAU * x / circ).cos();
            // Bin averaging of a cosine shrinks it by sinc(π·2/72).
            assert!((dv - expected).abs() < 0.01 * a, "{dv} vs {expected}");
        }
    }

    #[test]
    fn sparse_coverage_is_interpolated() {
        // Less than one revolution: the tail of the circumference stays empty.
        let speed = SpeedProfile::constant(1.0, 200, 100.0).unwrap();
        let orders = vec![(1, ComplexEnvelope::zeros(200))];
        let p = reconstruct_wheel_profile(&orders, &speed, &WheelGeometry::default(), 36).unwrap();
        assert!(p.interpolated_count() > 0);
        assert!(p.radii.iter().all(|r| r.is_finite()));
    }

    #[test]
    fn circular_fill_wraps() {
        let mut v = vec![None, Some(1.0), None, Some(3.0), None];
        fill_circular(&mut v);
        let v: Vec<f64> = v.into_iter().map(Option::unwrap).collect();
        assert_eq!(v[2], 2.0);
        // 3 → 1 across indices 4, 0.
        assert!((v[4] - (3.0 - 2.0 / 3.0)).abs() < 1e-12);
        assert!((v[0] - (3.0 - 4.0 / 3.0)).abs() < 1e-12);
    }
}
