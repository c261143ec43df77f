use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, VkfError};

/// `n` independent draws from `N(0, sigma²)`, reproducible for a given seed.
pub fn gaussian_noise(n: usize, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(VkfError::InvalidInput(format!(
            "noise standard deviation must be non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let dist = Normal::new(0.0, sigma).map_err(|e| VkfError::InvalidInput(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| dist.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_is_silent() {
        assert!(gaussian_noise(10, 0.0, 3).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sample_moments_match() {
        let x = gaussian_noise(200_000, 0.75, 42).unwrap();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        assert!(mean.abs() < 0.01);
        assert!((var.sqrt() - 0.75).abs() < 0.01);
    }

    #[test]
    fn negative_sigma_is_rejected() {
        assert!(gaussian_noise(4, -1.0, 0).is_err());
    }
}
