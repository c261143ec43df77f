//! Compares the binned solver with one monolithic solve on a noisy 10 s tone.

use std::f64::consts::TAU;
use std::time::Instant;

use vkf::signal_lab::gaussian_noise;
use vkf::vkf::{solve_block, solve_long, FrequencyTrack, OrderSpec, SampledSignal, VkfConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fs = 12_000.0;
    let n = 120_000;
    let noise = gaussian_noise(n, 0.75, 3)?;
    let y: Vec<f64> = (0..n)
        .map(|k| (TAU * 500.0 * k as f64 / fs).cos() + noise[k])
        .collect();
    let y = SampledSignal::new(y, fs)?;
    let orders = [OrderSpec::new(FrequencyTrack::constant(500.0, n)?, 1e4)?];

    for bin_length in [4096, 16_384, 65_536] {
        let config = VkfConfig::default().with_bins(bin_length, 0.5);
        let t = Instant::now();
        let mono = solve_block(&y, &orders, &config)?;
        let t_mono = t.elapsed();
        let t = Instant::now();
        let binned = solve_long(&y, &orders, &config)?;
        let t_binned = t.elapsed();

        let trim = n / 20;
        let (mut dev, mut energy) = (0.0, 0.0);
        for k in trim..n - trim {
            let a = mono.envelopes[0].values()[k];
            dev += (a - binned.envelopes[0].values()[k]).norm_sqr();
            energy += a.norm_sqr();
        }
        println!(
            "bin {bin_length:>6}: {} bins, interior deviation {:.2e}, monolithic {:.2?}, binned {:.2?}",
            binned.stats.len(),
            (dev / energy).sqrt(),
            t_mono,
            t_binned
        );
    }
    Ok(())
}
