//! Picks a weight for a 5 Hz envelope bandwidth and measures the response to
//! tones offset from a 1 kHz track against the predicted filter shape.

use std::f64::consts::TAU;

use vkf::vkf::{
    envelope_response, solve_block, weight_for_bandwidth, FrequencyTrack, OrderSpec,
    SampledSignal, VkfConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fs = 12_000.0;
    let n = 48_000;
    let config = VkfConfig::default();
    let q = config.diff_order;
    let weight = weight_for_bandwidth(5.0, fs, q)?;
    println!("weight for 5 Hz at {fs} Hz, q = {q}: {weight:.4e}");

    let orders = [OrderSpec::new(FrequencyTrack::constant(1000.0, n)?, weight)?];
    println!("{:>8} {:>10} {:>10}", "offset", "predicted", "measured");
    for offset in [0.0, 1.0, 2.5, 5.0, 10.0, 20.0] {
        let f = 1000.0 + offset;
        let y = SampledSignal::new((0..n).map(|k| (TAU * f * k as f64 / fs).cos()).collect(), fs)?;
        let d = solve_block(&y, &orders, &config)?;
        let m = d.envelopes[0].magnitudes();
        let mid = &m[n / 4..3 * n / 4];
        let measured = mid.iter().sum::<f64>() / mid.len() as f64;
        println!(
            "{offset:>8.1} {:>10.4} {measured:>10.4}",
            envelope_response(weight, offset, fs, q)
        );
    }
    Ok(())
}
