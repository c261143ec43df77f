//! Decomposes the three-component validation record and scores it against truth.
//!
//! Usage: `cargo run --release --example synthetic_validation [duration_s] [weight]`

use std::time::Instant;

use vkf::signal_lab::{
    generate_validation_signal, score_decomposition, VALIDATION_NOISE_SIGMA,
    VALIDATION_SAMPLE_RATE,
};
use vkf::vkf::{bandwidth_for_weight, solve_long, OrderSpec, VkfConfig, DEFAULT_WEIGHT};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let duration: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50.0);
    let weight: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(DEFAULT_WEIGHT);
    let fs = VALIDATION_SAMPLE_RATE;

    let synth = generate_validation_signal(duration, fs, VALIDATION_NOISE_SIGMA, 2024)?;
    let orders = synth
        .frequency_tracks()
        .into_iter()
        .map(|t| OrderSpec::new(t, weight))
        .collect::<Result<Vec<_>, _>>()?;
    println!(
        "{} samples, weight {weight:e} (-3 dB at {:.2} Hz)",
        synth.signal.len(),
        bandwidth_for_weight(weight, fs, 2)?
    );

    let start = Instant::now();
    let dec = solve_long(&synth.signal, &orders, &VkfConfig::default())?;
    println!("solved in {:.2?}", start.elapsed());

    let score = score_decomposition(&synth, &dec, (0.5 * fs) as usize, 0.25)?;
    for (n, (m, p)) in score.magnitude_rmse.iter().zip(&score.phase_rmse).enumerate() {
        println!("X{}: magnitude RMSE {m:.4}, phase RMSE {p:.4} rad", n + 1);
    }
    println!("correlation with clean signal {:.5}", score.correlation);
    if let Some(s) = dec.worst_stats() {
        println!("worst backward error {:.2e}", s.backward_error);
    }
    Ok(())
}
