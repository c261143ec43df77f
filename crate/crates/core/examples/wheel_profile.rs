//! Simulates a run with out-of-roundness orders 1–3, extracts them together
//! with the sleeper passage, and rebuilds the wheel radius profile.
//!
//! Usage: `cargo run --release --example wheel_profile [weight]`

use vkf::railway::{
    reconstruct_wheel_profile, sleeper_track, wheel_order_track, DEFAULT_PROFILE_BINS,
};
use vkf::signal_lab::{generate_run, RunScenario, StiffnessSegment};
use vkf::vkf::{solve_long, OrderSpec, VkfConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let weight: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1e4);
    let fs = 2000.0;
    // Uniform track: a stiffness step leaks a transient far larger than
    // the OOR amplitudes into neighbouring orders.
    let base = RunScenario::default();
    let length = base.duration * 27.8;
    let scenario = RunScenario {
        noise_sigma: 1e-4,
        force: None,
        stiffness: StiffnessSegment::split(length, &[1.0]),
        ..base
    };
    let run = generate_run(&scenario, fs, 11)?;

    let mut orders = Vec::new();
    for o in &scenario.oor {
        orders.push(OrderSpec::new(wheel_order_track(&run.speed, o.order, &scenario.wheel)?, weight)?);
    }
    orders.push(OrderSpec::new(sleeper_track(&run.speed, &scenario.wheel, &scenario.track)?, weight)?);
    let dec = solve_long(&run.signal, &orders, &VkfConfig::default())?;

    let extracted: Vec<_> = scenario
        .oor
        .iter()
        .zip(&dec.envelopes)
        .map(|(o, e)| (o.order, e.clone()))
        .collect();
    let profile = reconstruct_wheel_profile(&extracted, &run.speed, &scenario.wheel, DEFAULT_PROFILE_BINS)?;
    let truth = reconstruct_wheel_profile(&run.truth.oor, &run.speed, &scenario.wheel, DEFAULT_PROFILE_BINS)?;

    for (o, env) in &extracted {
        let m = env.magnitudes();
        let mean = m[m.len() / 10..m.len() * 9 / 10].iter().sum::<f64>() / (m.len() * 8 / 10) as f64;
        println!("order {o}: mean |A| = {:.1} um", mean * 1e6);
    }
    println!(
        "peak-to-peak: reconstructed {:.1} um, truth {:.1} um",
        profile.peak_to_peak() * 1e6,
        truth.peak_to_peak() * 1e6
    );
    for i in (0..DEFAULT_PROFILE_BINS).step_by(30) {
        println!(
            "x = {:.3} m  r = {:.6} m  (truth {:.6} m)",
            profile.positions[i], profile.radii[i], truth.radii[i]
        );
    }
    Ok(())
}
