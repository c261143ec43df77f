//! Tracks sleeper-passage response across three stiffness segments and
//! reports the extracted mean magnitude per segment.

use vkf::railway::{sleeper_track, spatial_bin_magnitudes, wheel_order_track, DEFAULT_SPATIAL_INTERVAL};
use vkf::signal_lab::{generate_run, RunScenario};
use vkf::vkf::{solve_long, OrderSpec, VkfConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fs = 2000.0;
    let scenario = RunScenario::default();
    let run = generate_run(&scenario, fs, 11)?;

    let mut orders = Vec::new();
    for o in &scenario.oor {
        orders.push(OrderSpec::new(wheel_order_track(&run.speed, o.order, &scenario.wheel)?, 1e4)?);
    }
    orders.push(OrderSpec::new(sleeper_track(&run.speed, &scenario.wheel, &scenario.track)?, 1e4)?);
    let d = solve_long(&run.signal, &orders, &VkfConfig::default())?;

    let bins = spatial_bin_magnitudes(
        d.envelopes.last().unwrap(),
        &run.distance,
        DEFAULT_SPATIAL_INTERVAL,
        &d.low_confidence,
    )?;
    for seg in &scenario.stiffness {
        // Skip 5 m either side of each step.
        let inside: Vec<f64> = bins
            .starts
            .iter()
            .zip(&bins.values)
            .filter(|(s, v)| **s >= seg.start + 5.0 && **s + bins.interval <= seg.end - 5.0 && v.is_finite())
            .map(|(_, v)| *v)
            .collect();
        let mean = inside.iter().sum::<f64>() / inside.len().max(1) as f64;
        println!(
            "{:>6.1} - {:>6.1} m: truth {:.3} m/s^2, extracted {:.3} m/s^2 over {} bins",
            seg.start,
            seg.end,
            seg.amplitude,
            mean,
            inside.len()
        );
    }
    Ok(())
}
