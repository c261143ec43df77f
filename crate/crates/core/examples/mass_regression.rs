//! Recovers the unsprung mass from paired force and axle-box acceleration
//! sleeper-passage envelopes of a simulated run.

use vkf::railway::{
    fit_proportional, sleeper_track, spatial_bin_magnitudes, wheel_order_track, FitMode,
    DEFAULT_SPATIAL_INTERVAL,
};
use vkf::signal_lab::{generate_run, RunScenario};
use vkf::vkf::{solve_long, OrderSpec, VkfConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fs = 2000.0;
    let scenario = RunScenario::default();
    let run = generate_run(&scenario, fs, 5)?;
    let force = run.force.as_ref().expect("scenario has a force channel");
    let config = VkfConfig::default();

    let sleeper = OrderSpec::new(sleeper_track(&run.speed, &scenario.wheel, &scenario.track)?, 1e4)?;
    let mut accel_orders = Vec::new();
    for o in &scenario.oor {
        accel_orders.push(OrderSpec::new(wheel_order_track(&run.speed, o.order, &scenario.wheel)?, 1e4)?);
    }
    accel_orders.push(sleeper.clone());

    let accel = solve_long(&run.signal, &accel_orders, &config)?;
    let force_dec = solve_long(force, &[sleeper], &config)?;

    let za = spatial_bin_magnitudes(
        accel.envelopes.last().unwrap(),
        &run.distance,
        DEFAULT_SPATIAL_INTERVAL,
        &accel.low_confidence,
    )?;
    let zf = spatial_bin_magnitudes(
        &force_dec.envelopes[0],
        &run.distance,
        DEFAULT_SPATIAL_INTERVAL,
        &force_dec.low_confidence,
    )?;

    let mass = scenario.force.unwrap().unsprung_mass;
    for mode in [FitMode::Affine, FitMode::ThroughOrigin] {
        let fit = fit_proportional(&zf.values, &za.values, mode)?;
        println!(
            "{mode:?}: slope {:.2} kg (truth {mass}), intercept {:.2} N, rmse {:.2} N, n = {}",
            fit.slope, fit.intercept, fit.rmse, fit.n_samples
        );
    }
    Ok(())
}
