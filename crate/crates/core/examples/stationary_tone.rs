//! Recovers a unit 500 Hz tone with the direct and iterative solvers and
//! prints the worst interior magnitude error and the solve statistics.

use std::f64::consts::TAU;

use vkf::vkf::{solve_block, FrequencyTrack, OrderSpec, SampledSignal, Solver, VkfConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fs = 12_000.0;
    let n = 12_000;
    let y = SampledSignal::new((0..n).map(|k| (TAU * 500.0 * k as f64 / fs).cos()).collect(), fs)?;
    let orders = [OrderSpec::new(FrequencyTrack::constant(500.0, n)?, 1e4)?];

    for solver in [Solver::direct(), Solver::iterative()] {
        let config = VkfConfig::default().with_solver(solver);
        let q = config.diff_order;
        let d = solve_block(&y, &orders, &config)?;
        let worst = d.envelopes[0].magnitudes()[q..n - q]
            .iter()
            .map(|m| (m - 1.0).abs())
            .fold(0.0, f64::max);
        let stats = d.worst_stats().unwrap();
        println!(
            "{solver:?}: max ||A| - 1| = {worst:.2e}, backward error {:.2e}, iterations {}",
            stats.backward_error, stats.iterations
        );
    }
    Ok(())
}
