//! File formats and the `vkf` command-line front end.
//!
//! Every command accepts `--config <file.json>`, a flat JSON object whose keys
//! are the command's long flags in snake_case. Flags given on the command line
//! take precedence over the file.

pub mod commands;
pub mod format;
pub mod orders;
pub mod spectrogram;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VkfError};

pub use format::{fmt_f64, infer_sample_rate, read_envelope, read_json, time_axis, write_envelope, write_json, Table};
pub use orders::{parse_order_list, railway_track, OrderLabel};
pub use spectrogram::{spectrogram, Spectrogram};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vkf", version, about = "Vold-Kalman order tracking and railway axle-box analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the three-component validation signal.
    Synth(SynthArgs),
    /// Simulate a railway run with wheel out-of-roundness and stiffness segments.
    Simulate(SimulateArgs),
    /// Extract order envelopes from a signal.
    Decompose(DecomposeArgs),
    /// Rebuild wheel profiles and fit regressions from extracted envelopes.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthArgs {
    /// Flat JSON file of option defaults.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record length in seconds [default: 50].
    #[arg(long)]
    pub duration: Option<f64>,
    /// Samples per second [default: 12000].
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Standard deviation of the additive noise [default: 0.75].
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run scenario; the built-in scenario is used when absent.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Overrides the scenario duration, seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Samples per second [default: 2000].
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Overrides the acceleration noise standard deviation.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Replaces the speed law by a constant speed, m/s.
    #[arg(long)]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Signal CSV with a `t` column.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Signal column in the input [default: y].
    #[arg(long)]
    pub column: Option<String>,
    /// Frequency CSV: every column except `t` is one order's track in Hz.
    #[arg(long)]
    pub freqs: Option<PathBuf>,
    /// Railway orders, e.g. `wheel:1..11,sleeper`; needs a speed column.
    #[arg(long)]
    pub orders: Option<String>,
    /// CSV with a `speed` column (m/s); defaults to the input file.
    #[arg(long)]
    pub speed: Option<PathBuf>,
    /// Overrides the sample rate inferred from the time column.
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Smoothness weight r applied to every order [default: 10000].
    #[arg(long)]
    pub weight: Option<f64>,
    /// Difference order q (1, 2 or 3) [default: 2].
    #[arg(long)]
    pub diff_order: Option<usize>,
    /// Samples per bin [default: 16384].
    #[arg(long)]
    pub bin_length: Option<usize>,
    /// Bin overlap fraction [default: 0.5].
    #[arg(long)]
    pub overlap: Option<f64>,
    /// `direct` or `iterative` [default: direct].
    #[arg(long)]
    pub solver: Option<String>,
    /// Solver tolerance on the backward error.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Iteration cap for the iterative solver.
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Wheel diameter in metres [default: 0.92].
    #[arg(long)]
    pub wheel_diameter: Option<f64>,
    /// Sleeper spacing in metres [default: 0.6].
    #[arg(long)]
    pub sleeper_spacing: Option<f64>,
    /// Also write `spectrogram.csv`.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub spectrogram: Option<bool>,
    /// Spectrogram frame length in samples [default: 1024].
    #[arg(long)]
    pub spectrogram_window: Option<usize>,
    /// Spectrogram hop in samples [default: 512].
    #[arg(long)]
    pub spectrogram_hop: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output directory of `decompose` for the acceleration signal.
    #[arg(long)]
    pub envelopes: Option<PathBuf>,
    /// CSV with `t` and `speed` columns.
    #[arg(long)]
    pub speed: Option<PathBuf>,
    /// Circumferential bins of the wheel profile [default: 360].
    #[arg(long)]
    pub bins: Option<usize>,
    /// Wheel diameter in metres [default: 0.92].
    #[arg(long)]
    pub wheel_diameter: Option<f64>,
    /// Output directory of `decompose` for the force signal; fits force on
    /// acceleration sleeper magnitudes.
    #[arg(long)]
    pub force: Option<PathBuf>,
    /// Track interval for spatial magnitude bins, metres [default: 0.25].
    #[arg(long)]
    pub interval: Option<f64>,
    /// CSV with columns `x` (> 0) and `u` for a fit of u against ln x.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
}

/// Overlays explicitly given flags onto the config file.
fn resolve<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T> {
    let mut merged = match config {
        Some(path) => match read_json::<serde_json::Value>(path)? {
            serde_json::Value::Object(m) => m,
            _ => {
                return Err(VkfError::InvalidConfig(format!(
                    "{} must hold a flat JSON object",
                    path.display()
                )))
            }
        },
        None => serde_json::Map::new(),
    };
    if let serde_json::Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(serde_json::Value::Object(merged))
        .map_err(|e| VkfError::InvalidConfig(e.to_string()))
}

/// Runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => {
            let r = resolve(&a, a.config.as_deref())?;
            commands::synth(&r)
        }
        Command::Simulate(a) => {
            let r = resolve(&a, a.config.as_deref())?;
            commands::simulate(&r)
        }
        Command::Decompose(a) => {
            let r = resolve(&a, a.config.as_deref())?;
            commands::decompose(&r)
        }
        Command::Analyze(a) => {
            let r = resolve(&a, a.config.as_deref())?;
            commands::analyze(&r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"duration": 2.0, "noise": 0.1, "seed": 4}"#).unwrap();
        let flags = SynthArgs { noise: Some(0.0), ..Default::default() };
        let r = resolve(&flags, Some(&path)).unwrap();
        assert_eq!(r.duration, Some(2.0));
        assert_eq!(r.noise, Some(0.0));
        assert_eq!(r.seed, Some(4));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"durration": 2.0}"#).unwrap();
        assert!(resolve(&SynthArgs::default(), Some(&path)).is_err());
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(run(["vkf", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["vkf", "decompose"]), EXIT_USAGE);
    }
}
