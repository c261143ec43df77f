use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::format::{infer_sample_rate, read_envelope, read_json, time_axis, write_envelope, write_json, Table};
use super::orders::{parse_order_list, railway_track, OrderLabel};
use super::spectrogram::spectrogram;
use super::{AnalyzeArgs, DecomposeArgs, SimulateArgs, SynthArgs};
use crate::error::{check_len, Result, VkfError};
use crate::railway::{
    fit_log_linear, fit_proportional, reconstruct_wheel_profile, spatial_bin_magnitudes, FitMode,
    RegressionFit, SpeedProfile, TrackGeometry, WheelGeometry, DEFAULT_PROFILE_BINS,
    DEFAULT_SPATIAL_INTERVAL,
};
use crate::signal_lab::{
    generate_run, generate_validation_signal, validation_components, RunScenario, SpeedLaw,
    SyntheticComponentSpec, VALIDATION_DURATION, VALIDATION_NOISE_SIGMA, VALIDATION_SAMPLE_RATE,
};
use crate::vkf::{
    solve_long, ComplexEnvelope, FrequencyTrack, OrderSpec, SampledSignal, SolveStats, Solver,
    VkfConfig, Warning, DEFAULT_WEIGHT,
};

pub const DEFAULT_RUN_SAMPLE_RATE: f64 = 2000.0;
const DEFAULT_SPECTROGRAM_WINDOW: usize = 1024;
const DEFAULT_SPECTROGRAM_HOP: usize = 512;

fn out_dir(out: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub duration: f64,
    pub sample_rate: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub samples: usize,
    pub components: Vec<SyntheticComponentSpec>,
}

/// Writes `signal.csv`, `freqs.csv` and `truth.json`.
pub fn synth(args: &SynthArgs) -> Result<()> {
    let dir = out_dir(&args.out)?;
    let duration = args.duration.unwrap_or(VALIDATION_DURATION);
    let fs = args.sample_rate.unwrap_or(VALIDATION_SAMPLE_RATE);
    let sigma = args.noise.unwrap_or(VALIDATION_NOISE_SIGMA);
    let seed = args.seed.unwrap_or(0);
    let s = generate_validation_signal(duration, fs, sigma, seed)?;
    let t = time_axis(s.signal.len(), fs);

    let mut signal = Table::new()
        .with_column("t", t.clone())
        .with_column("y", s.signal.samples().to_vec());
    let mut freqs = Table::new().with_column("t", t);
    for (i, c) in s.components.iter().enumerate() {
        signal = signal.with_column(format!("X{}", i + 1), c.signal.clone());
        freqs = freqs.with_column(format!("f{}", i + 1), c.frequency.freqs().to_vec());
    }
    signal.write(&dir.join("signal.csv"))?;
    freqs.write(&dir.join("freqs.csv"))?;
    write_json(
        &dir.join("truth.json"),
        &SynthTruth {
            duration,
            sample_rate: fs,
            noise_sigma: sigma,
            seed,
            samples: s.signal.len(),
            components: validation_components().to_vec(),
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateTruth {
    pub scenario: RunScenario,
    pub sample_rate: f64,
    pub seed: u64,
    pub samples: usize,
}

/// Writes `signal.csv` (t, y, speed, distance and force when simulated),
/// `sleeper_truth.csv` and `truth.json`.
pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let dir = out_dir(&args.out)?;
    let mut scenario: RunScenario = match &args.scenario {
        Some(path) => read_json(path)?,
        None => RunScenario::default(),
    };
    if let Some(d) = args.duration {
        scenario.duration = d;
    }
    if let Some(n) = args.noise {
        scenario.noise_sigma = n;
    }
    if let Some(v) = args.speed {
        scenario.speed = SpeedLaw::Constant { speed: v };
    }
    let fs = args.sample_rate.unwrap_or(DEFAULT_RUN_SAMPLE_RATE);
    let seed = args.seed.unwrap_or(0);
    let run = generate_run(&scenario, fs, seed)?;
    let t = time_axis(run.signal.len(), fs);

    let mut table = Table::new()
        .with_column("t", t.clone())
        .with_column("y", run.signal.samples().to_vec())
        .with_column("speed", run.speed.speeds().to_vec())
        .with_column("distance", run.distance.clone());
    if let Some(f) = &run.force {
        table = table.with_column("force", f.samples().to_vec());
    }
    table.write(&dir.join("signal.csv"))?;
    Table::new()
        .with_column("t", t)
        .with_column("amplitude", run.truth.sleeper.magnitudes())
        .write(&dir.join("sleeper_truth.csv"))?;
    write_json(
        &dir.join("truth.json"),
        &SimulateTruth { scenario, sample_rate: fs, seed, samples: run.signal.len() },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEntry {
    /// 1-based, matching `envelope_<index>.csv`.
    pub index: usize,
    pub label: OrderLabel,
    pub weight: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub input: String,
    pub column: String,
    pub sample_rate: f64,
    pub samples: usize,
    pub config: VkfConfig,
    pub orders: Vec<OrderEntry>,
    pub worst: Option<SolveStats>,
    /// Accuracy of each bin solve.
    pub stats: Vec<SolveStats>,
    /// Sample indices near record edges where envelopes are less reliable.
    pub low_confidence: Vec<usize>,
    pub warnings: Vec<Warning>,
}

fn solver_from(args: &DecomposeArgs) -> Result<Solver> {
    let mut solver = match args.solver.as_deref().unwrap_or("direct") {
        "direct" => Solver::direct(),
        "iterative" => Solver::iterative(),
        other => {
            return Err(VkfError::InvalidConfig(format!(
                "unknown solver `{other}`, expected `direct` or `iterative`"
            )))
        }
    };
    match &mut solver {
        Solver::DirectBanded { tolerance } => {
            if let Some(t) = args.tolerance {
                *tolerance = t;
            }
        }
        Solver::Iterative { tolerance, max_iterations } => {
            if let Some(t) = args.tolerance {
                *tolerance = t;
            }
            if let Some(m) = args.max_iterations {
                *max_iterations = m;
            }
        }
    }
    Ok(solver)
}

/// Loads a speed column, checking it lines up with a record of `n` samples.
fn load_speed(path: &Path, n: usize, sample_rate: f64) -> Result<SpeedProfile> {
    let table = Table::read(path)?;
    let speed = table.column("speed")?;
    check_len(&format!("speed in {}", path.display()), n, speed.len())?;
    SpeedProfile::new(speed.to_vec(), sample_rate)
}

/// Writes one `envelope_<n>.csv` per order, `residual.csv` and `report.json`.
pub fn decompose(args: &DecomposeArgs) -> Result<()> {
    let input = args
        .input
        .as_ref()
        .ok_or_else(|| VkfError::InvalidInput("--input is required".into()))?;
    let table = Table::read(input)?;
    let column = args.column.clone().unwrap_or_else(|| "y".into());
    let y = table.column(&column)?.to_vec();
    let fs = match args.sample_rate {
        Some(fs) => fs,
        None => infer_sample_rate(table.column("t")?)?,
    };
    let signal = SampledSignal::new(y, fs)?;
    let n = signal.len();

    let (labels, tracks): (Vec<OrderLabel>, Vec<FrequencyTrack>) = match (&args.freqs, &args.orders) {
        (Some(_), Some(_)) => {
            return Err(VkfError::InvalidInput("pass either --freqs or --orders, not both".into()))
        }
        (Some(path), None) => {
            let f = Table::read(path)?;
            let cols: Vec<usize> = (0..f.headers.len()).filter(|&i| f.headers[i] != "t").collect();
            if cols.is_empty() {
                return Err(VkfError::InvalidInput(format!(
                    "{} has no frequency column",
                    path.display()
                )));
            }
            let mut out = (Vec::new(), Vec::new());
            for i in cols {
                check_len(&format!("frequency column `{}`", f.headers[i]), n, f.columns[i].len())?;
                out.0.push(OrderLabel::Column(f.headers[i].clone()));
                out.1.push(FrequencyTrack::new(f.columns[i].clone())?);
            }
            out
        }
        (None, Some(spec)) => {
            let labels = parse_order_list(spec)?;
            let speed = load_speed(args.speed.as_deref().unwrap_or(input), n, fs)?;
            let wheel = WheelGeometry::new(args.wheel_diameter.unwrap_or(WheelGeometry::default().diameter))?;
            let track = TrackGeometry::new(
                args.sleeper_spacing.unwrap_or(TrackGeometry::default().sleeper_spacing),
            )?;
            let tracks = labels
                .iter()
                .map(|l| railway_track(l, &speed, &wheel, &track))
                .collect::<Result<Vec<_>>>()?;
            (labels, tracks)
        }
        (None, None) => {
            return Err(VkfError::InvalidInput(
                "missing frequency tracks: pass --freqs <csv> or --orders <list>".into(),
            ))
        }
    };

    let weight = args.weight.unwrap_or(DEFAULT_WEIGHT);
    let defaults = VkfConfig::default();
    let config = VkfConfig {
        diff_order: args.diff_order.unwrap_or(defaults.diff_order),
        bin_length: args.bin_length.unwrap_or(defaults.bin_length),
        overlap: args.overlap.unwrap_or(defaults.overlap),
        solver: solver_from(args)?,
        ..defaults
    };
    let orders = tracks
        .iter()
        .map(|t| OrderSpec::new(t.clone(), weight))
        .collect::<Result<Vec<_>>>()?;
    let dec = solve_long(&signal, &orders, &config)?;

    let dir = out_dir(&args.out)?;
    let mut entries = Vec::new();
    for (i, ((label, env), track)) in labels.iter().zip(&dec.envelopes).zip(&tracks).enumerate() {
        let file = format!("envelope_{}.csv", i + 1);
        write_envelope(&dir.join(&file), fs, env, track)?;
        entries.push(OrderEntry { index: i + 1, label: label.clone(), weight, file });
    }
    Table::new()
        .with_column("t", time_axis(n, fs))
        .with_column("residual", dec.residual.clone())
        .write(&dir.join("residual.csv"))?;

    if args.spectrogram.unwrap_or(false) {
        let s = spectrogram(
            &signal,
            args.spectrogram_window.unwrap_or(DEFAULT_SPECTROGRAM_WINDOW),
            args.spectrogram_hop.unwrap_or(DEFAULT_SPECTROGRAM_HOP),
        )?;
        let (mut t, mut f, mut m) = (Vec::new(), Vec::new(), Vec::new());
        for (ti, row) in s.times.iter().zip(&s.magnitudes) {
            for (fi, mi) in s.freqs.iter().zip(row) {
                t.push(*ti);
                f.push(*fi);
                m.push(*mi);
            }
        }
        Table::new()
            .with_column("t", t)
            .with_column("f", f)
            .with_column("magnitude", m)
            .write(&dir.join("spectrogram.csv"))?;
    }

    for w in &dec.warnings {
        eprintln!("warning: {}", serde_json::to_string(w)?);
    }
    write_json(
        &dir.join("report.json"),
        &DecomposeReport {
            input: input.display().to_string(),
            column,
            sample_rate: fs,
            samples: n,
            config,
            orders: entries,
            worst: dec.worst_stats(),
            stats: dec.stats.clone(),
            low_confidence: dec.low_confidence.clone(),
            warnings: dec.warnings.clone(),
        },
    )
}

/// A decomposition read back from disk.
pub struct LoadedDecomposition {
    pub report: DecomposeReport,
    pub envelopes: Vec<(OrderLabel, ComplexEnvelope)>,
}

impl LoadedDecomposition {
    pub fn load(dir: &Path) -> Result<Self> {
        let report: DecomposeReport = read_json(&dir.join("report.json"))?;
        let envelopes = report
            .orders
            .iter()
            .map(|o| Ok((o.label.clone(), read_envelope(&dir.join(&o.file))?.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { report, envelopes })
    }

    fn sleeper(&self, dir: &Path) -> Result<&ComplexEnvelope> {
        self.envelopes
            .iter()
            .find(|(l, _)| *l == OrderLabel::Sleeper)
            .map(|(_, e)| e)
            .ok_or_else(|| {
                VkfError::InvalidInput(format!("{} holds no sleeper order", dir.display()))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    /// `log_linear` or `proportional`.
    pub kind: String,
    #[serde(flatten)]
    pub fit: RegressionFit,
    /// Proportional fits also report the through-origin slope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub through_origin: Option<RegressionFit>,
}

/// Writes `wheel_profile.csv` and/or `regression.json`.
pub fn analyze(args: &AnalyzeArgs) -> Result<()> {
    if args.force.is_some() && args.pairs.is_some() {
        return Err(VkfError::InvalidInput("pass either --force or --pairs, not both".into()));
    }
    let accel = match &args.envelopes {
        Some(dir) => Some(LoadedDecomposition::load(dir)?),
        None => None,
    };
    let speed = match (&args.speed, &accel) {
        (Some(path), Some(a)) => Some(load_speed(path, a.report.samples, a.report.sample_rate)?),
        (Some(path), None) => {
            let t = Table::read(path)?;
            let fs = infer_sample_rate(t.column("t")?)?;
            Some(SpeedProfile::new(t.column("speed")?.to_vec(), fs)?)
        }
        (None, _) => None,
    };
    let dir = out_dir(&args.out)?;
    let mut wrote = false;

    if let (Some(a), Some(speed)) = (&accel, &speed) {
        let wheel_orders: Vec<(usize, ComplexEnvelope)> = a
            .envelopes
            .iter()
            .filter_map(|(l, e)| match l {
                OrderLabel::Wheel(k) => Some((*k, e.clone())),
                _ => None,
            })
            .collect();
        if !wheel_orders.is_empty() {
            let geom =
                WheelGeometry::new(args.wheel_diameter.unwrap_or(WheelGeometry::default().diameter))?;
            let p = reconstruct_wheel_profile(
                &wheel_orders,
                speed,
                &geom,
                args.bins.unwrap_or(DEFAULT_PROFILE_BINS),
            )?;
            let circ = geom.circumference();
            Table::new()
                .with_column("position", p.positions.clone())
                .with_column("angle_deg", p.positions.iter().map(|x| 360.0 * x / circ).collect())
                .with_column("radius", p.radii.clone())
                .with_column(
                    "interpolated",
                    p.interpolated.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
                )
                .write(&dir.join("wheel_profile.csv"))?;
            wrote = true;
        }
    }

    if let Some(force_dir) = &args.force {
        let (a, speed) = match (&accel, &speed) {
            (Some(a), Some(s)) => (a, s),
            _ => {
                return Err(VkfError::InvalidInput(
                    "--force needs --envelopes and --speed as well".into(),
                ))
            }
        };
        let env_dir = args.envelopes.as_deref().expect("loaded above");
        let f = LoadedDecomposition::load(force_dir)?;
        check_len("force record", a.report.samples, f.report.samples)?;
        let distance = speed.distance();
        let interval = args.interval.unwrap_or(DEFAULT_SPATIAL_INTERVAL);
        let za = spatial_bin_magnitudes(a.sleeper(env_dir)?, &distance, interval, &a.report.low_confidence)?;
        let zf = spatial_bin_magnitudes(f.sleeper(force_dir)?, &distance, interval, &f.report.low_confidence)?;
        let report = RegressionReport {
            kind: "proportional".into(),
            fit: fit_proportional(&zf.values, &za.values, FitMode::Affine)?,
            through_origin: Some(fit_proportional(&zf.values, &za.values, FitMode::ThroughOrigin)?),
        };
        write_json(&dir.join("regression.json"), &report)?;
        wrote = true;
    }

    if let Some(path) = &args.pairs {
        let t = Table::read(path)?;
        let report = RegressionReport {
            kind: "log_linear".into(),
            fit: fit_log_linear(t.column("x")?, t.column("u")?)?,
            through_origin: None,
        };
        write_json(&dir.join("regression.json"), &report)?;
        wrote = true;
    }

    if !wrote {
        return Err(VkfError::InvalidInput(
            "nothing to analyze: pass --envelopes with --speed (wheel orders), --force, or --pairs"
                .into(),
        ));
    }
    Ok(())
}
