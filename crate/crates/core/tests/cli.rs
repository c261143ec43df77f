use std::fs;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;
use proptest::prelude::*;
use vkf::cli_io::commands::{DecomposeReport, RegressionReport, SynthTruth};
use vkf::cli_io::{read_envelope, read_json, time_axis, write_envelope, Table};
use vkf::vkf::{ComplexEnvelope, FrequencyTrack};

fn vkf(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_vkf")).args(args).output().unwrap();
    if !out.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    }
    out.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn noiseless_synth_columns_sum_to_the_signal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    assert_eq!(vkf(&["synth", "--duration", "0.5", "--noise", "0", "--out", p(&out)]), 0);
    let t = Table::read(&out.join("signal.csv")).unwrap();
    let y = t.column("y").unwrap();
    let (x1, x2, x3) = (t.column("X1").unwrap(), t.column("X2").unwrap(), t.column("X3").unwrap());
    for k in 0..y.len() {
        assert_eq!(x1[k] + x2[k] + x3[k], y[k]);
    }
    let truth: SynthTruth = read_json(&out.join("truth.json")).unwrap();
    assert_eq!(truth.sample_rate, 12_000.0);
    assert_eq!(truth.samples, 6000);
    assert_eq!(truth.components.len(), 3);
    assert!(Table::read(&out.join("freqs.csv")).unwrap().has("f3"));
}

#[test]
fn identical_seeds_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (o, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        assert_eq!(vkf(&["synth", "--duration", "0.3", "--seed", seed, "--out", p(o)]), 0);
    }
    let read = |d: &Path| fs::read(d.join("signal.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));

    for o in [&a, &b] {
        assert_eq!(vkf(&["simulate", "--duration", "1", "--seed", "3", "--out", p(&o.join("run"))]), 0);
    }
    assert_eq!(read(&a.join("run")), read(&b.join("run")));
}

#[test]
fn flags_take_precedence_over_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"duration": 0.25, "noise": 0.0, "seed": 5}"#).unwrap();
    let out = dir.path().join("o");
    assert_eq!(vkf(&["synth", "--config", p(&cfg), "--noise", "0.5", "--out", p(&out)]), 0);
    let truth: SynthTruth = read_json(&out.join("truth.json")).unwrap();
    assert_eq!((truth.duration, truth.noise_sigma, truth.seed), (0.25, 0.5, 5));

    fs::write(&cfg, r#"{"duratoin": 0.25}"#).unwrap();
    assert_eq!(vkf(&["synth", "--config", p(&cfg), "--out", p(&out)]), 1);
}

#[test]
fn decomposing_synth_output_recovers_the_amplitude_laws() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    let d = dir.path().join("d");
    assert_eq!(vkf(&["synth", "--duration", "3", "--seed", "1", "--out", p(&s)]), 0);
    assert_eq!(
        vkf(&["decompose", "--input", p(&s.join("signal.csv")), "--freqs", p(&s.join("freqs.csv")), "--out", p(&d)]),
        0
    );
    let report: DecomposeReport = read_json(&d.join("report.json")).unwrap();
    assert_eq!(report.orders.len(), 3);
    assert_eq!(report.low_confidence, vec![0, 1, 35998, 35999]);
    assert!(report.worst.unwrap().backward_error < 1e-10);

    let truth = vkf::signal_lab::generate_validation_signal(3.0, 12_000.0, 0.0, 0).unwrap();
    let trim = 6000;
    for (o, c) in report.orders.iter().zip(&truth.components) {
        let (env, _, fs) = read_envelope(&d.join(&o.file)).unwrap();
        assert_eq!(fs, 12_000.0);
        let m = env.magnitudes();
        let rmse = ((trim..m.len() - trim).map(|k| (m[k] - c.amplitude[k]).powi(2)).sum::<f64>()
            / (m.len() - 2 * trim) as f64)
            .sqrt();
        assert!(rmse < 0.1, "{}: {rmse}", o.file);
    }
    let residual = Table::read(&d.join("residual.csv")).unwrap();
    assert_eq!(residual.rows(), 36000);
}

#[test]
fn spectrogram_is_optional() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    assert_eq!(vkf(&["synth", "--duration", "0.5", "--out", p(&s)]), 0);
    let d = dir.path().join("d");
    assert_eq!(
        vkf(&["decompose", "--input", p(&s.join("signal.csv")), "--freqs", p(&s.join("freqs.csv")),
              "--spectrogram", "--spectrogram-window", "256", "--out", p(&d)]),
        0
    );
    let spec = Table::read(&d.join("spectrogram.csv")).unwrap();
    assert_eq!(spec.headers, vec!["t", "f", "magnitude"]);
    assert_eq!(spec.rows() % 129, 0);
}

#[test]
fn malformed_decompose_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    assert_eq!(vkf(&["synth", "--duration", "0.2", "--out", p(&s)]), 0);
    let input = s.join("signal.csv");
    let out = dir.path().join("d");

    // No frequency source at all.
    assert_eq!(vkf(&["decompose", "--input", p(&input), "--out", p(&out)]), 1);
    // Frequency file without a frequency column.
    let only_t = dir.path().join("t.csv");
    Table::new().with_column("t", time_axis(2400, 12_000.0)).write(&only_t).unwrap();
    assert_eq!(vkf(&["decompose", "--input", p(&input), "--freqs", p(&only_t), "--out", p(&out)]), 1);
    // Track shorter than the signal.
    let short = dir.path().join("short.csv");
    Table::new().with_column("t", vec![0.0; 10]).with_column("f", vec![100.0; 10]).write(&short).unwrap();
    assert_eq!(vkf(&["decompose", "--input", p(&input), "--freqs", p(&short), "--out", p(&out)]), 1);
    // Track above Nyquist.
    let alias = dir.path().join("alias.csv");
    Table::new().with_column("t", vec![0.0; 2400]).with_column("f", vec![6000.0; 2400]).write(&alias).unwrap();
    assert_eq!(vkf(&["decompose", "--input", p(&input), "--freqs", p(&alias), "--out", p(&out)]), 1);
    // Missing signal column.
    assert_eq!(
        vkf(&["decompose", "--input", p(&input), "--column", "z", "--freqs", p(&s.join("freqs.csv")), "--out", p(&out)]),
        1
    );
    // Railway orders without a speed column.
    assert_eq!(vkf(&["decompose", "--input", p(&input), "--orders", "wheel:1..3", "--out", p(&out)]), 1);
}

#[test]
fn singular_systems_exit_with_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let n = 500;
    let sig = dir.path().join("y.csv");
    Table::new()
        .with_column("t", time_axis(n, 1000.0))
        .with_column("y", (0..n).map(|k| (k as f64 * 0.3).sin()).collect())
        .write(&sig)
        .unwrap();
    let f = dir.path().join("f.csv");
    Table::new().with_column("t", time_axis(n, 1000.0)).with_column("f", vec![0.0; n]).write(&f).unwrap();
    assert_eq!(vkf(&["decompose", "--input", p(&sig), "--freqs", p(&f), "--out", p(&dir.path().join("d"))]), 2);
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "x").unwrap();
    assert_ne!(vkf(&["synth", "--duration", "0.1", "--out", p(&file.join("sub"))]), 0);
}

#[test]
fn simulated_run_end_to_end_recovers_the_mass() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("run");
    let (a, f, an) = (dir.path().join("acc"), dir.path().join("force"), dir.path().join("an"));
    assert_eq!(vkf(&["simulate", "--seed", "12", "--out", p(&r)]), 0);
    let signal = r.join("signal.csv");
    assert_eq!(vkf(&["decompose", "--input", p(&signal), "--orders", "wheel:1..3,sleeper", "--out", p(&a)]), 0);
    assert_eq!(vkf(&["decompose", "--input", p(&signal), "--column", "force", "--orders", "sleeper", "--out", p(&f)]), 0);
    assert_eq!(
        vkf(&["analyze", "--envelopes", p(&a), "--speed", p(&signal), "--force", p(&f), "--out", p(&an)]),
        0
    );
    let reg: RegressionReport = read_json(&an.join("regression.json")).unwrap();
    assert_eq!(reg.kind, "proportional");
    assert!((reg.fit.slope - 300.0).abs() < 0.05 * 300.0, "{}", reg.fit.slope);
    assert!(reg.through_origin.is_some());
    let profile = Table::read(&an.join("wheel_profile.csv")).unwrap();
    assert_eq!(profile.rows(), 360);
}

#[test]
fn zero_envelopes_give_a_round_wheel() {
    let dir = tempfile::tempdir().unwrap();
    let n = 4000;
    let sig = dir.path().join("y.csv");
    Table::new()
        .with_column("t", time_axis(n, 1000.0))
        .with_column("y", vec![0.0; n])
        .with_column("speed", vec![15.0; n])
        .write(&sig)
        .unwrap();
    let (d, an) = (dir.path().join("d"), dir.path().join("an"));
    assert_eq!(vkf(&["decompose", "--input", p(&sig), "--orders", "wheel:1..4", "--out", p(&d)]), 0);
    assert_eq!(vkf(&["analyze", "--envelopes", p(&d), "--speed", p(&sig), "--bins", "72", "--out", p(&an)]), 0);
    let profile = Table::read(&an.join("wheel_profile.csv")).unwrap();
    assert_eq!(profile.rows(), 72);
    assert!(profile.column("radius").unwrap().iter().all(|&r| r == 0.46));
}

#[test]
fn exact_log_linear_pairs_fit_with_zero_rmse() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.csv");
    let z: Vec<f64> = (1..40).map(|i| 0.25 * i as f64).collect();
    let u: Vec<f64> = z.iter().map(|v| 0.3 * v.ln() - 1.6).collect();
    Table::new().with_column("x", z).with_column("u", u).write(&pairs).unwrap();
    let an = dir.path().join("an");
    assert_eq!(vkf(&["analyze", "--pairs", p(&pairs), "--out", p(&an)]), 0);
    let reg: RegressionReport = read_json(&an.join("regression.json")).unwrap();
    assert_eq!(reg.kind, "log_linear");
    assert!(reg.fit.rmse < 1e-12);
    assert!((reg.fit.slope - 0.3).abs() < 1e-12);
    assert_eq!(reg.fit.n_samples, 39);

    // Degenerate regressor is a numerical failure.
    Table::new().with_column("x", vec![2.0; 5]).with_column("u", vec![1.0, 2.0, 3.0, 4.0, 5.0]).write(&pairs).unwrap();
    assert_eq!(vkf(&["analyze", "--pairs", p(&pairs), "--out", p(&an)]), 2);
    assert_eq!(vkf(&["analyze", "--out", p(&an)]), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn csv_tables_round_trip(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..100)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = Table::new().with_column("a", values.clone()).with_column("b", values.iter().map(|v| -v).collect());
        t.write(&path).unwrap();
        prop_assert_eq!(Table::read(&path).unwrap(), t);
    }

    #[test]
    fn envelope_files_round_trip(
        parts in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, 0.0f64..400.0), 2..80)
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        let env = ComplexEnvelope::new(parts.iter().map(|&(r, i, _)| Complex64::new(r, i)).collect()).unwrap();
        let track = FrequencyTrack::new(parts.iter().map(|p| p.2).collect()).unwrap();
        write_envelope(&path, 1000.0, &env, &track).unwrap();
        let (back, tr, fs) = read_envelope(&path).unwrap();
        prop_assert_eq!(fs, 1000.0);
        prop_assert_eq!(tr, track);
        for (a, b) in env.values().iter().zip(back.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }
}
