//! Cross-checks of the banded solver against independent references.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use vkf::signal_lab::{generate_validation_signal, score_decomposition};
use vkf::vkf::{
    bandwidth_for_weight, build_phase, envelope_response, reconstruct_component, solve_block,
    solve_long, weight_for_bandwidth, Formulation, FrequencyTrack, OrderSpec, SampledSignal,
    Solver, VkfConfig,
};

fn binomial_row(q: usize) -> Vec<f64> {
    // (-1)^(q-i) C(q, i), computed from the recurrence rather than a table.
    let mut row = vec![1.0];
    for _ in 0..q {
        let mut next = vec![0.0; row.len() + 1];
        for (i, &c) in row.iter().enumerate() {
            next[i] -= c;
            next[i + 1] += c;
        }
        row = next;
    }
    row
}

/// Dense least-squares envelopes with unknowns `[Re A_1, Im A_1, Re A_2, ...]`.
///
/// With `two_sided` the complex residual `y − Σ A e^{jφ}` is penalized in
/// both its real and imaginary parts; otherwise only the real projection.
fn dense_envelopes(
    y: &[f64],
    freqs: &[Vec<f64>],
    weights: &[f64],
    fs: f64,
    q: usize,
    two_sided: bool,
) -> Vec<Vec<(f64, f64)>> {
    let n = y.len();
    let s = freqs.len();
    let phases: Vec<Vec<f64>> = freqs
        .iter()
        .map(|f| {
            let mut acc = 0.0;
            (0..n)
                .map(|k| {
                    if k > 0 {
                        acc += TAU * f[k] / fs;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let data_rows = if two_sided { 2 * n } else { n };
    let rows = data_rows + 2 * s * (n - q);
    let cols = 2 * s * n;
    let mut g = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    for k in 0..n {
        b[k] = y[k];
        for o in 0..s {
            let (sin, cos) = phases[o][k].sin_cos();
            let re = 2 * o * n + k;
            let im = re + n;
            g[(k, re)] = cos;
            g[(k, im)] = -sin;
            if two_sided {
                g[(n + k, re)] = sin;
                g[(n + k, im)] = cos;
            }
        }
    }
    let coeffs = binomial_row(q);
    let mut r = data_rows;
    for o in 0..s {
        for part in 0..2 {
            let base = 2 * o * n + part * n;
            for i in 0..n - q {
                for (j, c) in coeffs.iter().enumerate() {
                    g[(r, base + i + j)] = weights[o] * c;
                }
                r += 1;
            }
        }
    }
    // Householder QR of the stacked system; the normal equations never form.
    let qr = g.qr();
    let qtb = qr.q().transpose() * b;
    let x = qr.r().solve_upper_triangular(&qtb).unwrap();
    (0..s)
        .map(|o| (0..n).map(|k| (x[2 * o * n + k], x[2 * o * n + n + k])).collect())
        .collect()
}

fn short_record(n: usize, fs: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let noise = vkf::signal_lab::gaussian_noise(n, 0.3, 17).unwrap();
    let freqs = vec![
        (0..n).map(|k| 150.0 + 40.0 * (k as f64 / n as f64)).collect::<Vec<_>>(),
        vec![310.0; n],
        (0..n).map(|k| 420.0 - 25.0 * (TAU * k as f64 / n as f64).sin()).collect(),
    ];
    let y = (0..n)
        .map(|k| {
            let t = k as f64 / fs;
            (TAU * 170.0 * t).cos() + 0.7 * (TAU * 310.0 * t + 0.4).sin() + 0.5 * (TAU * 420.0 * t).cos() + noise[k]
        })
        .collect();
    (y, freqs)
}

fn compare_with_dense(formulation: Formulation, q: usize, weight: f64) {
    let fs = 2000.0;
    let n = 160;
    let (y, freqs) = short_record(n, fs);
    let weights = vec![weight, 2.0 * weight, 0.5 * weight];
    let two_sided = formulation == Formulation::SingleSided;
    // The real projection penalizes with r²/2.
    let penalty: Vec<f64> = weights.iter().map(|w| if two_sided { *w } else { w / 2f64.sqrt() }).collect();
    let dense = dense_envelopes(&y, &freqs, &penalty, fs, q, two_sided);
    let gain = if two_sided { 2.0 } else { 1.0 };

    let signal = SampledSignal::new(y, fs).unwrap();
    let orders: Vec<OrderSpec> = freqs
        .iter()
        .zip(&weights)
        .map(|(f, &w)| OrderSpec::new(FrequencyTrack::new(f.clone()).unwrap(), w).unwrap())
        .collect();
    let cfg = VkfConfig::default().with_diff_order(q).with_formulation(formulation);
    let dec = solve_block(&signal, &orders, &cfg).unwrap();

    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for (env, reference) in dec.envelopes.iter().zip(&dense) {
        for (a, &(re, im)) in env.values().iter().zip(reference) {
            err = err.max((a.re - gain * re).abs()).max((a.im - gain * im).abs());
            scale = scale.max((gain * re).hypot(gain * im));
        }
    }
    assert!(err <= 1e-9 * scale, "{formulation:?} q={q} w={weight}: max deviation {err:e} (scale {scale})");
}

#[test]
fn banded_solve_matches_dense_least_squares_real_projection() {
    for q in 1..=3 {
        for w in [1.0, 1e2, 1e4] {
            compare_with_dense(Formulation::RealProjection, q, w);
        }
    }
}

#[test]
fn banded_solve_matches_dense_least_squares_single_sided() {
    for q in 1..=3 {
        for w in [1.0, 1e2, 1e4] {
            compare_with_dense(Formulation::SingleSided, q, w);
        }
    }
}

#[test]
fn iterative_and_direct_solvers_agree() {
    let fs = 2000.0;
    let n = 4000;
    let (y, freqs) = short_record(n, fs);
    let signal = SampledSignal::new(y, fs).unwrap();
    let orders: Vec<OrderSpec> = freqs
        .iter()
        .map(|f| OrderSpec::new(FrequencyTrack::new(f.clone()).unwrap(), 300.0).unwrap())
        .collect();
    let direct = solve_block(&signal, &orders, &VkfConfig::default()).unwrap();
    let cfg = VkfConfig::default().with_solver(Solver::Iterative { tolerance: 1e-12, max_iterations: 200_000 });
    let iterative = solve_block(&signal, &orders, &cfg).unwrap();
    assert!(iterative.stats[0].iterations > 0);
    for (a, b) in direct.envelopes.iter().zip(&iterative.envelopes) {
        let scale = a.magnitudes().iter().copied().fold(0.0, f64::max);
        for (x, z) in a.values().iter().zip(b.values()) {
            assert!((x - z).norm() < 1e-6 * scale, "{x} vs {z}");
        }
    }
}

#[test]
fn five_second_excerpt_monolithic_and_binned_meet_validation_bounds() {
    let fs = 12_000.0;
    let synth = generate_validation_signal(5.0, fs, 0.75, 99).unwrap();
    let orders: Vec<OrderSpec> = synth
        .frequency_tracks()
        .into_iter()
        .map(|t| OrderSpec::new(t, 1e4).unwrap())
        .collect();
    let cfg = VkfConfig::default();
    let mono = solve_block(&synth.signal, &orders, &cfg).unwrap();
    let binned = solve_long(&synth.signal, &orders, &cfg).unwrap();
    let trim = (0.5 * fs) as usize;
    for dec in [&mono, &binned] {
        let s = score_decomposition(&synth, dec, trim, 0.25).unwrap();
        assert!(s.magnitude_rmse.iter().all(|&m| m <= 0.10), "{s:?}");
        assert!(s.phase_rmse.iter().all(|&p| p <= 0.15), "{s:?}");
        assert!(s.correlation >= 0.99, "{s:?}");
    }
    // Binning changes the interior only marginally.
    for (a, b) in mono.envelopes.iter().zip(&binned.envelopes) {
        let dev = a.values()[trim..a.len() - trim]
            .iter()
            .zip(&b.values()[trim..b.len() - trim])
            .map(|(x, z)| (x - z).norm_sqr())
            .sum::<f64>();
        let rms = (dev / (a.len() - 2 * trim) as f64).sqrt();
        assert!(rms < 0.02, "binning deviation {rms}");
    }
}

#[test]
fn regenerated_component_matches_generator_sample_exactly() {
    let fs = 12_000.0;
    let synth = generate_validation_signal(1.0, fs, 0.0, 0).unwrap();
    let c = &synth.components[0];
    let phase = build_phase(&c.frequency, fs).unwrap();
    let regen = reconstruct_component(&c.envelope(), &phase).unwrap();
    let max = regen
        .iter()
        .zip(&c.signal)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    // Same phase, polar vs direct evaluation of a·cos(φ + p).
    assert!(max < 1e-12, "{max}");
}

/// The bandwidth helper predicts the envelope gain seen by an off-track tone.
#[test]
fn bandwidth_helper_calibrates_against_off_track_tones() {
    let fs = 12_000.0;
    let n = 48_000;
    let weight = weight_for_bandwidth(15.0, fs, 2).unwrap();
    assert!((bandwidth_for_weight(weight, fs, 2).unwrap() - 15.0).abs() < 1e-9);
    let track = FrequencyTrack::constant(500.0, n).unwrap();
    let orders = vec![OrderSpec::new(track, weight).unwrap()];
    for offset in [0.0, 5.0, 15.0, 40.0] {
        let y: Vec<f64> = (0..n).map(|k| (TAU * (500.0 + offset) * k as f64 / fs).cos()).collect();
        let dec = solve_block(&SampledSignal::new(y, fs).unwrap(), &orders, &VkfConfig::default()).unwrap();
        let m = dec.envelopes[0].magnitudes();
        let mid = &m[n / 4..3 * n / 4];
        let measured = mid.iter().sum::<f64>() / mid.len() as f64;
        let predicted = envelope_response(weight, offset, fs, 2);
        assert!((measured - predicted).abs() < 0.01, "offset {offset}: {measured} vs {predicted}");
    }
    let at_cutoff = envelope_response(weight, 15.0, fs, 2);
    assert!((at_cutoff - 0.5f64.sqrt()).abs() < 1e-9);
}
