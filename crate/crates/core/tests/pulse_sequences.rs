use std::f64::consts::PI;

use pulsecell::pulse::{build_continuum, build_irregular, build_regular, coherent_amplitude};
use pulsecell::{GaussianPulse, PulseSequence, C64};

const OMEGA: f64 = 1.0 / (4.0 * PI);

fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h)).sum();
    h * (0.5 * f(a) + inner + 0.5 * f(b))
}

fn norm_integral(seq: &PulseSequence, a: f64, b: f64) -> f64 {
    let n = ((b - a) / 0.05).ceil() as usize;
    trapezoid(|t| seq.value(t).norm_sqr(), a, b, n)
}

#[test]
fn single_packet_is_normalized() {
    for bw in [OMEGA, 0.2, 1.0] {
        let p = GaussianPulse::new(0.0, bw).unwrap();
        let r = 8.0 / bw;
        let norm = trapezoid(|t| p.value(t).norm_sqr(), -r, r, 20_000);
        assert!((norm - 1.0).abs() < 1e-6, "bw {bw}: {norm}");
    }
}

#[test]
fn well_separated_train_carries_n_alpha_squared() {
    let alpha = coherent_amplitude(3.0, 0.4).unwrap();
    let seq = build_regular(5, 200.0, 40.0 / OMEGA, OMEGA, alpha).unwrap();
    let end = 200.0 + 4.0 * 40.0 / OMEGA + 200.0;
    let total = norm_integral(&seq, 0.0, end);
    assert!((total - 5.0 * 3.0).abs() < 1e-6 * 15.0, "{total}");
}

#[test]
fn derivative_matches_central_difference() {
    let alpha = coherent_amplitude(10.0, 1.1).unwrap();
    let seq = build_continuum(50.0, 300.0, 1.0 / OMEGA, OMEGA, alpha).unwrap();
    let h = 1e-4;
    let mut t = 0.0;
    while t < 420.0 {
        let fd = (seq.value(t + h) - seq.value(t - h)) / (2.0 * h);
        let exact = seq.derivative(t);
        let scale = exact.norm().max(1e-3);
        assert!((fd - exact).norm() / scale < 1e-5, "t {t}: {fd} vs {exact}");
        t += 0.37;
    }
}

#[test]
fn irregular_trains_keep_count_order_and_norm() {
    let alpha = C64::new(1.0, 0.0);
    let spacing = 60.0 / OMEGA;
    let jitter = 0.3;
    for seed in 0..100 {
        let seq = build_irregular(6, spacing, spacing, jitter, seed, OMEGA, alpha).unwrap();
        let peaks = seq.peak_times();
        assert_eq!(peaks.len(), 6);
        assert!(peaks.windows(2).all(|w| w[1] > w[0]), "seed {seed}");
        for (k, t) in peaks.iter().enumerate() {
            let nominal = spacing * (k + 1) as f64;
            assert!((t - nominal).abs() <= jitter * spacing + 1e-9);
        }
        // Narrowest gap is 0.4 · 60/Ω, so packets never overlap.
        let total = norm_integral(&seq, 0.0, peaks[5] + 20.0 / OMEGA);
        assert!((total - 6.0).abs() < 1e-6 * 6.0, "seed {seed}: {total}");
    }
    let a = build_irregular(6, spacing, spacing, jitter, 7, OMEGA, alpha).unwrap();
    let b = build_irregular(6, spacing, spacing, jitter, 7, OMEGA, alpha).unwrap();
    let c = build_irregular(6, spacing, spacing, jitter, 8, OMEGA, alpha).unwrap();
    assert_eq!(a.peak_times(), b.peak_times());
    assert_ne!(a.peak_times(), c.peak_times());
}

#[test]
fn continuum_envelope_is_flat_in_the_interior() {
    let alpha = coherent_amplitude(10.0, 0.0).unwrap();
    let (start, duration) = (125.0, 2000.0);
    let seq = build_continuum(start, duration, 1.0 / OMEGA, OMEGA, alpha).unwrap();
    let (a, b) = (start + 10.0 / OMEGA, start + duration - 10.0 / OMEGA);
    let samples: Vec<f64> = (0..=4000)
        .map(|k| seq.value(a + (b - a) * k as f64 / 4000.0).norm())
        .collect();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let max = samples.iter().cloned().fold(f64::MIN, f64::max);
    let min = samples.iter().cloned().fold(f64::MAX, f64::min);
    assert!(mean > 0.0);
    assert!((max - min) / mean < 0.25, "ripple {}", (max - min) / mean);
}

#[test]
fn continuum_count_scales_with_duration() {
    let alpha = C64::new(1.0, 0.0);
    let spacing = 1.0 / OMEGA;
    for duration in [500.0, 1234.5, 6000.0] {
        let one = build_continuum(0.0, duration, spacing, OMEGA, alpha).unwrap().len() as i64;
        let two = build_continuum(0.0, 2.0 * duration, spacing, OMEGA, alpha)
            .unwrap()
            .len() as i64;
        assert!((two - 2 * one).abs() <= 1, "{duration}: {one} → {two}");
    }
}

#[test]
fn drive_vanishes_outside_truncated_support() {
    let seq = build_regular(2, 300.0, 300.0, OMEGA, C64::new(2.0, 0.0)).unwrap();
    let r = 10.0 / OMEGA;
    assert_eq!(seq.value(300.0 - r - 1e-6).norm(), 0.0);
    assert_eq!(seq.value(600.0 + r + 1e-6).norm(), 0.0);
    assert!(seq.value(300.0).norm() > 0.0);
}
