//! Gaussian photon-pulse trains and the complex drive amplitude `g(t)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pulses farther than this many `1/Ω` from `t` are skipped.
pub const TRUNCATION_RADIUS: f64 = 10.0;

/// Anything that supplies a drive amplitude and its exact time derivative.
pub trait Drive {
    fn value(&self, t: f64) -> C64;
    fn derivative(&self, t: f64) -> C64;
}

/// No drive at all.
#[derive(Debug, Clone, Copy, Default)]
pub struct Undriven;

impl Drive for Undriven {
    fn value(&self, _t: f64) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn derivative(&self, _t: f64) -> C64 {
        C64::new(0.0, 0.0)
    }
}

/// Single normalized wave packet
/// `ξ(t) = (Ω²/2π)^{1/4} exp[-Ω²(t - t_i)²/4 - iω0 t]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulse {
    pub peak_time: f64,
    pub bandwidth: f64,
    pub carrier: f64,
}

impl GaussianPulse {
    pub fn new(peak_time: f64, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::param("bandwidth", format!("must be positive, got {bandwidth}")));
        }
        Ok(Self {
            peak_time,
            bandwidth,
            carrier: 1.0,
        })
    }

    pub fn peak_amplitude(&self) -> f64 {
        (self.bandwidth * self.bandwidth / (2.0 * PI)).powf(0.25)
    }

    pub fn support_radius(&self) -> f64 {
        TRUNCATION_RADIUS / self.bandwidth
    }

    pub fn value(&self, t: f64) -> C64 {
        let x = t - self.peak_time;
        let envelope = self.peak_amplitude() * (-self.bandwidth * self.bandwidth * x * x / 4.0).exp();
        C64::from_polar(envelope, -self.carrier * t)
    }

    /// `dξ/dt = [-Ω²(t - t_i)/2 - iω0] ξ`.
    pub fn derivative(&self, t: f64) -> C64 {
        let x = t - self.peak_time;
        C64::new(-self.bandwidth * self.bandwidth * x / 2.0, -self.carrier) * self.value(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseMode {
    Regular,
    Irregular,
    Continuum,
}

/// `g(t) = α Σ_i ξ(t; t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    amplitude: C64,
    pulses: Vec<GaussianPulse>,
    mode: PulseMode,
    max_radius: f64,
}

impl PulseSequence {
    pub fn new(amplitude: C64, pulses: Vec<GaussianPulse>, mode: PulseMode) -> Result<Self> {
        if pulses.windows(2).any(|w| !(w[1].peak_time > w[0].peak_time)) {
            return Err(Error::param("pulses", "peak times must be strictly increasing"));
        }
        let max_radius = pulses.iter().map(|p| p.support_radius()).fold(0.0, f64::max);
        Ok(Self {
            amplitude,
            pulses,
            mode,
            max_radius,
        })
    }

    pub fn empty() -> Self {
        Self {
            amplitude: C64::new(0.0, 0.0),
            pulses: Vec::new(),
            mode: PulseMode::Regular,
            max_radius: 0.0,
        }
    }

    pub fn amplitude(&self) -> C64 {
        self.amplitude
    }

    /// `⟨n⟩ = |α|²`.
    pub fn mean_photon_number(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    pub fn pulses(&self) -> &[GaussianPulse] {
        &self.pulses
    }

    pub fn peak_times(&self) -> Vec<f64> {
        self.pulses.iter().map(|p| p.peak_time).collect()
    }

    pub fn mode(&self) -> PulseMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    fn active(&self, t: f64) -> &[GaussianPulse] {
        let lo = self.pulses.partition_point(|p| p.peak_time < t - self.max_radius);
        let hi = self.pulses.partition_point(|p| p.peak_time <= t + self.max_radius);
        &self.pulses[lo..hi]
    }

    pub fn value(&self, t: f64) -> C64 {
        let sum: C64 = self
            .active(t)
            .iter()
            .filter(|p| (t - p.peak_time).abs() <= p.support_radius())
            .map(|p| p.value(t))
            .sum();
        self.amplitude * sum
    }

    pub fn derivative(&self, t: f64) -> C64 {
        let sum: C64 = self
            .active(t)
            .iter()
            .filter(|p| (t - p.peak_time).abs() <= p.support_radius())
            .map(|p| p.derivative(t))
            .sum();
        self.amplitude * sum
    }
}

impl Drive for PulseSequence {
    fn value(&self, t: f64) -> C64 {
        PulseSequence::value(self, t)
    }
    fn derivative(&self, t: f64) -> C64 {
        PulseSequence::derivative(self, t)
    }
}

/// `α = √⟨n⟩ e^{iφ}`.
pub fn coherent_amplitude(mean_photons: f64, phase: f64) -> Result<C64> {
    if !(mean_photons >= 0.0) || !mean_photons.is_finite() {
        return Err(Error::param(
            "mean-photons",
            format!("must be >= 0, got {mean_photons}"),
        ));
    }
    Ok(C64::from_polar(mean_photons.sqrt(), phase))
}

/// Peaks at `first_peak + k·spacing`.
pub fn build_regular(
    n_pulses: usize,
    first_peak: f64,
    spacing: f64,
    bandwidth: f64,
    amplitude: C64,
) -> Result<PulseSequence> {
    if n_pulses < 1 {
        return Err(Error::param("count", "need at least one pulse"));
    }
    if !(spacing > 0.0) {
        return Err(Error::param("spacing", format!("must be positive, got {spacing}")));
    }
    let pulses = (0..n_pulses)
        .map(|k| GaussianPulse::new(first_peak + k as f64 * spacing, bandwidth))
        .collect::<Result<Vec<_>>>()?;
    PulseSequence::new(amplitude, pulses, PulseMode::Regular)
}

/// Regular grid with each peak displaced by a seeded uniform offset in
/// `±jitter_fraction · nominal_spacing`.
#[allow(clippy::too_many_arguments)]
pub fn build_irregular(
    n_pulses: usize,
    first_peak: f64,
    nominal_spacing: f64,
    jitter_fraction: f64,
    seed: u64,
    bandwidth: f64,
    amplitude: C64,
) -> Result<PulseSequence> {
    if !(0.0..0.5).contains(&jitter_fraction) {
        return Err(Error::param(
            "jitter",
            format!("must lie in [0, 0.5), got {jitter_fraction}"),
        ));
    }
    let regular = build_regular(n_pulses, first_peak, nominal_spacing, bandwidth, amplitude)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_width = jitter_fraction * nominal_spacing;
    let mut peaks: Vec<f64> = regular
        .pulses()
        .iter()
        .map(|p| p.peak_time + half_width * rng.gen_range(-1.0..=1.0))
        .collect();
    // Offsets below half the spacing cannot reorder peaks except through
    // rounding; clamp so ordering holds regardless.
    let min_gap = (1.0 - 2.0 * jitter_fraction) * nominal_spacing;
    for k in 1..peaks.len() {
        if peaks[k] <= peaks[k - 1] {
            peaks[k] = peaks[k - 1] + min_gap.max(f64::EPSILON * peaks[k - 1].abs().max(1.0));
        }
    }
    let pulses = peaks
        .into_iter()
        .map(|t| GaussianPulse::new(t, bandwidth))
        .collect::<Result<Vec<_>>>()?;
    PulseSequence::new(amplitude, pulses, PulseMode::Irregular)
}

/// Overlapping pulses tiling `[first_peak, first_peak + duration]`.
pub fn build_continuum(
    first_peak: f64,
    duration: f64,
    spacing: f64,
    bandwidth: f64,
    amplitude: C64,
) -> Result<PulseSequence> {
    if !(spacing > 0.0) {
        return Err(Error::param("spacing", format!("must be positive, got {spacing}")));
    }
    if spacing > 2.0 / bandwidth {
        return Err(Error::param(
            "spacing",
            format!("continuum mode needs spacing <= 2/Ω = {}", 2.0 / bandwidth),
        ));
    }
    if !(duration >= 0.0) {
        return Err(Error::param("duration", format!("must be >= 0, got {duration}")));
    }
    let count = (duration / spacing + 1e-9).floor() as usize + 1;
    let pulses = (0..count)
        .map(|k| GaussianPulse::new(first_peak + k as f64 * spacing, bandwidth))
        .collect::<Result<Vec<_>>>()?;
    PulseSequence::new(amplitude, pulses, PulseMode::Continuum)
}

#[cfg(test)]
mod tests {
    use super::*;

    const OMEGA: f64 = 1.0 / (4.0 * PI);

    #[test]
    fn peak_value() {
        // ω0 t_i = 2π·50 so the carrier phase is 1
        let p = GaussianPulse::new(2.0 * PI * 50.0, 1.0).unwrap();
        let v = p.value(p.peak_time);
        assert!((v.re - (1.0 / (2.0 * PI)).powf(0.25)).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
        assert!((v.re - 0.6316).abs() < 1e-4);
    }

    #[test]
    fn envelope_at_two_widths() {
        let p = GaussianPulse::new(3.0, OMEGA).unwrap();
        let peak = p.peak_amplitude();
        for t in [3.0 + 2.0 / OMEGA, 3.0 - 2.0 / OMEGA] {
            assert!((p.value(t).norm() - peak * (-1f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_is_negligible() {
        let p = GaussianPulse::new(0.0, OMEGA).unwrap();
        assert!(p.value(10.01 / OMEGA).norm() < 1e-10);
    }

    #[test]
    fn empty_sequence() {
        let s = PulseSequence::empty();
        assert_eq!(s.value(1.0), C64::new(0.0, 0.0));
        assert_eq!(s.derivative(1.0), C64::new(0.0, 0.0));
    }

    #[test]
    fn derivative_at_peak_is_pure_carrier() {
        let s = build_regular(1, 5.0, 1.0, OMEGA, C64::new(1.3, 0.0)).unwrap();
        let v = s.value(5.0);
        let d = s.derivative(5.0);
        assert_eq!(d, C64::new(0.0, -1.0) * v);
    }

    #[test]
    fn regular_builder() {
        let t0 = 2.0 * PI * 50.0;
        let s = build_regular(1, t0, 1.0, OMEGA, C64::new(1.0, 0.0)).unwrap();
        assert_eq!(s.peak_times(), vec![t0]);
        let s = build_regular(3, 10.0, 7.0, OMEGA, C64::new(1.0, 0.0)).unwrap();
        assert_eq!(s.peak_times(), vec![10.0, 17.0, 24.0]);
        assert!(build_regular(0, 0.0, 1.0, OMEGA, C64::new(1.0, 0.0)).is_err());
        assert!(build_regular(2, 0.0, 0.0, OMEGA, C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn irregular_zero_jitter_is_regular() {
        let a = C64::new(1.0, 0.0);
        let r = build_regular(6, 100.0, 300.0, OMEGA, a).unwrap();
        let i = build_irregular(6, 100.0, 300.0, 0.0, 42, OMEGA, a).unwrap();
        assert_eq!(r.pulses(), i.pulses());
    }

    #[test]
    fn irregular_is_deterministic() {
        let a = C64::new(1.0, 0.0);
        let x = build_irregular(6, 100.0, 300.0, 0.3, 7, OMEGA, a).unwrap();
        let y = build_irregular(6, 100.0, 300.0, 0.3, 7, OMEGA, a).unwrap();
        assert_eq!(x, y);
        let z = build_irregular(6, 100.0, 300.0, 0.3, 8, OMEGA, a).unwrap();
        assert_ne!(x.peak_times(), z.peak_times());
        assert!(build_irregular(6, 100.0, 300.0, 0.5, 7, OMEGA, a).is_err());
    }

    #[test]
    fn continuum_builder() {
        let a = C64::new(1.0, 0.0);
        let s = build_continuum(50.0, 0.0, 1.0 / OMEGA, OMEGA, a).unwrap();
        assert_eq!(s.len(), 1);
        let short = build_continuum(50.0, 400.0, 1.0 / OMEGA, OMEGA, a).unwrap();
        let long = build_continuum(50.0, 800.0, 1.0 / OMEGA, OMEGA, a).unwrap();
        assert!((long.len() as i64 - 2 * short.len() as i64).abs() <= 1);
        assert!(build_continuum(50.0, 100.0, 3.0 / OMEGA, OMEGA, a).is_err());
    }

    #[test]
    fn coherent_amplitude_is_sqrt_n() {
        let a = coherent_amplitude(10.0, 0.0).unwrap();
        assert!((a.norm_sqr() - 10.0).abs() < 1e-12);
        assert!(coherent_amplitude(-1.0, 0.0).is_err());
    }
}
