//! Two-level system driven by photon pulses and coupled to a cold bath.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{DissipationChannel, SystemModel};
use crate::state::DensityOperator;

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV: f64 = 8.617333e-5;

/// SI constants for the Weisskopf–Wigner rate.
pub mod si {
    pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;
    pub const HBAR: f64 = 1.054571817e-34;
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    pub const ELECTRON_VOLT: f64 = 1.602176634e-19;
    pub const DEBYE: f64 = 3.33564e-30;
}

/// Mean occupation `1/(e^{E/k_BT} − 1)` of a bosonic mode of energy `energy`
/// (eV) at `temperature` (K). Returns 0 when the exponential overflows.
pub fn bose_occupation(energy: f64, temperature: f64) -> f64 {
    let x = energy / (BOLTZMANN_EV * temperature);
    1.0 / x.exp_m1()
}

/// `ħω/(k_BT)` for an energy in eV.
pub fn inverse_temperature(energy: f64, temperature: f64) -> f64 {
    energy / (BOLTZMANN_EV * temperature)
}

/// Spontaneous decay rate (1/s) of a transition with dipole `dipole` (C·m)
/// at angular frequency `omega0` (rad/s).
pub fn ww_rate(dipole: f64, omega0: f64) -> f64 {
    use si::*;
    4.0 * omega0.powi(3) * dipole * dipole
        / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * 3.0 * HBAR * SPEED_OF_LIGHT.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct TwoLevelParams {
    /// `ħω0` in eV.
    pub gap: f64,
    /// Decay rate in units of `ω0`.
    pub gamma: f64,
    /// Cold-bath temperature in K.
    pub tc: f64,
    /// Replaces the Bose occupation of the cold bath, e.g. 0 for the optical limit.
    pub nbar_override: Option<f64>,
}

impl Default for TwoLevelParams {
    fn default() -> Self {
        Self {
            gap: 1.0,
            gamma: 1e-2,
            tc: 300.0,
            nbar_override: None,
        }
    }
}

impl TwoLevelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap > 0.0 && self.gap.is_finite()) {
            return Err(Error::param("gap", format!("must be positive, got {}", self.gap)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::param("gamma", format!("must be >= 0, got {}", self.gamma)));
        }
        if !(self.tc > 0.0 && self.tc.is_finite()) {
            return Err(Error::param("tc", format!("must be positive, got {}", self.tc)));
        }
        if let Some(n) = self.nbar_override {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(Error::param("nbar-override", format!("must be >= 0, got {n}")));
            }
        }
        Ok(())
    }

    pub fn occupation(&self) -> f64 {
        self.nbar_override.unwrap_or_else(|| bose_occupation(self.gap, self.tc))
    }

    /// Bath inverse temperature in units of `1/ħω0`.
    pub fn beta(&self) -> f64 {
        inverse_temperature(self.gap, self.tc)
    }
}

/// `σz = |0⟩⟨0| − |1⟩⟨1|`.
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[1.0, -1.0])
}

/// `σ− = |0⟩⟨1|`.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::ket_bra(2, 0, 1)
}

/// `h0 = −σz/2` in units of `ħω0`, so `|1⟩` is the upper level.
pub fn two_level_h0() -> ComplexMatrix {
    sigma_z().scale_real(-0.5)
}

pub fn build_two_level(params: &TwoLevelParams) -> Result<SystemModel> {
    params.validate()?;
    let channel = DissipationChannel::new(sigma_minus(), params.gamma, params.occupation())?;
    SystemModel::new(two_level_h0(), sigma_minus(), params.gamma, vec![channel])
}

/// `(|0⟩ + |1⟩)/√2`.
pub fn superposition() -> DensityOperator {
    let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityOperator::pure(&[a, a]).expect("normalized superposition")
}

/// Closed-form amplitude damping into a zero-temperature bath under
/// `h0 = −σz/2` with no drive.
pub fn analytic_decay(rho0: &DensityOperator, gamma: f64, t: f64) -> Result<DensityOperator> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: 2,
        });
    }
    let m = rho0.matrix();
    let p1 = m[(1, 1)].re * (-gamma * t).exp();
    // dρ01/dt = −i(E0 − E1)ρ01 − (γ/2)ρ01 with E0 − E1 = −1
    let c = m[(0, 1)] * C64::from_polar((-0.5 * gamma * t).exp(), t);
    let mut out = ComplexMatrix::zeros(2);
    out[(0, 0)] = C64::new(1.0 - p1, 0.0);
    out[(1, 1)] = C64::new(p1, 0.0);
    out[(0, 1)] = c;
    out[(1, 0)] = c.conj();
    DensityOperator::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, IntegrationConfig};
    use crate::pulse::Undriven;

    #[test]
    fn bose_factor_values() {
        let n = bose_occupation(1.0, 300.0);
        assert!((n / (-1.0 / (BOLTZMANN_EV * 300.0)).exp() - 1.0).abs() < 1e-12);
        assert!((n - 1.6e-17).abs() < 0.1e-17, "{n:e}");
        let n = bose_occupation(1.8, 5800.0);
        assert!((n - 0.02798).abs() < 1e-4, "{n}");

        // 6.5e-31 corresponds to 1.8 eV with k_BT rounded to 0.0259 eV, and
        // 0.0317 at 1.8 eV needs roughly 6000 K.
        let n = bose_occupation(1.8, 300.0);
        assert!((n - 5.77e-31).abs() < 0.01e-31, "{n:e}");
        let rounded = 1.0 / (1.8_f64 / 0.0259).exp_m1();
        assert!((rounded / 6.5e-31 - 1.0).abs() < 0.02, "{rounded:e}");
        let n = bose_occupation(1.8, 6000.0);
        assert!((n - 0.0317).abs() < 0.0005, "{n}");
    }

    #[test]
    fn bose_factor_classical_limit_and_underflow() {
        let (e, t) = (1e-4, 300.0);
        let n = bose_occupation(e, t);
        let classical = BOLTZMANN_EV * t / e;
        assert!((n / classical - 1.0).abs() < 0.01);
        assert_eq!(bose_occupation(100.0, 1.0), 0.0);
    }

    #[test]
    fn ww_rate_scaling_and_magnitude() {
        assert_eq!(ww_rate(0.0, 1e15), 0.0);
        let w = 1e15;
        assert!((ww_rate(1e-30, 2.0 * w) / ww_rate(1e-30, w) - 8.0).abs() < 1e-12);

        // Independent evaluation in Gaussian-style grouping:
        // γ = 4 ω³ d² / (3 ħ c³ · 4π ε0)
        let omega = si::ELECTRON_VOLT / si::HBAR;
        let d = si::DEBYE;
        let k = 1.0 / (4.0 * std::f64::consts::PI * si::VACUUM_PERMITTIVITY);
        let oracle = k * 4.0 * omega * omega * omega * d * d / (3.0 * si::HBAR * si::SPEED_OF_LIGHT.powi(3));
        let gamma = ww_rate(d, omega);
        assert!((gamma / oracle - 1.0).abs() < 1e-12);
        // ≈ 1.65e5 /s: a 1 Debye dipole at 1 eV lives for microseconds.
        assert!((gamma - 1.65e5).abs() < 0.02e5, "{gamma:e}");
    }

    #[test]
    fn default_model() {
        let p = TwoLevelParams::default();
        let m = build_two_level(&p).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.channels().len(), 1);
        assert!(m.channels()[0].occupation < 1e-16);
        assert!((p.beta() - 38.68).abs() < 0.01);

        let m = build_two_level(&TwoLevelParams {
            nbar_override: Some(0.0),
            ..p
        })
        .unwrap();
        assert_eq!(m.channels()[0].occupation, 0.0);
        assert_eq!(m.channels()[0].terms().len(), 1);

        assert!(build_two_level(&TwoLevelParams { gap: -1.0, ..p }).is_err());
        assert!(build_two_level(&TwoLevelParams { tc: 0.0, ..p }).is_err());
    }

    #[test]
    fn closed_system_conserves_energy() {
        let p = TwoLevelParams {
            gamma: 0.0,
            ..Default::default()
        };
        let m = build_two_level(&p).unwrap();
        let rho0 = superposition();
        let cfg = IntegrationConfig {
            dt: 0.02,
            t_start: 0.0,
            t_end: 20.0,
            record_every: 100,
        };
        let e0 = rho0.matrix().trace_product(m.h0()).re;
        evolve(&m, &Undriven, &rho0, &cfg, |s| {
            let e = s.rho.trace_product(m.h0()).re;
            assert!((e - e0).abs() < 1e-12);
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn analytic_decay_limits() {
        let rho0 = superposition();
        let same = analytic_decay(&rho0, 0.01, 0.0).unwrap();
        assert!((same.matrix() - rho0.matrix()).max_abs() < 1e-15);
        let late = analytic_decay(&rho0, 0.01, 1e5).unwrap();
        assert!((late.matrix() - DensityOperator::basis(2, 0).matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn analytic_decay_matches_integration() {
        let gamma = 1e-2;
        let p = TwoLevelParams {
            nbar_override: Some(0.0),
            gamma,
            ..Default::default()
        };
        let m = build_two_level(&p).unwrap();
        let rho0 = superposition();
        let cfg = IntegrationConfig {
            dt: 0.02,
            t_start: 0.0,
            t_end: 200.0,
            record_every: 50,
        };
        let mut worst: f64 = 0.0;
        evolve(&m, &Undriven, &rho0, &cfg, |s| {
            if [50.0, 100.0, 200.0].iter().any(|&t| (s.t - t).abs() < 1e-9) {
                let exact = analytic_decay(&rho0, gamma, s.t).unwrap();
                worst = worst.max((s.rho - exact.matrix()).max_abs());
            }
            Ok(())
        })
        .unwrap();
        assert!(worst < 1e-6, "{worst:e}");
    }
}
