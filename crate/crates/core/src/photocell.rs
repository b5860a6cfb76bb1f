//! Four-level donor/acceptor photocell.
//!
//! Levels: `|0⟩`, `|1⟩` form the donor, `|2⟩`, `|3⟩` the acceptor. Energies are
//! given in eV and stored in units of the donor gap, which plays the role of
//! `ħω0`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{DissipationChannel, SystemModel};
use crate::state::matrix_entropy;
use crate::two_level::{bose_occupation, BOLTZMANN_EV};

/// Populations below this leave the voltage undefined.
pub const POPULATION_EPS: f64 = 1e-9;
/// Smoothed donor power below this leaves the efficiency undefined.
pub const POWER_EPS: f64 = 1e-9;
/// Largest inter-block coherence accepted by [`donor_acceptor_split`].
pub const BLOCK_TOLERANCE: f64 = 1e-10;
/// Efficiency smoothing window, in carrier periods.
pub const SMOOTHING_PERIODS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct PhotocellParams {
    /// `E1 − E0` in eV.
    pub donor_gap: f64,
    /// `E2 − E3` in eV.
    pub acceptor_gap: f64,
    /// `E1 − E2 = E3 − E0` in eV.
    pub phonon_energy: f64,
    /// Rates in units of `ω0`.
    pub gamma01: f64,
    pub gamma12: f64,
    pub gamma30: f64,
    pub big_gamma: f64,
    /// Ambient temperature in K, shared by the photon and phonon baths.
    pub tc: f64,
    pub nbar_override: Option<f64>,
}

impl Default for PhotocellParams {
    fn default() -> Self {
        Self {
            donor_gap: 1.8,
            acceptor_gap: 1.6,
            phonon_energy: 0.1,
            gamma01: 1e-3,
            gamma12: 1e-2,
            gamma30: 1e-2,
            big_gamma: 0.1,
            tc: 300.0,
            nbar_override: None,
        }
    }
}

impl PhotocellParams {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("gamma01", self.gamma01),
            ("gamma12", self.gamma12),
            ("gamma30", self.gamma30),
            ("big-gamma", self.big_gamma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(field, format!("must be >= 0, got {v}")));
            }
        }
        if !(self.acceptor_gap > 0.0 && self.donor_gap > self.acceptor_gap && self.donor_gap.is_finite()) {
            return Err(Error::param(
                "donor-gap",
                format!(
                    "need donor-gap > acceptor-gap > 0, got {} and {}",
                    self.donor_gap, self.acceptor_gap
                ),
            ));
        }
        let expected = 0.5 * (self.donor_gap - self.acceptor_gap);
        if (self.phonon_energy - expected).abs() > 1e-9 {
            return Err(Error::param(
                "phonon-energy",
                format!(
                    "must equal (donor-gap - acceptor-gap)/2 = {expected}, got {}",
                    self.phonon_energy
                ),
            ));
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

    /// Level energies `[E0, E1, E2, E3]` in eV.
    pub fn levels_ev(&self) -> [f64; 4] {
        let e3 = self.phonon_energy;
        [0.0, self.donor_gap, e3 + self.acceptor_gap, e3]
    }

    /// Level energies in units of the donor gap.
    pub fn levels(&self) -> [f64; 4] {
        self.levels_ev().map(|e| e / self.donor_gap)
    }

    pub fn photon_occupation(&self) -> f64 {
        self.nbar_override
            .unwrap_or_else(|| bose_occupation(self.donor_gap, self.tc))
    }

    pub fn phonon_occupation(&self) -> f64 {
        bose_occupation(self.phonon_energy, self.tc)
    }

    /// `k_B T` in eV.
    pub fn thermal_energy(&self) -> f64 {
        BOLTZMANN_EV * self.tc
    }
}

pub fn build_photocell(params: &PhotocellParams) -> Result<SystemModel> {
    params.validate()?;
    let [e0, e1, e2, e3] = params.levels();
    let h0 = ComplexMatrix::diagonal(&[e0, e1, e2, e3]);
    let lower01 = ComplexMatrix::ket_bra(4, 0, 1);
    let n_ph = params.phonon_occupation();
    let channels = vec![
        DissipationChannel::new(lower01.clone(), params.gamma01, params.photon_occupation())?,
        DissipationChannel::new(ComplexMatrix::ket_bra(4, 2, 1), params.gamma12, n_ph)?,
        DissipationChannel::new(ComplexMatrix::ket_bra(4, 0, 3), params.gamma30, n_ph)?,
        DissipationChannel::new(ComplexMatrix::ket_bra(4, 3, 2), params.big_gamma, 0.0)?,
    ];
    SystemModel::new(h0, lower01, params.gamma01, channels)
}

/// Donor/acceptor decomposition of the thermodynamic quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Split {
    pub e_d: f64,
    pub e_a: f64,
    pub j_d: f64,
    pub j_a: f64,
    pub p_d: f64,
    pub s_d: f64,
    pub s_a: f64,
}

/// Largest `|ρ_ij|` with `i` in the donor and `j` in the acceptor block.
pub fn inter_block_coherence(rho: &ComplexMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..2 {
        for j in 2..4 {
            worst = worst.max(rho[(i, j)].norm()).max(rho[(j, i)].norm());
        }
    }
    worst
}

/// Splits `ρ = ρ_D ⊕ ρ_A` into unnormalized blocks and evaluates energies,
/// heat currents and entropies per block.
pub fn donor_acceptor_split(
    rho: &ComplexMatrix,
    model: &SystemModel,
    g: C64,
    dg_dt: C64,
    rho_dot: &ComplexMatrix,
) -> Result<Split> {
    if rho.dim() != 4 || model.dim() != 4 || rho_dot.dim() != 4 {
        return Err(Error::Shape("donor/acceptor split needs a four-level state".into()));
    }
    let coherence = inter_block_coherence(rho);
    if coherence > BLOCK_TOLERANCE {
        return Err(Error::BlockStructure(coherence));
    }
    let h = model.hamiltonian(g);
    let (h_d, h_a) = (h.block(0, 2), h.block(2, 2));
    let (rho_d, rho_a) = (rho.block(0, 2), rho.block(2, 2));
    let (dot_d, dot_a) = (rho_dot.block(0, 2), rho_dot.block(2, 2));
    let dh = model.drive_hamiltonian_rate(dg_dt).block(0, 2);
    Ok(Split {
        e_d: rho_d.trace_product(&h_d).re,
        e_a: rho_a.trace_product(&h_a).re,
        j_d: dot_d.trace_product(&h_d).re,
        j_a: dot_a.trace_product(&h_a).re,
        p_d: rho_d.trace_product(&dh).re,
        s_d: matrix_entropy(&rho_d)?,
        s_a: matrix_entropy(&rho_a)?,
    })
}

/// Load observables at one instant. Current is in units of `eω0`, voltage in
/// volts, powers in `ħω0·ω0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectricalRecord {
    pub current: f64,
    pub voltage: Option<f64>,
    pub output_power: Option<f64>,
    pub donor_power: f64,
}

/// `I = Γρ22`, `eV = E2 − E3 + k_BT ln(ρ22/ρ33)`, `P_out = I·V`.
pub fn electrical(rho: &ComplexMatrix, params: &PhotocellParams, donor_power: f64) -> ElectricalRecord {
    let (p2, p3) = (rho[(2, 2)].re, rho[(3, 3)].re);
    let current = params.big_gamma * p2;
    let voltage = if p2.min(p3) > POPULATION_EPS {
        Some(params.acceptor_gap + params.thermal_energy() * (p2 / p3).ln())
    } else {
        None
    };
    let output_power = match voltage {
        Some(v) => Some(current * v / params.donor_gap),
        None if current == 0.0 => Some(0.0),
        None => None,
    };
    ElectricalRecord {
        current,
        voltage,
        output_power,
        donor_power,
    }
}

/// Trailing moving averages of `P_out` and `P_D` over `window` records and
/// their ratio. Undefined output powers count as zero in the average.
#[derive(Debug, Clone)]
pub struct EfficiencyFilter {
    window: usize,
    out: std::collections::VecDeque<(f64, f64)>,
    sum_out: f64,
    sum_in: f64,
    count: usize,
}

impl EfficiencyFilter {
    pub fn new(window: usize) -> Self {
        let window = window.max(1);
        Self {
            window,
            out: std::collections::VecDeque::with_capacity(window + 1),
            sum_out: 0.0,
            sum_in: 0.0,
            count: 0,
        }
    }

    /// Window length in records for a record spacing `h` (units of `1/ω0`).
    pub fn for_spacing(h: f64) -> Self {
        Self::new((SMOOTHING_PERIODS * std::f64::consts::TAU / h).round() as usize)
    }

    /// Adds a record and returns the smoothed efficiency.
    pub fn push(&mut self, output_power: Option<f64>, donor_power: f64) -> Option<f64> {
        let p_out = output_power.unwrap_or(0.0);
        self.out.push_back((p_out, donor_power));
        self.count += 1;
        self.sum_out += p_out;
        self.sum_in += donor_power;
        if self.out.len() > self.window {
            let (a, b) = self.out.pop_front().expect("non-empty window");
            self.sum_out -= a;
            self.sum_in -= b;
        }
        // Refresh the running sums once per window to bound cancellation error.
        if self.out.len() == self.window && self.count.is_multiple_of(self.window) {
            self.sum_out = self.out.iter().map(|x| x.0).sum();
            self.sum_in = self.out.iter().map(|x| x.1).sum();
        }
        let n = self.out.len() as f64;
        let mean_in = self.sum_in / n;
        (mean_in > POWER_EPS).then(|| (self.sum_out / n) / mean_in)
    }
}

/// Instantaneous `P_out/P_D`, undefined when `|P_D| ≤ POWER_EPS`.
pub fn instantaneous_efficiency(rec: &ElectricalRecord) -> Option<f64> {
    match rec.output_power {
        Some(p) if rec.donor_power.abs() > POWER_EPS => Some(p / rec.donor_power),
        _ => None,
    }
}
