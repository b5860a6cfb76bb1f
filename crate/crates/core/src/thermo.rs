//! Quantum-thermodynamic observables: energy, power, heat current, entropy
//! rate and entropy production, plus cumulative work and heat.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Sample;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::model::{Liouvillian, SystemModel};
use crate::state::{entropy_from_spectrum, matrix_entropy, SUPPORT_EPS};

/// Purity above which `ln ρ` is considered singular and the entropy rate is
/// taken by forward differencing instead.
pub const NEAR_PURE_PURITY: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ThermoRecord {
    pub t: f64,
    pub energy: f64,
    pub power: f64,
    pub heat_current: f64,
    pub work: f64,
    pub heat: f64,
    pub entropy: f64,
    pub entropy_rate: f64,
    /// Only defined for single-bath models.
    pub entropy_production: Option<f64>,
    /// `|dE/dt - J - P|` with `dE/dt` assembled from the dissipator alone.
    pub first_law_residual: f64,
}

/// `E = Re tr[ρ (h0 + h1(g))]`.
pub fn energy(rho: &ComplexMatrix, model: &SystemModel, g: C64) -> f64 {
    rho.trace_product(&model.hamiltonian(g)).re
}

/// `P = Re tr[ρ dh1/dt]`.
pub fn power(rho: &ComplexMatrix, model: &SystemModel, dg_dt: C64) -> f64 {
    rho.trace_product(&model.drive_hamiltonian_rate(dg_dt)).re
}

/// `J = Re tr[ρ̇ (h0 + h1(g))]`.
pub fn heat_current(rho_dot: &ComplexMatrix, model: &SystemModel, g: C64) -> f64 {
    rho_dot.trace_product(&model.hamiltonian(g)).re
}

/// `dS/dt = -Re tr[ρ̇ ln ρ]`.
///
/// Either the full generator output or its dissipative part may be passed as
/// `rho_dot`: the commutator term is traceless against `ln ρ`. Near pure
/// states (purity > [`NEAR_PURE_PURITY`]) the logarithm is singular and the
/// rate is estimated as `[S(ρ + h ρ̇) - S(ρ)] / h` with `h = fd_step`; passing
/// the dissipative part keeps `ρ + hρ̇` positive to second order there.
pub fn entropy_rate(rho_dot: &ComplexMatrix, rho: &ComplexMatrix, fd_step: f64) -> Result<f64> {
    let purity = rho.trace_product(rho).re;
    if purity > NEAR_PURE_PURITY {
        if !(fd_step > 0.0) {
            return Err(Error::param("fd_step", "must be positive for near-pure states"));
        }
        let s0 = matrix_entropy(rho)?;
        let mut ahead = rho + &rho_dot.scale_real(fd_step);
        ahead.hermitize_in_place();
        let s1 = matrix_entropy(&ahead)?;
        return Ok((s1 - s0) / fd_step);
    }
    let e = hermitian_eigen(rho)?;
    let n = rho.dim();
    let mut acc = 0.0;
    for k in 0..n {
        let lambda = e.values[k];
        if lambda < -crate::state::CLAMP_WINDOW {
            return Err(Error::Positivity(lambda));
        }
        // ⟨v_k| ρ̇ |v_k⟩
        let mut w = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                w += e.vectors[(i, k)].conj() * rho_dot[(i, j)] * e.vectors[(j, k)];
            }
        }
        acc += w.re * lambda.max(SUPPORT_EPS).ln();
    }
    Ok(-acc)
}

/// `σ = dS/dt - β J` for a model coupled to a single bath at inverse
/// temperature `beta` (in units of `1/ħω0`).
pub fn entropy_production(entropy_rate: f64, heat_current: f64, model: &SystemModel, beta: f64) -> Result<f64> {
    if model.channels().len() > 1 {
        return Err(Error::Unsupported(format!(
            "entropy production is defined for a single bath; model has {} channels",
            model.channels().len()
        )));
    }
    Ok(entropy_rate - beta * heat_current)
}

/// Fills `work` and `heat` by trapezoidal integration of `power` and
/// `heat_current` over a uniform record grid.
pub fn accumulate(records: &mut [ThermoRecord]) -> Result<()> {
    if records.len() < 2 {
        if let Some(r) = records.first_mut() {
            r.work = 0.0;
            r.heat = 0.0;
        }
        return Ok(());
    }
    let h = records[1].t - records[0].t;
    if !(h > 0.0) {
        return Err(Error::NonUniformGrid(1));
    }
    for k in 1..records.len() {
        let dt = records[k].t - records[k - 1].t;
        if (dt - h).abs() > 1e-9 * records[k].t.abs().max(1.0) {
            return Err(Error::NonUniformGrid(k));
        }
    }
    records[0].work = 0.0;
    records[0].heat = 0.0;
    for k in 1..records.len() {
        let (prev, cur) = (records[k - 1], records[k]);
        records[k].work = prev.work + 0.5 * h * (prev.power + cur.power);
        records[k].heat = prev.heat + 0.5 * h * (prev.heat_current + cur.heat_current);
    }
    Ok(())
}

/// Everything computed at one record point beyond the thermodynamic record.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub record: ThermoRecord,
    pub rho_dot: ComplexMatrix,
    pub min_eigenvalue: f64,
}

/// Turns integrator samples into thermodynamic records.
#[derive(Debug, Clone)]
pub struct ThermoRecorder {
    model: SystemModel,
    generator: Liouvillian,
    beta: Option<f64>,
    fd_step: f64,
}

impl ThermoRecorder {
    /// `beta` is the bath inverse temperature in `1/ħω0`; pass `None` for
    /// multi-bath models, where entropy production is left undefined.
    pub fn new(model: &SystemModel, beta: Option<f64>, fd_step: f64) -> Result<Self> {
        if beta.is_some() && model.channels().len() > 1 {
            return Err(Error::Unsupported(
                "entropy production needs a single-bath model".into(),
            ));
        }
        Ok(Self {
            model: model.clone(),
            generator: Liouvillian::new(model),
            beta,
            fd_step,
        })
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn observe(&self, sample: &Sample<'_>) -> Result<Snapshot> {
        let rho = sample.rho;
        let model = &self.model;
        let rho_dot = self.generator.apply(sample.g, rho);
        let dissipative = model.dissipator(rho)?;
        let h = model.hamiltonian(sample.g);

        let e = rho.trace_product(&h).re;
        let p = power(rho, model, sample.dg_dt);
        let j = rho_dot.trace_product(&h).re;
        // Independent route: the commutator carries no energy, so
        // dE/dt = tr(𝒟[ρ] H) + tr(ρ dH/dt).
        let de_dt = dissipative.trace_product(&h).re + p;

        let eig = hermitian_eigen(rho)?;
        let min_eigenvalue = eig.values[0];
        let s = entropy_from_spectrum(&eig.values)?;
        let s_dot = entropy_rate(&dissipative, rho, self.fd_step)?;
        let sigma = match self.beta {
            Some(beta) => Some(entropy_production(s_dot, j, model, beta)?),
            None => None,
        };

        Ok(Snapshot {
            record: ThermoRecord {
                t: sample.t,
                energy: e,
                power: p,
                heat_current: j,
                work: 0.0,
                heat: 0.0,
                entropy: s,
                entropy_rate: s_dot,
                entropy_production: sigma,
                first_law_residual: (de_dt - j - p).abs(),
            },
            rho_dot,
            min_eigenvalue,
        })
    }
}
