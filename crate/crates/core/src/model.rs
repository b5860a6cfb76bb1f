//! System models and the Lindblad generator.
//!
//! Units: ħ = 1 and the driven transition frequency ω0 = 1, so energies are in
//! ħω0 and rates in ω0.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{commutator, hermitian_eigen, matmul_into, ComplexMatrix};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A thermal jump channel. With occupation `n̄` it contributes the pair
/// `(rate/2)(n̄+1) 𝒟[L]` and `(rate/2) n̄ 𝒟[L†]`, where
/// `𝒟[A]ρ = 2AρA† - A†Aρ - ρA†A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationChannel {
    pub jump: ComplexMatrix,
    pub rate: f64,
    pub occupation: f64,
}

impl DissipationChannel {
    pub fn new(jump: ComplexMatrix, rate: f64, occupation: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::param("rate", format!("must be finite and >= 0, got {rate}")));
        }
        if !(occupation >= 0.0) || !occupation.is_finite() {
            return Err(Error::param(
                "occupation",
                format!("must be finite and >= 0, got {occupation}"),
            ));
        }
        Ok(Self { jump, rate, occupation })
    }

    /// `(prefactor, operator)` for the emission and (if `n̄ > 0`) absorption terms.
    pub fn terms(&self) -> Vec<(f64, ComplexMatrix)> {
        let mut out = vec![(0.5 * self.rate * (self.occupation + 1.0), self.jump.clone())];
        if self.occupation > 0.0 {
            out.push((0.5 * self.rate * self.occupation, self.jump.adjoint()));
        }
        out
    }
}

/// Static Hamiltonian, drive coupling and dissipation channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    h0: ComplexMatrix,
    drive_lower: ComplexMatrix,
    drive_rate: f64,
    channels: Vec<DissipationChannel>,
}

impl SystemModel {
    pub fn new(
        h0: ComplexMatrix,
        drive_lower: ComplexMatrix,
        drive_rate: f64,
        channels: Vec<DissipationChannel>,
    ) -> Result<Self> {
        let dim = h0.dim();
        let herm = h0.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::NotHermitian(herm));
        }
        if drive_lower.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: drive_lower.dim(),
            });
        }
        if !(drive_rate >= 0.0) {
            return Err(Error::param("drive_rate", format!("must be >= 0, got {drive_rate}")));
        }
        if !lowers_energy(&h0, &drive_lower)? {
            return Err(Error::param("drive_lower", "must lower the energy of h0"));
        }
        for ch in &channels {
            if ch.jump.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: ch.jump.dim(),
                });
            }
        }
        Ok(Self {
            h0,
            drive_lower,
            drive_rate,
            channels,
        })
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn h0(&self) -> &ComplexMatrix {
        &self.h0
    }

    pub fn drive_lower(&self) -> &ComplexMatrix {
        &self.drive_lower
    }

    pub fn drive_rate(&self) -> f64 {
        self.drive_rate
    }

    pub fn channels(&self) -> &[DissipationChannel] {
        &self.channels
    }

    /// `h1(g) = i√γ (g* σ- - g σ+)`.
    pub fn drive_hamiltonian(&self, g: C64) -> ComplexMatrix {
        let sqrt_rate = self.drive_rate.sqrt();
        let lower = self.drive_lower.scale(I * sqrt_rate * g.conj());
        let raise = self.drive_lower.adjoint().scale(I * sqrt_rate * g);
        &lower - &raise
    }

    /// `h0 + h1(g)`.
    pub fn hamiltonian(&self, g: C64) -> ComplexMatrix {
        &self.h0 + &self.drive_hamiltonian(g)
    }

    /// `dh1/dt` for a given `dg/dt`; `h1` is linear in `g`.
    pub fn drive_hamiltonian_rate(&self, dg_dt: C64) -> ComplexMatrix {
        self.drive_hamiltonian(dg_dt)
    }

    /// Same model with a different list of channels.
    pub fn with_channels(&self, channels: Vec<DissipationChannel>) -> Result<Self> {
        Self::new(self.h0.clone(), self.drive_lower.clone(), self.drive_rate, channels)
    }

    /// Sum of the dissipators of every channel.
    pub fn dissipator(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.dim());
        for ch in &self.channels {
            out += &dissipator_apply(ch, rho)?;
        }
        Ok(out)
    }
}

/// Every nonzero matrix element `⟨i|op|j⟩` in the eigenbasis of `h0` must
/// satisfy `E_i < E_j`.
fn lowers_energy(h0: &ComplexMatrix, op: &ComplexMatrix) -> Result<bool> {
    let e = hermitian_eigen(h0)?;
    let v = &e.vectors;
    let rotated = v.adjoint().matmul(op)?.matmul(v)?;
    let tol = 1e-12 * op.max_abs().max(1e-300);
    let n = h0.dim();
    Ok((0..n).all(|i| (0..n).all(|j| rotated[(i, j)].norm() <= tol || e.values[i] < e.values[j])))
}

fn lindblad_term(op: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let op_dag = op.adjoint();
    let jump = op.matmul(rho)?.matmul(&op_dag)?;
    let number = op_dag.matmul(op)?;
    let anti = &number.matmul(rho)? + &rho.matmul(&number)?;
    Ok(&jump.scale_real(2.0) - &anti)
}

/// One channel's contribution to `dρ/dt`.
pub fn dissipator_apply(channel: &DissipationChannel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if channel.jump.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: channel.jump.dim(),
            right: rho.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for (coef, op) in channel.terms() {
        if coef != 0.0 {
            out += &lindblad_term(&op, rho)?.scale_real(coef);
        }
    }
    Ok(out)
}

/// `-i[h0 + h1(g), ρ] + Σ 𝒟_k[ρ]`, assembled term by term.
///
/// This is the reference form; [`Liouvillian`] is the allocation-free kernel
/// used by the integrator.
pub fn liouvillian_apply(model: &SystemModel, drive_amp: C64, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: model.dim(),
            right: rho.dim(),
        });
    }
    let h = model.hamiltonian(drive_amp);
    let mut out = commutator(&h, rho)?.scale(-I);
    out += &model.dissipator(rho)?;
    Ok(out)
}

/// Precompiled generator. Uses the effective non-Hermitian Hamiltonian
/// `H_eff = H - i Σ c_k L_k†L_k`, so that
/// `L[ρ] = -i(H_eff ρ - ρ H_eff†) + Σ 2 c_k L_k ρ L_k†`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    /// `h0 - i Σ c_k L_k†L_k`
    h_eff0: Vec<C64>,
    /// `√γ σ-`
    lower: Vec<C64>,
    jumps: Vec<Jump>,
}

#[derive(Debug, Clone)]
struct Jump {
    coef2: f64,
    op: Vec<C64>,
    op_dag: Vec<C64>,
}

/// Scratch buffers for [`Liouvillian::apply_into`].
#[derive(Debug, Clone)]
pub struct Workspace {
    h: Vec<C64>,
    t1: Vec<C64>,
    t2: Vec<C64>,
}

impl Workspace {
    pub fn new(dim: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim * dim];
        Self {
            h: z.clone(),
            t1: z.clone(),
            t2: z,
        }
    }
}

impl Liouvillian {
    pub fn new(model: &SystemModel) -> Self {
        let dim = model.dim();
        let mut h_eff0 = model.h0().clone();
        let mut jumps = Vec::new();
        for ch in model.channels() {
            for (coef, op) in ch.terms() {
                if coef == 0.0 {
                    continue;
                }
                let op_dag = op.adjoint();
                let number = &op_dag * &op;
                h_eff0 = &h_eff0 - &number.scale(I * coef);
                jumps.push(Jump {
                    coef2: 2.0 * coef,
                    op: op.as_slice().to_vec(),
                    op_dag: op_dag.as_slice().to_vec(),
                });
            }
        }
        let lower = model.drive_lower().scale_real(model.drive_rate().sqrt());
        Self {
            dim,
            h_eff0: h_eff0.as_slice().to_vec(),
            lower: lower.as_slice().to_vec(),
            jumps,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `L[ρ]` for drive amplitude `g` into `out`.
    pub fn apply_into(&self, g: C64, rho: &[C64], out: &mut [C64], ws: &mut Workspace) {
        let n = self.dim;
        // H_eff(g) = H_eff0 + i(g* √γσ- - g √γσ+)
        let a = I * g.conj();
        let b = I * g;
        for i in 0..n {
            for j in 0..n {
                // (√γσ+)_{ij} = conj((√γσ-)_{ji})
                ws.h[i * n + j] = self.h_eff0[i * n + j] + a * self.lower[i * n + j] - b * self.lower[j * n + i].conj();
            }
        }
        // -i(H ρ - ρ H†) = -i Hρ + i (Hρ)†  since ρ is Hermitian
        matmul_into(&ws.h, rho, &mut ws.t1, n);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = -I * ws.t1[i * n + j] + I * ws.t1[j * n + i].conj();
            }
        }
        for jump in &self.jumps {
            matmul_into(&jump.op, rho, &mut ws.t1, n);
            matmul_into(&ws.t1, &jump.op_dag, &mut ws.t2, n);
            for (o, &v) in out.iter_mut().zip(&ws.t2) {
                *o += v * jump.coef2;
            }
        }
    }

    pub fn apply(&self, g: C64, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        let mut ws = Workspace::new(self.dim);
        self.apply_into(g, rho.as_slice(), out.as_mut_slice(), &mut ws);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::ket_bra(2, 0, 1)
    }

    fn two_level(gamma: f64, nbar: f64) -> SystemModel {
        let h0 = ComplexMatrix::diagonal(&[-0.5, 0.5]);
        let ch = DissipationChannel::new(sigma_minus(), gamma, nbar).unwrap();
        SystemModel::new(h0, sigma_minus(), gamma, vec![ch]).unwrap()
    }

    #[test]
    fn decay_of_excited_state() {
        let gamma = 0.3;
        let ch = DissipationChannel::new(sigma_minus(), gamma, 0.0).unwrap();
        let rho = ComplexMatrix::ket_bra(2, 1, 1);
        let d = dissipator_apply(&ch, &rho).unwrap();
        let expected = ComplexMatrix::diagonal(&[gamma, -gamma]);
        assert!((&d - &expected).max_abs() < 1e-15, "{d:?}");
    }

    #[test]
    fn coherence_decays_at_half_rate() {
        let gamma = 0.3;
        let ch = DissipationChannel::new(sigma_minus(), gamma, 0.0).unwrap();
        let d = dissipator_apply(&ch, &ComplexMatrix::ket_bra(2, 0, 1)).unwrap();
        let expected = ComplexMatrix::ket_bra(2, 0, 1).scale_real(-gamma / 2.0);
        assert!((&d - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn dissipator_is_linear_at_zero() {
        let ch = DissipationChannel::new(sigma_minus(), 0.7, 0.4).unwrap();
        assert_eq!(dissipator_apply(&ch, &ComplexMatrix::zeros(2)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn dissipator_dimension_mismatch() {
        let ch = DissipationChannel::new(sigma_minus(), 0.7, 0.0).unwrap();
        assert!(dissipator_apply(&ch, &ComplexMatrix::zeros(3)).is_err());
    }

    #[test]
    fn cold_channel_annihilates_ground_projector() {
        let ch = DissipationChannel::new(sigma_minus(), 0.7, 0.0).unwrap();
        let d = dissipator_apply(&ch, &ComplexMatrix::ket_bra(2, 0, 0)).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn channel_validation() {
        assert!(DissipationChannel::new(sigma_minus(), -1.0, 0.0).is_err());
        assert!(DissipationChannel::new(sigma_minus(), 1.0, -0.1).is_err());
        assert!(DissipationChannel::new(sigma_minus(), f64::NAN, 0.0).is_err());
    }

    #[test]
    fn drive_operator_must_lower() {
        let h0 = ComplexMatrix::diagonal(&[-0.5, 0.5]);
        assert!(SystemModel::new(h0, ComplexMatrix::ket_bra(2, 1, 0), 0.1, vec![]).is_err());
    }

    #[test]
    fn stationary_ground_state() {
        let m = SystemModel::new(ComplexMatrix::diagonal(&[-0.5, 0.5]), sigma_minus(), 0.01, vec![]).unwrap();
        let out = liouvillian_apply(&m, C64::new(0.0, 0.0), &ComplexMatrix::ket_bra(2, 0, 0)).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn generator_reduces_to_dissipator_on_populations() {
        let m = two_level(0.3, 0.0);
        let rho = ComplexMatrix::ket_bra(2, 1, 1);
        let out = liouvillian_apply(&m, C64::new(0.0, 0.0), &rho).unwrap();
        let d = dissipator_apply(&m.channels()[0], &rho).unwrap();
        assert!((&out - &d).max_abs() < 1e-15);
    }

    #[test]
    fn drive_hamiltonian_is_hermitian() {
        let m = two_level(0.01, 0.0);
        let h1 = m.drive_hamiltonian(C64::new(0.3, -0.8));
        assert!(h1.hermiticity_error() < 1e-16);
        // Only off-diagonal entries.
        assert_eq!(h1[(0, 0)].norm() + h1[(1, 1)].norm(), 0.0);
        // ⟨0|h1|1⟩ = i√γ g*
        let expected = I * 0.1 * C64::new(0.3, 0.8);
        assert!((h1[(0, 1)] - expected).norm() < 1e-16);
    }

    #[test]
    fn fast_kernel_matches_reference() {
        let m = two_level(0.05, 0.3);
        let k = Liouvillian::new(&m);
        let rho = ComplexMatrix::from_vec(
            2,
            vec![
                C64::new(0.6, 0.0),
                C64::new(0.2, 0.1),
                C64::new(0.2, -0.1),
                C64::new(0.4, 0.0),
            ],
        )
        .unwrap();
        let g = C64::new(0.4, -0.2);
        let fast = k.apply(g, &rho);
        let reference = liouvillian_apply(&m, g, &rho).unwrap();
        assert!((&fast - &reference).max_abs() < 1e-15);
    }
}
