//! Density operators and their entropies.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, Eigen};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues in `[-CLAMP_WINDOW, 0)` are treated as round-off and clamped to zero.
pub const CLAMP_WINDOW: f64 = 1e-9;
/// Eigenvalue floor used by the support check and by `ln ρ`.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (|ρ - ρ†| = {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace = {tr}")));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -CLAMP_WINDOW {
            return Err(Error::Positivity(min));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector (normalization is enforced).
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::projector(&psi))
    }

    /// `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self {
            matrix: ComplexMatrix::ket_bra(dim, k, k),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diagonal(populations))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn eigen(&self) -> Result<Eigen> {
        hermitian_eigen(&self.matrix)
    }
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.values[0])
}

fn clamped_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&l| {
            if l < -CLAMP_WINDOW {
                Err(Error::Positivity(l))
            } else {
                Ok(l.max(0.0))
            }
        })
        .collect()
}

fn shannon(spectrum: &[f64]) -> f64 {
    -spectrum.iter().filter(|&&l| l > 0.0).map(|&l| l * l.ln()).sum::<f64>()
}

/// Von Neumann entropy in nats, `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    matrix_entropy(rho.matrix())
}

/// Entropy of any positive Hermitian matrix, normalized or not. Used for the
/// unnormalized donor/acceptor blocks of a direct-sum state.
pub fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    let e = hermitian_eigen(m)?;
    Ok(shannon(&clamped_spectrum(&e.values)?))
}

/// Entropy of a spectrum with the clamping rules of [`von_neumann_entropy`].
pub fn entropy_from_spectrum(values: &[f64]) -> Result<f64> {
    Ok(shannon(&clamped_spectrum(values)?))
}

/// `S(ρ‖σ) = tr ρ (ln ρ - ln σ)`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let er = rho.eigen()?;
    let es = sigma.eigen()?;
    let lr = clamped_spectrum(&er.values)?;
    let ls = clamped_spectrum(&es.values)?;
    let n = rho.dim();

    // tr ρ ln σ = Σ_k λ_k Σ_j |⟨s_j|r_k⟩|² ln μ_j
    let mut cross = 0.0;
    for (k, &lk) in lr.iter().enumerate() {
        if lk <= SUPPORT_EPS {
            continue;
        }
        let rk = er.vector(k);
        let sigma_expect = sigma_expectation(sigma.matrix(), &rk);
        if sigma_expect <= SUPPORT_EPS {
            return Err(Error::Support);
        }
        let mut acc = 0.0;
        for (j, &mu) in ls.iter().enumerate() {
            let overlap: C64 = (0..n).map(|i| es.vectors[(i, j)].conj() * rk[i]).sum();
            let w = overlap.norm_sqr();
            if w <= 0.0 {
                continue;
            }
            if mu <= SUPPORT_EPS {
                if w * lk > SUPPORT_EPS {
                    return Err(Error::Support);
                }
                continue;
            }
            acc += w * mu.ln();
        }
        cross += lk * acc;
    }
    Ok(-shannon(&lr) - cross)
}

fn sigma_expectation(sigma: &ComplexMatrix, v: &[C64]) -> f64 {
    let n = v.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += v[i].conj() * sigma[(i, j)] * v[j];
        }
    }
    acc.re
}

/// Canonical state `e^{-βH} / Z`.
pub fn gibbs_state(h: &ComplexMatrix, beta: f64) -> Result<DensityOperator> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", format!("must be positive, got {beta}")));
    }
    let e = hermitian_eigen(h)?;
    let ground = e.values[0];
    // Shift by the ground energy so the largest weight is exactly 1.
    let weights: Vec<f64> = e.values.iter().map(|&l| (-beta * (l - ground)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let n = h.dim();
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &w) in weights.iter().enumerate() {
                acc += e.vectors[(i, k)] * (w / z) * e.vectors[(j, k)].conj();
            }
            m[(i, j)] = acc;
        }
    }
    m.hermitize_in_place();
    DensityOperator::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_has_zero_entropy() {
        assert_eq!(von_neumann_entropy(&DensityOperator::basis(2, 0)).unwrap(), 0.0);
    }

    #[test]
    fn maximally_mixed_entropy_is_ln2() {
        let s = von_neumann_entropy(&DensityOperator::maximally_mixed(2)).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn three_quarter_mixture_entropy() {
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let expected = -(0.75f64 * 0.75f64.ln()) - 0.25 * 0.25f64.ln();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!((s - expected).abs() < 1e-15);
        assert!((s - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        let m = ComplexMatrix::diagonal(&[1.0 + 1e-6, -1e-6]);
        assert!(matches!(matrix_entropy(&m), Err(Error::Positivity(_))));
        // inside the clamp window
        let m = ComplexMatrix::diagonal(&[1.0, -1e-10]);
        assert_eq!(matrix_entropy(&m).unwrap(), 0.0);
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::diagonal(&[0.5, 0.4]).is_err());
        assert!(matches!(
            DensityOperator::diagonal(&[1.1, -0.1]),
            Err(Error::Positivity(_))
        ));
        let mut m = ComplexMatrix::diagonal(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityOperator::new(m).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let mixed = DensityOperator::maximally_mixed(2);
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-14);

        let pure = DensityOperator::basis(2, 0);
        let d = relative_entropy(&pure, &mixed).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-14);

        let d = relative_entropy(&rho, &mixed).unwrap();
        let expected = 2f64.ln() - von_neumann_entropy(&rho).unwrap();
        assert!((d - expected).abs() < 1e-14);
        assert!((d - 0.1308).abs() < 1e-4);
    }

    #[test]
    fn relative_entropy_support_violation() {
        let err = relative_entropy(&DensityOperator::basis(2, 1), &DensityOperator::basis(2, 0)).unwrap_err();
        assert_eq!(err, Error::Support);
    }

    #[test]
    fn gibbs_limits() {
        let h = ComplexMatrix::diagonal(&[-0.5, 0.5]);
        let cold = gibbs_state(&h, 200.0).unwrap();
        assert!((cold.matrix() - DensityOperator::basis(2, 0).matrix()).max_abs() < 1e-9);

        let flat = gibbs_state(&ComplexMatrix::zeros(3), 1.0).unwrap();
        assert!((flat.matrix() - DensityOperator::maximally_mixed(3).matrix()).max_abs() < 1e-15);

        let (beta, gap) = (1.3, 1.0);
        let g = gibbs_state(&h, beta).unwrap();
        let expected = 1.0 / ((beta * gap).exp() + 1.0);
        assert!((g.population(1) - expected).abs() < 1e-14);

        assert!(gibbs_state(&h, 0.0).is_err());
    }
}
