//! Driven, dissipative few-level quantum systems: Lindblad dynamics under
//! Gaussian photon pulses, thermodynamic bookkeeping, and a donor/acceptor
//! photocell model.
//!
//! Units: `ħ = 1` and the driven transition frequency `ω0 = 1`, so energies
//! are in `ħω0` and rates in `ω0`.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod output;
pub mod photocell;
pub mod pulse;
pub mod scenario;
pub mod state;
pub mod thermo;
pub mod two_level;

pub use dynamics::{evolve, step_rk4, Evolution, IntegrationConfig, Sample};
pub use error::{Error, Result};
pub use linalg::{commutator, hermitian_eigen, ComplexMatrix, Eigen};
pub use model::{dissipator_apply, liouvillian_apply, DissipationChannel, Liouvillian, SystemModel};
pub use photocell::{build_photocell, PhotocellParams};
pub use pulse::{Drive, GaussianPulse, PulseMode, PulseSequence};
pub use scenario::{run, RunOutput, RunRecord, Scenario, ScenarioConfig, SystemKind};
pub use state::{gibbs_state, relative_entropy, von_neumann_entropy, DensityOperator};
pub use thermo::{ThermoRecord, ThermoRecorder};
pub use two_level::{bose_occupation, build_two_level, TwoLevelParams};

pub use num_complex::Complex64 as C64;
