use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("bad matrix shape: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max |m - m†| = {0:e})")]
    NotHermitian(f64),

    #[error("Jacobi eigensolver did not converge in {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("not a density operator: {0}")]
    InvalidDensity(String),

    #[error("positivity violated: smallest eigenvalue {0:e}")]
    Positivity(f64),

    #[error("support of rho is not contained in support of sigma")]
    Support,

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("integration unstable at t = {t}: {reason}")]
    Unstable { t: f64, reason: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("inter-block coherence {0:e} exceeds threshold")]
    BlockStructure(f64),

    #[error("record grid is not uniform at index {0}")]
    NonUniformGrid(usize),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
