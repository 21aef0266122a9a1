use thiserror::Error;

/// Errors raised by the simulation engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("covariance matrix violates the uncertainty principle (lowest symplectic eigenvalue {0})")]
    Unphysical(f64),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("measured quadrature has zero variance")]
    DegenerateMeasurement,

    #[error("schedule infeasible at step {step}: depumping factor {eta} exceeds 1")]
    Infeasible { step: usize, eta: f64 },

    #[error("Fock truncation too coarse: trace deficit {deficit:e} at n_max = {n_max}")]
    Truncation { n_max: usize, deficit: f64 },

    #[error("no trajectory passed the acceptance window")]
    NoAcceptedTrajectories,

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
