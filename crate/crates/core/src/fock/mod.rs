//! Truncated number-basis oracle for non-Gaussian quantities.
//!
//! States of at most two modes are represented in the product basis
//! `|n_A, n_B>` with `n <= n_max` per mode, flattened as
//! `n_A * (n_max + 1) + n_B`. Zero-mean Gaussian states commute with the total
//! photon-number parity, so most routines work block by block on the even
//! and odd sectors.

mod convert;
mod density;
mod linalg;
mod lowrank;
mod metrics;

pub use convert::{gaussian_ket, gaussian_to_fock, gaussian_to_fock_with_tolerance, mixture_to_fock, DEFAULT_MAX_TRACE_DEFICIT};
pub use density::{tmsv_fock, FockDensityMatrix, TruncationReport};
pub use lowrank::LowRankDensity;
pub(crate) use convert::pure_amplitudes;
pub use metrics::{
    gaussianity, gaussianity_overlap, negativity_fock, overlap_fock, purity_fock, uhlmann_fidelity, GaussianityReport,
    CONVERGED_TRACE_DEFICIT,
};

/// Default per-mode photon cutoff for `r = 0.5` workloads.
pub const DEFAULT_N_MAX: usize = 30;
