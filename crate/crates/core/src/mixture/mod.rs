//! Gaussian mixtures for phase-diffused light and conditional purification.

mod gmm;
mod narrow;
mod phase;
mod quadrature;
mod window;

pub use gmm::{total_variance, total_variance_of, GaussianMixture};
pub use narrow::{
    narrow_mixture, purify_run_narrow, purify_step_narrow, MemoryState, PurificationConfig, PurificationResult, StepTrace,
};
pub use phase::{dephased_tmsv, dephased_tmsv_two_phase, PhaseNoiseModel};
pub use quadrature::{gauss_hermite, gauss_legendre, normal_nodes};
pub use window::{purify_run, purify_run_window};
