//! Gaussian-state algebra over `xpxp`-ordered quadratures.

mod channel;
mod homodyne;
mod maps;
mod metrics;
mod state;

pub use channel::{loss_thermal_step, GaussianChannel};
pub use homodyne::{homodyne_condition, homodyne_condition_inefficient, measure_feedback_deterministic, Conditioned, Feedback};
pub use maps::{phase_rotation, qnd_p_coupling, qnd_x_coupling, symplectic_form, AffineQuadratureMap};
pub use metrics::{gaussian_overlap, is_symplectic, log_negativity, partial_transpose, purity_gaussian, symplectic_eigenvalues};
pub use state::{GaussianState, Quadrature};
pub(crate) use state::quad_index;

/// Absolute tolerance used for symmetry checks on covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Slack allowed below 1 for the lowest symplectic eigenvalue of a valid state.
pub const UNCERTAINTY_TOL: f64 = 1e-9;
