//! Gaussification of traveling light in atomic quantum memories.
//!
//! The crate models an atomic ensemble coupled to a stream of light pulses
//! through alternating quantum non-demolition (QND) interactions, followed by
//! homodyne detection and feedback. It is organised in layers:
//!
//! * [`symplectic`]: Gaussian states, symplectic maps, Gaussian channels and
//!   the closed-form Gaussian metrics (symplectic spectrum, logarithmic
//!   negativity, purity, overlap).
//! * [`protocol`]: the coupling/gain schedule and deterministic runs for one
//!   memory or a pair of distant memories, with depumping and imperfect
//!   homodyne detection.
//! * [`mixture`]: Gaussian mixtures for phase-diffused light and the
//!   post-selected purification protocol, both in the narrow-window limit and
//!   with a finite acceptance window (Monte Carlo).
//! * [`fock`]: a truncated number-basis oracle for non-Gaussian quantities
//!   (negativity of mixtures, Uhlmann fidelity, Gaussianity).
//! * [`experiments`]: parameter sweeps that regenerate the figure data as CSV.
//!
//! Covariance matrices follow the anticommutator convention
//! `gamma_jk = <{dr_j, dr_k}>`, so the vacuum has the identity covariance.
//! Quadratures are ordered `x1, p1, x2, p2, ...`.

pub mod error;
pub mod experiments;
pub mod fock;
pub mod mixture;
pub mod protocol;
pub mod symplectic;

pub use error::{Error, Result};
pub use symplectic::{AffineQuadratureMap, GaussianChannel, GaussianState, Quadrature};
