//! Alternating-QND Gaussification schedule and deterministic protocol runs.

mod closed_form;
mod run;
mod schedule;

pub use closed_form::{c_even_closed_form, mapped_covariance, pair_mu_optimal, pair_mu_squared};
pub use run::{
    hd_noise_model, run_fixed_kappa, run_herec_baseline, run_pair, run_protocol, run_single, Decoherence, OpticalDepth,
    ProtocolConfig, ProtocolKind, RunResult, StepMetrics,
};
pub use schedule::{coupling_sequence, fixed_kappa_steps, herec_steps, total_coupling, Coupling, Parity, Schedule, Step};
pub(crate) use run::local_coupling;
