use nalgebra::{DMatrix, DVector};

use super::state::{quad_index, GaussianState, Quadrature};
use crate::error::{Error, Result};

/// Post-measurement state of the unmeasured modes and the outcome density.
#[derive(Debug, Clone)]
pub struct Conditioned {
    pub state: GaussianState,
    pub likelihood: f64,
}

/// Homodyne measurement of quadrature `quad` of `mode` with outcome `q`.
///
/// The outcome is normally distributed with mean `mean_q` and variance
/// `cov_qq / 2`; the remaining modes are updated by the Gaussian conditional
/// (Schur complement over the measured quadrature). The measured mode is
/// removed from the returned state.
pub fn homodyne_condition(state: &GaussianState, mode: usize, quad: Quadrature, q: f64) -> Result<Conditioned> {
    homodyne_condition_inefficient(state, mode, quad, q, 1.0)
}

/// As [`homodyne_condition`], for a detector of efficiency `eta`. The
/// recorded value is `sqrt(eta) q + sqrt(1 - eta) q_vac`; the outcome `q`
/// passed here is already rescaled by `1 / sqrt(eta)`, so the measured
/// variance grows by `(1 - eta) / eta` in covariance units.
pub fn homodyne_condition_inefficient(
    state: &GaussianState,
    mode: usize,
    quad: Quadrature,
    q: f64,
    eta: f64,
) -> Result<Conditioned> {
    let m = state.modes();
    if mode >= m {
        return Err(Error::Dimension(format!("mode {mode} out of range for {m}-mode state")));
    }
    if m < 2 {
        return Err(Error::Dimension("conditioning needs at least one unmeasured mode".into()));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!("detection efficiency must lie in (0, 1], got {eta}")));
    }
    let i = quad_index(mode, quad);
    let cov = state.cov();
    let v = cov[(i, i)] + (1.0 - eta) / eta;
    if !(v > 1e-300) {
        return Err(Error::DegenerateMeasurement);
    }
    let rest: Vec<usize> = (0..2 * m).filter(|&k| k / 2 != mode).collect();
    let n = rest.len();
    let cross = DVector::from_fn(n, |a, _| cov[(rest[a], i)]);
    let delta = q - state.mean()[i];
    let mean = DVector::from_fn(n, |a, _| state.mean()[rest[a]] + cross[a] * delta / v);
    let cov_out = DMatrix::from_fn(n, n, |a, b| cov[(rest[a], rest[b])] - cross[a] * cross[b] / v);
    let likelihood = (-delta * delta / v).exp() / (std::f64::consts::PI * v).sqrt();
    Ok(Conditioned {
        state: GaussianState::from_parts_unchecked(mean, cov_out),
        likelihood,
    })
}

/// Measure-and-feedback step in the Heisenberg picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feedback {
    pub light_mode: usize,
    pub measured: Quadrature,
    pub atom_mode: usize,
    pub displaced: Quadrature,
    pub gain: f64,
    /// Homodyne efficiency in `(0, 1]`. The gain is rescaled by
    /// `1 / sqrt(eta)` so only detector noise is added.
    pub eta_hd: f64,
}

/// Applies `q_A -> q_A + g q_L` (averaged over outcomes), adds the detector
/// noise `g^2 (1 - eta) / eta` to the displaced quadrature and traces out the
/// light mode.
pub fn measure_feedback_deterministic(state: &GaussianState, fb: &Feedback) -> Result<GaussianState> {
    let m = state.modes();
    if fb.light_mode >= m || fb.atom_mode >= m || fb.light_mode == fb.atom_mode {
        return Err(Error::Dimension(format!(
            "feedback from mode {} to mode {} in a {m}-mode state",
            fb.light_mode, fb.atom_mode
        )));
    }
    if !(fb.eta_hd > 0.0 && fb.eta_hd <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "detection efficiency must lie in (0, 1], got {}",
            fb.eta_hd
        )));
    }
    let a = quad_index(fb.atom_mode, fb.displaced);
    let l = quad_index(fb.light_mode, fb.measured);
    let dim = 2 * m;
    let mut f = DMatrix::identity(dim, dim);
    f[(a, l)] = fb.gain;
    let mut cov = &f * state.cov() * f.transpose();
    cov[(a, a)] += fb.gain * fb.gain * (1.0 - fb.eta_hd) / fb.eta_hd;
    let mean = &f * state.mean();
    GaussianState::from_parts_unchecked(mean, cov).trace_out(fb.light_mode)
}
