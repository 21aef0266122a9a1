use serde::{Deserialize, Serialize};

use super::gmm::GaussianMixture;
use super::quadrature::normal_nodes;
use crate::error::{Error, Result};
use crate::symplectic::{phase_rotation, GaussianState};

/// Independent Gaussian phase noise of width `sigma` on each arm,
/// discretised with `nodes` Gauss-Hermite points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseNoiseModel {
    pub sigma: f64,
    pub nodes: usize,
}

const RESOLVED_TOL: f64 = 1e-12;
/// Components lighter than this fraction of the heaviest are dropped.
pub(crate) const PRUNE_TOL: f64 = 1e-12;
const MAX_NODES: usize = 641;

impl PhaseNoiseModel {
    pub const DEFAULT_NODES: usize = 41;

    pub fn new(sigma: f64, nodes: usize) -> Result<Self> {
        let model = Self { sigma, nodes };
        model.validate()?;
        Ok(model)
    }

    /// First rule in the doubling sequence 41, 81, 161, ... whose phase
    /// characteristic function `E[cos k theta]` matches `exp(-k^2 sigma^2)`
    /// for the number-basis coherences of TMSV(r): the error at order `k` is
    /// weighted by the coherence scale `tanh(r)^k`.
    pub fn resolved(sigma: f64, r: f64) -> Result<Self> {
        let mut nodes = Self::DEFAULT_NODES;
        loop {
            let model = Self::new(sigma, nodes)?;
            if sigma == 0.0 || model.phase_error(r)? <= RESOLVED_TOL || nodes >= MAX_NODES {
                return Ok(model);
            }
            nodes = 2 * nodes - 1;
        }
    }

    /// `max_k tanh(r)^k |E_K[cos k theta] - exp(-k^2 sigma^2)|` over `k <= 64`.
    pub fn phase_error(&self, r: f64) -> Result<f64> {
        let (theta, w) = normal_nodes(self.nodes, 2.0 * self.sigma * self.sigma)?;
        let t = r.tanh();
        Ok((1..=64)
            .map(|k| {
                let k = k as f64;
                let approx: f64 = theta.iter().zip(&w).map(|(x, v)| (k * x).cos() * v).sum();
                t.powf(k) * (approx - (-k * k * self.sigma * self.sigma).exp()).abs()
            })
            .fold(0.0, f64::max))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("phase noise sigma must be >= 0, got {}", self.sigma)));
        }
        if self.nodes == 0 || self.nodes % 2 == 0 {
            return Err(Error::InvalidParameter(format!("node count must be odd, got {}", self.nodes)));
        }
        Ok(())
    }
}

/// Phase-diffused two-mode squeezed vacuum.
///
/// `U_A(phi_A) U_B(phi_B)` acts on TMSV like `U_A(phi_A + phi_B)`, so the
/// mixture runs over `theta ~ N(0, 2 sigma^2)` rotating mode A only.
pub fn dephased_tmsv(r: f64, model: &PhaseNoiseModel) -> Result<GaussianMixture> {
    model.validate()?;
    let tmsv = GaussianState::two_mode_squeezed(r);
    if model.sigma == 0.0 {
        return Ok(GaussianMixture::single(tmsv));
    }
    let (theta, w) = normal_nodes(model.nodes, 2.0 * model.sigma * model.sigma)?;
    let components = theta
        .iter()
        .zip(&w)
        .map(|(&t, &wk)| Ok((wk, phase_rotation(2, 0, t)?.apply(&tmsv)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianMixture::new(components)?.pruned(PRUNE_TOL))
}

/// Unreduced discretisation with independent phases on both arms
/// (`nodes^2` components). Reference for the one-variable reduction.
pub fn dephased_tmsv_two_phase(r: f64, model: &PhaseNoiseModel) -> Result<GaussianMixture> {
    model.validate()?;
    let tmsv = GaussianState::two_mode_squeezed(r);
    let (phi, w) = normal_nodes(model.nodes, model.sigma * model.sigma)?;
    let mut components = Vec::with_capacity(phi.len() * phi.len());
    for (&pa, &wa) in phi.iter().zip(&w) {
        for (&pb, &wb) in phi.iter().zip(&w) {
            let s = phase_rotation(2, 0, pa)?.apply(&tmsv)?;
            let s = phase_rotation(2, 1, pb)?.apply(&s)?;
            components.push((wa * wb, s));
        }
    }
    Ok(GaussianMixture::new(components)?.pruned(PRUNE_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::total_variance_of;

    #[test]
    fn zero_sigma_is_tmsv() {
        let m = dephased_tmsv(0.5, &PhaseNoiseModel::new(0.0, 41).unwrap()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.components()[0].1, GaussianState::two_mode_squeezed(0.5));
    }

    #[test]
    fn damped_cross_covariance() {
        let m = dephased_tmsv(0.5, &PhaseNoiseModel::new(1.0, 41).unwrap()).unwrap();
        let (_, cov) = m.mean_cov().unwrap();
        let expected = (-1.0_f64).exp() * 1.0_f64.sinh();
        assert!((cov[(0, 2)] - expected).abs() < 1e-8);
        assert!((cov[(1, 3)] + expected).abs() < 1e-8);
        assert!((expected - 0.432_332).abs() < 1e-6);
        let i = total_variance_of(&m).unwrap();
        assert!((i - 1.110_748).abs() < 1e-5, "{i}");
    }

    #[test]
    fn doubling_converges() {
        let loose = PhaseNoiseModel::new(1.0, 41).unwrap();
        assert!(loose.phase_error(0.5).unwrap() > 1e-6);
        let fine = PhaseNoiseModel::resolved(1.0, 0.5).unwrap();
        assert!(fine.nodes > 41);
        assert!(fine.phase_error(0.5).unwrap() <= 1e-12);
        assert_eq!(PhaseNoiseModel::resolved(0.0, 0.5).unwrap().nodes, 41);
    }

    #[test]
    fn moments_stable_under_doubling() {
        for sigma in [0.25, 1.0, 1.5] {
            let a = dephased_tmsv(0.5, &PhaseNoiseModel::new(sigma, 41).unwrap()).unwrap().mean_cov().unwrap().1;
            let b = dephased_tmsv(0.5, &PhaseNoiseModel::new(sigma, 81).unwrap()).unwrap().mean_cov().unwrap().1;
            assert!((a - b).amax() < 1e-10);
        }
    }

    #[test]
    fn one_variable_reduction_matches_two_phases() {
        let model = PhaseNoiseModel::new(0.6, 81).unwrap();
        let one = dephased_tmsv(0.5, &model).unwrap();
        let two = dephased_tmsv_two_phase(0.5, &model).unwrap();
        let (_, c1) = one.mean_cov().unwrap();
        let (_, c2) = two.mean_cov().unwrap();
        assert!((c1 - c2).amax() < 1e-12);
        let (r1, _) = crate::fock::mixture_to_fock(&one, 14).unwrap();
        let (r2, _) = crate::fock::mixture_to_fock(&two, 14).unwrap();
        let diff = (r1.data() - r2.data()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn rejects_even_nodes() {
        assert!(PhaseNoiseModel::new(1.0, 40).is_err());
        assert!(PhaseNoiseModel::new(-0.1, 41).is_err());
    }
}
