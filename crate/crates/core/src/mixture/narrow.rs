use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::Serialize;

use super::gmm::{total_variance, total_variance_of, GaussianMixture};
use super::phase::{dephased_tmsv, PhaseNoiseModel, PRUNE_TOL};
use crate::error::{Error, Result};
use crate::fock::{
    gaussian_to_fock, gaussianity, mixture_to_fock, negativity_fock, pure_amplitudes,
    LowRankDensity, DEFAULT_MAX_TRACE_DEFICIT,
};
use crate::protocol::{coupling_sequence, local_coupling, Coupling, Decoherence, OpticalDepth, Step};
use crate::symplectic::{
    homodyne_condition_inefficient, loss_thermal_step, phase_rotation, qnd_p_coupling, qnd_x_coupling, AffineQuadratureMap,
    GaussianState,
};

type C64 = Complex<f64>;

/// Squeezing of the reference pairs used to read off Kraus operators.
const REFERENCE_SQUEEZING: f64 = 1.5;
/// Channel harmonics weaker than this are not resolved exactly.
const HARMONIC_TAIL: f64 = 1e-13;
/// Phase-average damping below which a harmonic is dropped.
const PHASE_TAIL: f64 = 1e-16;

/// Inputs of a conditional purification run.
#[derive(Debug, Clone, Serialize)]
pub struct PurificationConfig {
    pub steps: usize,
    pub r: f64,
    pub phase: PhaseNoiseModel,
    pub c0: f64,
    /// Acceptance half-width on both outcomes; zero selects the narrow limit.
    pub q_threshold: f64,
    pub mc_samples: usize,
    pub rng_seed: u64,
    pub decoherence: Decoherence,
    /// Per-mode photon cutoff of the narrow-limit state and its metrics.
    pub n_max: usize,
    /// Largest exact mixture tolerated when decoherence forces the
    /// Gaussian-mixture route.
    pub max_components: usize,
}

impl PurificationConfig {
    pub const DEFAULT_MAX_COMPONENTS: usize = 20_000;

    /// Ideal narrow-limit configuration with a phase rule resolved for `r`.
    pub fn new(steps: usize, r: f64, sigma: f64, c0: f64) -> Result<Self> {
        let config = Self {
            steps,
            r,
            phase: PhaseNoiseModel::resolved(sigma, r)?,
            c0,
            q_threshold: 0.0,
            mc_samples: 0,
            rng_seed: 0,
            decoherence: Decoherence::IDEAL,
            n_max: crate::fock::DEFAULT_N_MAX,
            max_components: Self::DEFAULT_MAX_COMPONENTS,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidParameter("purification needs at least one step".into()));
        }
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(Error::InvalidParameter(format!("squeezing must be >= 0, got {}", self.r)));
        }
        if !(self.q_threshold >= 0.0) {
            return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {}", self.q_threshold)));
        }
        if self.q_threshold > 0.0 && self.mc_samples == 0 {
            return Err(Error::InvalidParameter("a finite window needs at least one trajectory".into()));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidParameter("cutoff must be at least 1".into()));
        }
        self.phase.validate()?;
        self.decoherence.validate()
    }

    pub(crate) fn schedule(&self) -> Result<Vec<Step>> {
        Ok(coupling_sequence(self.steps, self.c0)?.steps)
    }
}

/// Metrics of the memory state after one step (step 0 is the light input).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepTrace {
    pub step: usize,
    pub total_variance: f64,
    /// Monte Carlo runs report the ensemble purity for the last step only.
    pub purity: Option<f64>,
    pub log_negativity: Option<f64>,
    pub gaussianity: Option<f64>,
    /// Success probability of the steps so far (Monte Carlo runs only).
    pub success_probability: Option<f64>,
}

/// Final memory state in whichever representation the run used.
#[derive(Debug, Clone)]
pub enum MemoryState {
    Mixture(GaussianMixture),
    Number(LowRankDensity),
}

#[derive(Debug, Clone)]
pub struct PurificationResult {
    pub final_state: MemoryState,
    pub success_probability: f64,
    pub success_standard_error: Option<f64>,
    /// Set in the narrow limit, where the success probability is a
    /// placeholder of 1 for a measure-zero event.
    pub success_is_bookkeeping: bool,
    /// Standard error of the final total variance for Monte Carlo runs.
    pub total_variance_standard_error: Option<f64>,
    /// Accepted trajectories of a Monte Carlo run.
    pub accepted: Option<usize>,
    pub input: StepTrace,
    pub trace: Vec<StepTrace>,
}

impl PurificationResult {
    pub fn last(&self) -> &StepTrace {
        self.trace.last().unwrap_or(&self.input)
    }
}

/// Memories of both sites step together: each couples to its half of a
/// fresh light copy, both outputs are conditioned on zero and every
/// component is reweighted by the product of the two outcome densities.
pub fn purify_step_narrow(
    memories: &GaussianMixture,
    light: &GaussianMixture,
    step: &Step,
    decoherence: &Decoherence,
) -> Result<GaussianMixture> {
    if memories.modes() != 2 || light.modes() != 2 {
        return Err(Error::Dimension("purification acts on two memories and two-mode light".into()));
    }
    let eta = decoherence.depumping(step)?;
    let map = local_coupling(step.coupling, step.kappa, 2)?;
    let quad = step.coupling.measured();
    let pairs: Vec<(usize, usize)> =
        (0..memories.len()).flat_map(|i| (0..light.len()).map(move |k| (i, k))).collect();
    let mem = memories.components();
    let lig = light.components();
    let out = pairs
        .par_iter()
        .map(|&(i, k)| {
            let joint = map.apply(&mem[i].1.tensor(&lig[k].1))?;
            let b = homodyne_condition_inefficient(&joint, 3, quad, 0.0, decoherence.eta_hd)?;
            let a = homodyne_condition_inefficient(&b.state, 2, quad, 0.0, decoherence.eta_hd)?;
            let state = if eta > 0.0 { loss_thermal_step(&a.state, eta)? } else { a.state };
            Ok((mem[i].0 * lig[k].0 * a.likelihood * b.likelihood, state))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = out.iter().map(|(w, _)| w).sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("all conditioned components have vanishing weight".into()));
    }
    Ok(GaussianMixture::new(out)?.pruned(PRUNE_TOL))
}

/// Number-basis blocks (per parity sector) of `sqrt(w) <0, 0|_L U |light>`
/// for one step, read off the conditioned image of two reference pairs:
/// `(K (x) 1) |TMSV>|TMSV> = sum_n s_nA s_nB K|n_A n_B>|n_A n_B>`.
fn conditioning_kraus(step: &Step, light: &GaussianState, n_max: usize, sectors: &[Vec<usize>]) -> Result<Vec<DMatrix<C64>>> {
    let pair = GaussianState::two_mode_squeezed(REFERENCE_SQUEEZING);
    // modes: A, A', B, B', L_A, L_B
    let joint = pair.tensor(&pair).tensor(light);
    let local = match step.coupling {
        Coupling::XLightPAtom => qnd_x_coupling(step.kappa),
        Coupling::PLightXAtom => qnd_p_coupling(step.kappa),
    };
    let map: AffineQuadratureMap = local.embed(&[0, 4], 6)?.then(&local.embed(&[2, 5], 6)?)?;
    let quad = step.coupling.measured();
    let joint = map.apply(&joint)?;
    let b = homodyne_condition_inefficient(&joint, 5, quad, 0.0, 1.0)?;
    let a = homodyne_condition_inefficient(&b.state, 4, quad, 0.0, 1.0)?;
    let amps = pure_amplitudes(&a.state, n_max)?;
    let reference = pure_amplitudes(&GaussianState::two_mode_squeezed(REFERENCE_SQUEEZING), n_max)?;
    let c = n_max + 1;
    let schmidt: Vec<C64> = (0..c).map(|n| reference[n * c + n]).collect();
    let scale = (a.likelihood * b.likelihood).sqrt();
    Ok(sectors
        .iter()
        .map(|idx| {
            DMatrix::from_fn(idx.len(), idx.len(), |row, col| {
                let (ma, mb) = (idx[row] / c, idx[row] % c);
                let (na, nb) = (idx[col] / c, idx[col] % c);
                amps[((ma * c + na) * c + mb) * c + nb] * scale / (schmidt[na] * schmidt[nb])
            })
        })
        .collect())
}

/// Weighted Kraus operators of a step averaged over `theta ~ N(0, 2 sigma^2)`.
///
/// With the light in `R(theta)|TMSV>` the channel `K_theta rho K_theta^dag`
/// is a trigonometric polynomial in `theta` whose harmonic `d` is suppressed
/// as `tanh(r)^|d|`, while the phase average damps it by
/// `exp(-sigma^2 d^2)`. Uniform nodes with weights
/// `(1/N) sum_{|d| <= D} exp(-sigma^2 d^2) cos(d theta_j)` average every
/// relevant harmonic exactly once `N` exceeds both cut-offs combined.
/// Weights may be negative; the sum is a positive map.
fn phase_averaged_kraus<'a>(
    step: &'a Step,
    r: f64,
    sigma: f64,
    n_max: usize,
    sectors: &'a [Vec<usize>],
) -> impl Iterator<Item = Result<(f64, Vec<DMatrix<C64>>)>> + 'a {
    let t = r.tanh();
    let photon = if t < 1e-300 { 0 } else { (HARMONIC_TAIL.ln() / t.ln()).ceil() as usize };
    let damped = if sigma == 0.0 { photon } else { ((-PHASE_TAIL.ln()).sqrt() / sigma).ceil() as usize };
    let kept = damped.min(photon);
    let nodes = photon + kept + 1;
    let tmsv = GaussianState::two_mode_squeezed(r);
    (0..nodes).map(move |j| {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
        let harmonics: f64 = (1..=kept).map(|d| (-sigma * sigma * (d * d) as f64).exp() * (d as f64 * theta).cos()).sum();
        let weight = (1.0 + 2.0 * harmonics) / nodes as f64;
        let light = phase_rotation(2, 0, theta)?.apply(&tmsv)?;
        Ok((weight, conditioning_kraus(step, &light, n_max, sectors)?))
    })
}

fn number_trace(step: usize, rho: &LowRankDensity) -> Result<StepTrace> {
    let dense = rho.to_density();
    let cov = dense.covariance();
    let reference = GaussianState::new(nalgebra::DVector::zeros(4), cov.clone())?;
    let (rho_g, _) = gaussian_to_fock(&reference, rho.n_max())?;
    Ok(StepTrace {
        step,
        total_variance: total_variance(&cov)?,
        purity: Some(rho.purity()),
        log_negativity: Some(negativity_fock(&dense)?),
        gaussianity: Some(rho.fidelity_with(&rho_g)?),
        success_probability: None,
    })
}

pub(crate) fn mixture_trace(step: usize, state: &GaussianMixture, n_max: Option<usize>) -> Result<StepTrace> {
    let (log_negativity, gaussianity_value) = match n_max {
        Some(n) => {
            let (rho, _) = mixture_to_fock(state, n)?;
            (Some(negativity_fock(&rho)?), Some(gaussianity(state, n)?.gaussianity))
        }
        None => (None, None),
    };
    Ok(StepTrace {
        step,
        total_variance: total_variance_of(state)?,
        purity: Some(state.purity()?),
        log_negativity,
        gaussianity: gaussianity_value,
        success_probability: None,
    })
}

/// Narrow-window purification from vacuum memories.
///
/// Every light copy is a mixture over phase nodes, so the exact memory
/// mixture grows as `K^M`. Ideal runs therefore propagate the memory density
/// matrix directly through the phase-averaged conditioning channel, which is
/// exact for the continuous phase distribution up to the photon cutoff. With decoherence the exact mixture is propagated instead,
/// up to `max_components`.
pub fn purify_run_narrow(config: &PurificationConfig) -> Result<PurificationResult> {
    config.validate()?;
    if config.q_threshold != 0.0 {
        return Err(Error::InvalidParameter("the narrow-limit run needs a zero threshold".into()));
    }
    let light = dephased_tmsv(config.r, &config.phase)?;
    let input = mixture_trace(0, &light, Some(config.n_max))?;
    let schedule = config.schedule()?;
    let ideal = config.decoherence.depth == OpticalDepth::Infinite && config.decoherence.eta_hd == 1.0;
    let mut trace = Vec::with_capacity(schedule.len());

    let final_state = if ideal {
        let mut rho = LowRankDensity::vacuum(config.n_max);
        for step in &schedule {
            let sectors = rho.sectors().to_vec();
            rho = rho.kraus_update(phase_averaged_kraus(step, config.r, config.phase.sigma, config.n_max, &sectors))?.0;
            let edge = rho.edge_mass();
            if edge > DEFAULT_MAX_TRACE_DEFICIT {
                return Err(Error::Truncation { n_max: config.n_max, deficit: edge });
            }
            trace.push(number_trace(step.index, &rho)?);
        }
        MemoryState::Number(rho)
    } else {
        let mut memories = GaussianMixture::single(GaussianState::vacuum(2)?);
        for step in &schedule {
            if memories.len() * light.len() > config.max_components {
                return Err(Error::InvalidParameter(format!(
                    "exact mixture would exceed {} components at step {}",
                    config.max_components, step.index
                )));
            }
            memories = purify_step_narrow(&memories, &light, step, &config.decoherence)?;
            trace.push(mixture_trace(step.index, &memories, Some(config.n_max))?);
        }
        MemoryState::Mixture(memories)
    };
    Ok(PurificationResult {
        final_state,
        success_probability: 1.0,
        success_standard_error: None,
        success_is_bookkeeping: true,
        total_variance_standard_error: None,
        accepted: None,
        input,
        trace,
    })
}

/// Exact mixture after `steps` narrow-limit steps, without metrics.
pub fn narrow_mixture(config: &PurificationConfig, steps: usize) -> Result<GaussianMixture> {
    let light = dephased_tmsv(config.r, &config.phase)?;
    let mut memories = GaussianMixture::single(GaussianState::vacuum(2)?);
    for step in config.schedule()?.iter().take(steps) {
        memories = purify_step_narrow(&memories, &light, step, &config.decoherence)?;
    }
    Ok(memories)
}
