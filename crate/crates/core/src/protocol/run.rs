use serde::Serialize;

use super::schedule::{coupling_sequence, fixed_kappa_steps, herec_steps, Coupling, Step};
use crate::error::{Error, Result};
use crate::symplectic::{
    log_negativity, loss_thermal_step, measure_feedback_deterministic, purity_gaussian, qnd_p_coupling, qnd_x_coupling,
    AffineQuadratureMap, Feedback, GaussianState,
};

/// Resonant optical depth of each ensemble. `Infinite` disables depumping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OpticalDepth {
    Infinite,
    Finite(f64),
}

/// Decoherence knobs shared by all protocol variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decoherence {
    pub depth: OpticalDepth,
    pub eta_hd: f64,
}

impl Decoherence {
    pub const IDEAL: Decoherence = Decoherence { depth: OpticalDepth::Infinite, eta_hd: 1.0 };

    pub fn validate(&self) -> Result<()> {
        if let OpticalDepth::Finite(d) = self.depth {
            if !(d > 0.0) {
                return Err(Error::InvalidParameter(format!("optical depth must be positive, got {d}")));
            }
        }
        if !(self.eta_hd > 0.0 && self.eta_hd <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "homodyne efficiency must lie in (0, 1], got {}",
                self.eta_hd
            )));
        }
        Ok(())
    }

    /// Depumping factor `eta_j = kappa_j^2 / d` for a step.
    pub fn depumping(&self, step: &Step) -> Result<f64> {
        match self.depth {
            OpticalDepth::Infinite => Ok(0.0),
            OpticalDepth::Finite(d) => {
                let eta = step.kappa * step.kappa / d;
                if eta > 1.0 {
                    Err(Error::Infeasible { step: step.index, eta })
                } else {
                    Ok(eta)
                }
            }
        }
    }
}

impl Default for Decoherence {
    fn default() -> Self {
        Self::IDEAL
    }
}

/// Gain rescaling and added feedback noise for a detector of efficiency
/// `eta_hd`: returns `(g / sqrt(eta), g^2 (1 - eta) / eta)`, the noise in
/// covariance units.
pub fn hd_noise_model(gain: f64, eta_hd: f64) -> Result<(f64, f64)> {
    if !(eta_hd > 0.0 && eta_hd <= 1.0) {
        return Err(Error::InvalidParameter(format!("homodyne efficiency must lie in (0, 1], got {eta_hd}")));
    }
    Ok((gain / eta_hd.sqrt(), gain * gain * (1.0 - eta_hd) / eta_hd))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ProtocolKind {
    /// Alternating couplings with variable strength, parameterised by `C_0`.
    Variable { c0: f64 },
    /// `kappa = 1`, `g_k = 1 / (k + 1)`.
    FixedKappa,
    /// `kappa = 1 / sqrt(M)` with compensating gains.
    HerecBaseline,
}

impl ProtocolKind {
    pub fn steps(&self, m: usize) -> Result<Vec<Step>> {
        if m == 0 {
            return Err(Error::InvalidParameter("protocol needs at least one step".into()));
        }
        Ok(match *self {
            ProtocolKind::Variable { c0 } => coupling_sequence(m, c0)?.steps,
            ProtocolKind::FixedKappa => fixed_kappa_steps(m),
            ProtocolKind::HerecBaseline => herec_steps(m),
        })
    }
}

/// Inputs of a deterministic run. `atom_init` holds one mode per site and
/// `light` one mode per site; every step consumes a fresh copy of `light`.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub steps: usize,
    pub kind: ProtocolKind,
    pub atom_init: GaussianState,
    pub light: GaussianState,
    pub decoherence: Decoherence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepMetrics {
    pub step: usize,
    /// Only reported for two-site runs.
    pub log_negativity: Option<f64>,
    pub purity: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_state: GaussianState,
    /// `sum_{j<=k} kappa_j^2` for `k = 1..=M`.
    pub coupling_partial_sums: Vec<f64>,
    /// Metrics after each step, recorded after depumping.
    pub metrics: Vec<StepMetrics>,
}

impl RunResult {
    pub fn total_coupling(&self) -> f64 {
        self.coupling_partial_sums.last().copied().unwrap_or(0.0)
    }

    pub fn final_log_negativity(&self) -> Option<f64> {
        self.metrics.last().and_then(|m| m.log_negativity)
    }
}

/// Local QND map on every site: atom `s` couples to light mode `sites + s`.
pub(crate) fn local_coupling(coupling: Coupling, kappa: f64, sites: usize) -> Result<AffineQuadratureMap> {
    let local = match coupling {
        Coupling::XLightPAtom => qnd_x_coupling(kappa),
        Coupling::PLightXAtom => qnd_p_coupling(kappa),
    };
    let mut total = AffineQuadratureMap::identity(2 * sites);
    for s in 0..sites {
        total = total.then(&local.embed(&[s, sites + s], 2 * sites)?)?;
    }
    Ok(total)
}

/// Runs a protocol for any number of sites. Each step: local interaction,
/// measurement and feedback at every site, then depumping of the memories.
pub fn run_protocol(config: &ProtocolConfig) -> Result<RunResult> {
    config.decoherence.validate()?;
    let sites = config.atom_init.modes();
    if config.light.modes() != sites {
        return Err(Error::Dimension(format!(
            "{} light modes per copy for {} memories",
            config.light.modes(),
            sites
        )));
    }
    let steps = config.kind.steps(config.steps)?;
    let mut atoms = config.atom_init.clone();
    let mut partial = Vec::with_capacity(steps.len());
    let mut metrics = Vec::with_capacity(steps.len());
    let mut k2 = 0.0;
    for step in &steps {
        let eta = config.decoherence.depumping(step)?;
        let joint = local_coupling(step.coupling, step.kappa, sites)?.apply(&atoms.tensor(&config.light))?;
        let mut reduced = joint;
        // highest light mode first keeps the remaining indices valid
        for s in (0..sites).rev() {
            let fb = Feedback {
                light_mode: sites + s,
                measured: step.coupling.measured(),
                atom_mode: s,
                displaced: step.coupling.displaced(),
                gain: step.gain,
                eta_hd: config.decoherence.eta_hd,
            };
            reduced = measure_feedback_deterministic(&reduced, &fb)?;
        }
        atoms = if eta > 0.0 { loss_thermal_step(&reduced, eta)? } else { reduced };
        k2 += step.kappa * step.kappa;
        partial.push(k2);
        metrics.push(StepMetrics {
            step: step.index,
            log_negativity: if sites == 2 { Some(log_negativity(&atoms)?) } else { None },
            purity: purity_gaussian(&atoms)?,
        });
    }
    Ok(RunResult { final_state: atoms, coupling_partial_sums: partial, metrics })
}

/// One memory fed with single-mode light copies.
pub fn run_single(config: &ProtocolConfig) -> Result<RunResult> {
    if config.atom_init.modes() != 1 || config.light.modes() != 1 {
        return Err(Error::Dimension("single-memory run needs one atomic and one light mode".into()));
    }
    run_protocol(config)
}

/// Two distant memories fed with two-mode light copies, `memory` being the
/// initial state of each memory.
pub fn run_pair(
    steps: usize,
    kind: ProtocolKind,
    memory: &GaussianState,
    light: &GaussianState,
    decoherence: Decoherence,
) -> Result<RunResult> {
    if memory.modes() != 1 || light.modes() != 2 {
        return Err(Error::Dimension("pair run needs one-mode memories and two-mode light".into()));
    }
    run_protocol(&ProtocolConfig {
        steps,
        kind,
        atom_init: memory.tensor(memory),
        light: light.clone(),
        decoherence,
    })
}

/// `kappa = 1` repetition; `memories` holds one mode per site.
pub fn run_fixed_kappa(
    steps: usize,
    light: &GaussianState,
    memories: &GaussianState,
    decoherence: Decoherence,
) -> Result<RunResult> {
    run_protocol(&ProtocolConfig {
        steps,
        kind: ProtocolKind::FixedKappa,
        atom_init: memories.clone(),
        light: light.clone(),
        decoherence,
    })
}

/// Ideal fixed `kappa = 1/sqrt(M)` baseline.
pub fn run_herec_baseline(steps: usize, light: &GaussianState, memory: &GaussianState) -> Result<RunResult> {
    run_protocol(&ProtocolConfig {
        steps,
        kind: ProtocolKind::HerecBaseline,
        atom_init: memory.clone(),
        light: light.clone(),
        decoherence: Decoherence::IDEAL,
    })
}
