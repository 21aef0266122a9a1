use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use libm::erfc;

use super::gmm::{total_variance, GaussianMixture};
use super::narrow::{mixture_trace, MemoryState, PurificationConfig, PurificationResult, StepTrace};
use super::phase::dephased_tmsv;
use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::protocol::{local_coupling, Step};
use crate::symplectic::{
    gaussian_overlap, homodyne_condition_inefficient, loss_thermal_step, quad_index, AffineQuadratureMap,
    GaussianState,
};

const LEGENDRE_NODES: usize = 20;
/// Panels of the outcome integral span at most this many standard deviations.
const PANEL_SDS: f64 = 1.5;
/// Integration is clipped to this many standard deviations around the mean.
const TAIL_SDS: f64 = 12.0;
const MAX_PROPOSALS: usize = 1_000_000;

/// Joint law of the two light outcomes of one step.
#[derive(Debug, Clone, Copy)]
struct OutcomeLaw {
    mean: [f64; 2],
    var: [f64; 2],
    cross: f64,
}

impl OutcomeLaw {
    fn of(joint: &GaussianState, step: &Step, eta_hd: f64) -> Self {
        let quad = step.coupling.measured();
        let (a, b) = (quad_index(2, quad), quad_index(3, quad));
        let noise = (1.0 - eta_hd) / eta_hd;
        let cov = joint.cov();
        Self {
            mean: [joint.mean()[a], joint.mean()[b]],
            var: [0.5 * (cov[(a, a)] + noise), 0.5 * (cov[(b, b)] + noise)],
            cross: 0.5 * cov[(a, b)],
        }
    }

    /// Mean and standard deviation of the second outcome given the first.
    fn conditional(&self, a: f64) -> (f64, f64) {
        let mean = self.mean[1] + self.cross / self.var[0] * (a - self.mean[0]);
        let var = (self.var[1] - self.cross * self.cross / self.var[0]).max(0.0);
        (mean, var.sqrt())
    }
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// `P(lo < X < hi)` for `X ~ N(mean, sd^2)`, evaluated on the shorter tail.
fn interval_probability(lo: f64, hi: f64, mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return if lo < mean && mean < hi { 1.0 } else { 0.0 };
    }
    let (zl, zh) = ((lo - mean) / sd, (hi - mean) / sd);
    if zl >= 0.0 {
        upper_tail(zl) - upper_tail(zh)
    } else if zh <= 0.0 {
        upper_tail(-zh) - upper_tail(-zl)
    } else {
        1.0 - upper_tail(-zl) - upper_tail(zh)
    }
}

/// Probability of both outcomes landing in `[-q, q]`.
fn window_probability(law: &OutcomeLaw, q: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let sd = law.var[0].sqrt();
    let lo = (-q).max(law.mean[0] - TAIL_SDS * sd);
    let hi = q.min(law.mean[0] + TAIL_SDS * sd);
    if !(lo < hi) {
        return 0.0;
    }
    let panels = ((hi - lo) / (PANEL_SDS * sd)).ceil().max(1.0) as usize;
    let width = (hi - lo) / panels as f64;
    let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
    let mut total = 0.0;
    for panel in 0..panels {
        let mid = lo + (panel as f64 + 0.5) * width;
        for (t, w) in rule.0.iter().zip(&rule.1) {
            let a = mid + 0.5 * width * t;
            let z = (a - law.mean[0]) / sd;
            let (mb, sb) = law.conditional(a);
            total += w * 0.5 * width * norm * (-0.5 * z * z).exp() * interval_probability(-q, q, mb, sb);
        }
    }
    total
}

/// Inverse-CDF draw from `N(mean, sd^2)` restricted to `(lo, hi)`.
fn sample_interval(rng: &mut ChaCha8Rng, lo: f64, hi: f64, mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return mean;
    }
    let standard = Normal::standard();
    let (zl, zh) = ((lo - mean) / sd, (hi - mean) / sd);
    // work in the tail where the CDF keeps its relative precision
    let (flip, zl, zh) = if zl > 0.0 { (-1.0, -zh, -zl) } else { (1.0, zl, zh) };
    let (cl, ch) = (upper_tail(-zl), upper_tail(-zh));
    let z = loop {
        let u = cl + (ch - cl) * rng.random::<f64>();
        if u > 0.0 && u < 1.0 {
            break standard.inverse_cdf(u).clamp(zl, zh);
        }
    };
    mean + flip * sd * z
}

fn sample_outcomes(rng: &mut ChaCha8Rng, law: &OutcomeLaw, q: f64) -> Result<(f64, f64)> {
    let sd = law.var[0].sqrt();
    for _ in 0..MAX_PROPOSALS {
        let a = sample_interval(rng, -q, q, law.mean[0], sd);
        let (mb, sb) = law.conditional(a);
        if rng.random::<f64>() < interval_probability(-q, q, mb, sb) {
            return Ok((a, sample_interval(rng, -q, q, mb, sb)));
        }
    }
    Err(Error::Numerical("outcome sampling inside the window did not converge".into()))
}

/// Cumulative weight and memory state after every step of one trajectory.
struct Trajectory {
    steps: Vec<(f64, GaussianState)>,
}

struct StepPlan<'a> {
    step: &'a Step,
    map: AffineQuadratureMap,
    depumping: f64,
}

fn run_trajectory(
    config: &PurificationConfig,
    light: &GaussianMixture,
    plan: &[StepPlan],
    rule: &(Vec<f64>, Vec<f64>),
    index: u64,
) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(index);
    let eta_hd = config.decoherence.eta_hd;
    let q = config.q_threshold;
    let mut state = GaussianState::vacuum(2)?;
    let mut weight = 1.0;
    let mut steps = Vec::with_capacity(plan.len());
    for p in plan {
        if weight > 0.0 {
            let joints = light.iter().map(|(_, l)| p.map.apply(&state.tensor(l))).collect::<Result<Vec<_>>>()?;
            let laws: Vec<OutcomeLaw> = joints.iter().map(|j| OutcomeLaw::of(j, p.step, eta_hd)).collect();
            let pass: Vec<f64> = light.iter().zip(&laws).map(|((w, _), law)| w * window_probability(law, q, rule)).collect();
            let total: f64 = pass.iter().sum();
            if total > 0.0 {
                let mut u = rng.random::<f64>() * total;
                let k = pass.iter().position(|&x| {
                    u -= x;
                    u < 0.0
                });
                let k = k.unwrap_or_else(|| pass.iter().rposition(|&x| x > 0.0).unwrap_or(0));
                let (a, b) = sample_outcomes(&mut rng, &laws[k], q)?;
                let quad = p.step.coupling.measured();
                let first = homodyne_condition_inefficient(&joints[k], 3, quad, b, eta_hd)?;
                let both = homodyne_condition_inefficient(&first.state, 2, quad, a, eta_hd)?;
                let shift = p.step.coupling.displaced();
                let mut mean: DVector<f64> = both.state.mean().clone();
                mean[quad_index(0, shift)] += p.step.gain * a;
                mean[quad_index(1, shift)] += p.step.gain * b;
                state = GaussianState::from_parts_unchecked(mean, both.state.cov().clone());
                if p.depumping > 0.0 {
                    state = loss_thermal_step(&state, p.depumping)?;
                }
            }
            weight *= total;
        }
        steps.push((weight, state.clone()));
    }
    Ok(Trajectory { steps })
}

/// Weighted ensemble moments as `(sum w, sum w mean, sum w (cov + 2 mean mean^T))`.
type Moments = (f64, DVector<f64>, DMatrix<f64>);

fn moments_of(weight: f64, state: &GaussianState) -> Moments {
    let m = state.mean();
    (weight, m * weight, (state.cov() + m * m.transpose() * 2.0) * weight)
}

fn variance_from(m: &Moments) -> Result<f64> {
    let mean = &m.1 / m.0;
    let cov = &m.2 / m.0 - &mean * mean.transpose() * 2.0;
    total_variance(&cov)
}

/// Total variance of the weighted ensemble and its jackknife standard error.
fn ensemble_variance(members: &[(f64, &GaussianState)]) -> Result<(f64, f64)> {
    let parts: Vec<Moments> = members.iter().map(|(w, s)| moments_of(*w, s)).collect();
    let mut sum: Moments = (0.0, DVector::zeros(4), DMatrix::zeros(4, 4));
    for p in &parts {
        sum.0 += p.0;
        sum.1 += &p.1;
        sum.2 += &p.2;
    }
    let value = variance_from(&sum)?;
    let n = parts.len() as f64;
    if parts.len() < 2 {
        return Ok((value, f64::NAN));
    }
    let mut loo = Vec::with_capacity(parts.len());
    for p in &parts {
        let rest = (sum.0 - p.0, &sum.1 - &p.1, &sum.2 - &p.2);
        if rest.0 > 0.0 {
            loo.push(variance_from(&rest)?);
        }
    }
    let avg = loo.iter().sum::<f64>() / loo.len() as f64;
    let spread: f64 = loo.iter().map(|v| (v - avg).powi(2)).sum();
    Ok((value, ((n - 1.0) / n * spread).sqrt()))
}

/// `Tr rho^2` of the weighted ensemble, excluding self-overlaps so that the
/// estimate is unbiased in the number of trajectories.
fn ensemble_purity(members: &[(f64, &GaussianState)]) -> Result<f64> {
    let rows = (0..members.len())
        .into_par_iter()
        .map(|i| {
            let (wi, si) = members[i];
            let mut num = 0.0;
            let mut den = 0.0;
            for &(wj, sj) in &members[i + 1..] {
                num += wi * wj * gaussian_overlap(si, sj)?;
                den += wi * wj;
            }
            Ok((num, den))
        })
        .collect::<Result<Vec<_>>>()?;
    let (num, den) = rows.iter().fold((0.0, 0.0), |acc, r| (acc.0 + r.0, acc.1 + r.1));
    if !(den > 0.0) {
        return Err(Error::NoAcceptedTrajectories);
    }
    Ok(num / den)
}

/// Finite-window purification by Monte Carlo over measurement records.
///
/// Each trajectory carries one Gaussian memory state. At every step the
/// phase node and both outcomes are drawn from their joint law restricted to
/// the window `|Q| <= Q_T`, and the trajectory weight is multiplied by the
/// exact pass probability of that step. The success probability is the mean
/// weight; ensemble metrics are weight-averaged. Trajectory `i` draws from
/// stream `i` of a generator seeded with `rng_seed`, so results do not depend
/// on scheduling.
pub fn purify_run_window(config: &PurificationConfig) -> Result<PurificationResult> {
    config.validate()?;
    if !(config.q_threshold > 0.0) {
        return Err(Error::InvalidParameter("the window run needs a positive threshold".into()));
    }
    let light = dephased_tmsv(config.r, &config.phase)?;
    let input = mixture_trace(0, &light, Some(config.n_max))?;
    let schedule = config.schedule()?;
    let plan = schedule
        .iter()
        .map(|step| {
            Ok(StepPlan {
                step,
                map: local_coupling(step.coupling, step.kappa, 2)?,
                depumping: config.decoherence.depumping(step)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rule = gauss_legendre(LEGENDRE_NODES)?;
    let trajectories = (0..config.mc_samples as u64)
        .into_par_iter()
        .map(|i| run_trajectory(config, &light, &plan, &rule, i))
        .collect::<Result<Vec<_>>>()?;

    let n = trajectories.len() as f64;
    let mut trace = Vec::with_capacity(plan.len());
    let mut finals = Vec::new();
    let mut success = (0.0, 0.0);
    let mut variance_error = 0.0;
    for (t, p) in plan.iter().enumerate() {
        let members: Vec<(f64, &GaussianState)> =
            trajectories.iter().map(|tr| (tr.steps[t].0, &tr.steps[t].1)).filter(|(w, _)| *w > 0.0).collect();
        if members.is_empty() {
            return Err(Error::NoAcceptedTrajectories);
        }
        let mean_w = trajectories.iter().map(|tr| tr.steps[t].0).sum::<f64>() / n;
        let var_w = trajectories.iter().map(|tr| (tr.steps[t].0 - mean_w).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let (variance, error) = ensemble_variance(&members)?;
        let last = t + 1 == plan.len();
        trace.push(StepTrace {
            step: p.step.index,
            total_variance: variance,
            purity: if last { Some(ensemble_purity(&members)?) } else { None },
            log_negativity: None,
            gaussianity: None,
            success_probability: Some(mean_w),
        });
        if last {
            success = (mean_w, (var_w / n).sqrt());
            variance_error = error;
            finals = members.iter().map(|(w, s)| (*w, (*s).clone())).collect();
        }
    }
    let accepted = finals.len();
    Ok(PurificationResult {
        final_state: MemoryState::Mixture(GaussianMixture::new(finals)?.normalized()),
        success_probability: success.0,
        success_standard_error: Some(success.1),
        success_is_bookkeeping: false,
        total_variance_standard_error: Some(variance_error),
        accepted: Some(accepted),
        input,
        trace,
    })
}

/// Runs the narrow-limit engine at zero threshold and the window engine
/// otherwise.
pub fn purify_run(config: &PurificationConfig) -> Result<PurificationResult> {
    if config.q_threshold == 0.0 {
        super::narrow::purify_run_narrow(config)
    } else {
        purify_run_window(config)
    }
}

/// Deterministic-protocol reference for an unbounded window.
#[cfg(test)]
fn unconditioned_variances(config: &PurificationConfig) -> Vec<f64> {
    use crate::symplectic::{measure_feedback_deterministic, Feedback};
    let light = dephased_tmsv(config.r, &config.phase).unwrap();
    let (_, cov) = light.mean_cov().unwrap();
    let light = GaussianState::new(DVector::zeros(4), cov).unwrap();
    let mut state = GaussianState::vacuum(2).unwrap();
    let mut out = Vec::new();
    for step in config.schedule().unwrap() {
        let mut joint = local_coupling(step.coupling, step.kappa, 2).unwrap().apply(&state.tensor(&light)).unwrap();
        for s in (0..2).rev() {
            let fb = Feedback {
                light_mode: 2 + s,
                measured: step.coupling.measured(),
                atom_mode: s,
                displaced: step.coupling.displaced(),
                gain: step.gain,
                eta_hd: 1.0,
            };
            joint = measure_feedback_deterministic(&joint, &fb).unwrap();
        }
        state = joint;
        out.push(total_variance(state.cov()).unwrap());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::PhaseNoiseModel;

    fn config(q: f64, steps: usize, samples: usize) -> PurificationConfig {
        let mut c = PurificationConfig::new(steps, 0.5, 1.0, (2.0 / std::f64::consts::PI).sqrt()).unwrap();
        c.phase = PhaseNoiseModel::new(1.0, 21).unwrap();
        c.q_threshold = q;
        c.mc_samples = samples;
        c.rng_seed = 7;
        c.n_max = 20;
        c
    }

    #[test]
    fn interval_probability_matches_cdf() {
        let n = Normal::new(0.3, 1.7).unwrap();
        for (lo, hi) in [(-0.5, 0.5), (2.0, 9.0), (-9.0, -4.0), (10.0, 12.0)] {
            let want = n.cdf(hi) - n.cdf(lo);
            let got = interval_probability(lo, hi, 0.3, 1.7);
            assert!((got - want).abs() < 1e-14 * (1.0 + want.abs()) || (got - want).abs() / want < 1e-9, "{got} vs {want}");
        }
        assert!(interval_probability(12.0, 13.0, 0.0, 1.0) > 0.0);
    }

    #[test]
    fn window_probability_of_product_law() {
        let law = OutcomeLaw { mean: [0.1, -0.2], var: [0.5, 0.8], cross: 0.0 };
        let rule = gauss_legendre(LEGENDRE_NODES).unwrap();
        let want = interval_probability(-0.7, 0.7, 0.1, 0.5f64.sqrt()) * interval_probability(-0.7, 0.7, -0.2, 0.8f64.sqrt());
        let got = window_probability(&law, 0.7, &rule);
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        // perfectly correlated outcomes pass together
        let tight = OutcomeLaw { mean: [0.0, 0.0], var: [1.0, 1.0], cross: 1.0 - 1e-12 };
        let single = interval_probability(-0.4, 0.4, 0.0, 1.0);
        assert!((window_probability(&tight, 0.4, &rule) - single).abs() < 1e-4);
    }

    #[test]
    fn truncated_samples_stay_inside_and_match_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws: Vec<f64> = (0..20_000).map(|_| sample_interval(&mut rng, 1.0, 3.0, 0.0, 1.0)).collect();
        assert!(draws.iter().all(|&x| (1.0..=3.0).contains(&x)));
        let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        // E[X | 1 < X < 3] = (phi(1) - phi(3)) / (Phi(3) - Phi(1))
        let want = (phi(1.0) - phi(3.0)) / interval_probability(1.0, 3.0, 0.0, 1.0);
        let got = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((got - want).abs() < 0.01, "{got} vs {want}");
        let far = sample_interval(&mut rng, 30.0, 31.0, 0.0, 1.0);
        assert!((30.0..=31.0).contains(&far));
    }

    #[test]
    fn wide_window_reproduces_deterministic_protocol() {
        let run = purify_run_window(&config(60.0, 3, 600)).unwrap();
        assert!((run.success_probability - 1.0).abs() < 1e-12);
        let reference = unconditioned_variances(&config(60.0, 3, 1));
        let se = run.total_variance_standard_error.unwrap();
        let got = run.last().total_variance;
        assert!((got - reference[2]).abs() < 4.0 * se, "{got} vs {} (se {se})", reference[2]);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let a = purify_run_window(&config(0.5, 2, 64)).unwrap();
        let b = purify_run_window(&config(0.5, 2, 64)).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.success_probability.to_bits(), b.success_probability.to_bits());
        let mut other = config(0.5, 2, 64);
        other.rng_seed = 8;
        assert_ne!(purify_run_window(&other).unwrap().trace, a.trace);
    }

    #[test]
    fn success_grows_with_threshold() {
        let mut last = 0.0;
        for q in [0.1, 0.5, 2.0] {
            let p = purify_run_window(&config(q, 2, 200)).unwrap().success_probability;
            assert!(p > last, "{p} after {last}");
            last = p;
        }
    }

    #[test]
    fn rejects_zero_threshold() {
        assert!(purify_run_window(&config(0.0, 2, 10)).is_err());
        let mut c = config(0.5, 2, 10);
        c.mc_samples = 0;
        assert!(purify_run_window(&c).is_err());
    }

    #[test]
    fn decoherence_is_applied() {
        let mut c = config(0.5, 2, 50);
        c.decoherence = crate::protocol::Decoherence { depth: crate::protocol::OpticalDepth::Finite(20.0), eta_hd: 0.8 };
        let noisy = purify_run_window(&c).unwrap();
        let clean = purify_run_window(&config(0.5, 2, 50)).unwrap();
        assert!(noisy.last().total_variance > clean.last().total_variance);
    }
}
