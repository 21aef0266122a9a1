//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL` line to stdout regardless of output capture.
//! Tests hold a shared lock so that runtimes are measured one at a time.

mod common;

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use gaussify::experiments::{fit_log, run_experiment, ExperimentId, SweepSpec};
use gaussify::fock::{gaussian_to_fock, negativity_fock, overlap_fock, purity_fock};
use gaussify::mixture::{
    dephased_tmsv, purify_run, purify_run_narrow, total_variance_of, PhaseNoiseModel, PurificationConfig,
    PurificationResult,
};
use gaussify::protocol::{
    c_even_closed_form, coupling_sequence, mapped_covariance, pair_mu_optimal, pair_mu_squared, run_pair, run_single,
    Decoherence, ProtocolConfig, ProtocolKind,
};
use gaussify::symplectic::{gaussian_overlap, log_negativity, partial_transpose, purity_gaussian, symplectic_eigenvalues};
use gaussify::GaussianState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

/// Collects named checks and reports them as one line.
struct Report {
    id: usize,
    title: &'static str,
    start: Instant,
    budget: Duration,
    failures: Vec<String>,
    details: Vec<String>,
}

impl Report {
    fn new(id: usize, title: &'static str, budget_secs: u64) -> Self {
        Self { id, title, start: Instant::now(), budget: Duration::from_secs(budget_secs), failures: vec![], details: vec![] }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.details.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        let within = elapsed < self.budget;
        self.check(within, format!("runtime {:.1?} (budget {:?})", elapsed, self.budget));
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let body = if self.failures.is_empty() { self.details.join("; ") } else { self.failures.join("; ") };
        let line = format!("criterion {} ({}): {verdict} | {body}\n", self.id, self.title);
        let _ = std::io::stdout().write_all(line.as_bytes());
        assert!(self.failures.is_empty(), "{line}");
    }
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn criterion_01_schedule_closed_form() {
    let _guard = lock();
    let mut rep = Report::new(1, "schedule closed form", 1);
    let schedule = coupling_sequence(1000, 1.0).unwrap();
    let worst = (1..=500).map(|n| (schedule.c_seq[2 * n] - c_even_closed_form(n, 1.0)).abs()).fold(0.0, f64::max);
    rep.check(worst <= 1e-12, format!("max |C_2N - closed form| = {worst:.2e} for N <= 500"));
    let limit = (std::f64::consts::PI / 2.0).sqrt();
    let err = (schedule.c_final() - limit).abs();
    rep.check(err < 1e-3, format!("|C_1000/C_0 - sqrt(pi/2)| = {err:.2e}"));
    let ratios = schedule.ratios();
    let bounded = ratios.iter().all(|&q| (1.0 - 1e-15..=2f64.sqrt() + 1e-15).contains(&q));
    rep.check(bounded, "C_M/C_0 within [1, sqrt 2] for M <= 1000");
    rep.finish();
}

#[test]
fn criterion_02_ktot_log_fit() {
    let _guard = lock();
    let mut rep = Report::new(2, "K_tot^2 logarithmic scaling", 1);
    let spec = SweepSpec::from_config(ExperimentId::Ktot, "c0 = 1.0\nsteps = { from = 1, to = 100 }", &[]).unwrap();
    let sweep = run_experiment(&spec).unwrap();
    let fit = fit_log(&sweep.table, "M", "ktot_squared").unwrap();
    rep.check((1.0..=1.25).contains(&fit.b), format!("slope b = {:.4}", fit.b));
    rep.check((-0.05..=0.15).contains(&fit.a), format!("intercept a = {:.4}", fit.a));
    rep.finish();
}

#[test]
fn criterion_03_steps_match_closed_form() {
    let _guard = lock();
    let mut rep = Report::new(3, "step simulation vs closed form", 10);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let atom = common::random_state(&mut rng, 1, 3.0, 0.6);
        let light = common::random_state(&mut rng, 1, 3.0, 0.6);
        let c0 = rand::Rng::random_range(&mut rng, 0.5..2.0);
        let m = rand::Rng::random_range(&mut rng, 1..=50usize);
        let run = run_single(&ProtocolConfig {
            steps: m,
            kind: ProtocolKind::Variable { c0 },
            atom_init: atom.clone(),
            light: light.clone(),
            decoherence: Decoherence::IDEAL,
        })
        .unwrap();
        let c_m = coupling_sequence(m, c0).unwrap().c_final();
        let expected = mapped_covariance(atom.cov(), light.cov(), m, c0, c_m);
        worst = worst.max((run.final_state.cov() - expected).amax());
    }
    rep.check(worst <= 1e-10, format!("max elementwise deviation {worst:.2e} over 100 cases"));
    rep.finish();
}

fn pair_mu(m: usize, r: f64, n_bar: f64, c0: f64) -> f64 {
    let run = run_pair(
        m,
        ProtocolKind::Variable { c0 },
        &GaussianState::thermal(n_bar).unwrap(),
        &GaussianState::two_mode_squeezed(r),
        Decoherence::IDEAL,
    )
    .unwrap();
    symplectic_eigenvalues(&partial_transpose(run.final_state.cov(), 1).unwrap()).unwrap()[0]
}

#[test]
fn criterion_04_memory_entanglement() {
    let _guard = lock();
    let mut rep = Report::new(4, "two-memory entanglement", 5);
    let (mut worst, mut worst_opt) = (0.0f64, 0.0f64);
    for r in [0.25, 0.5, 1.0] {
        for n in [0.0, 0.5, 1.0] {
            for c0 in [0.8, 1.0, 1.25] {
                for m in 1..=10 {
                    let mu = pair_mu(m, r, n, c0);
                    worst = worst.max((mu - pair_mu_squared(m, r, n, c0).sqrt()).abs());
                    if c0 == 1.0 {
                        worst_opt = worst_opt.max((mu - pair_mu_optimal(m, r, n)).abs());
                    }
                }
            }
        }
    }
    rep.check(worst <= 1e-10, format!("mu vs squared closed form: {worst:.2e}"));
    rep.check(worst_opt <= 1e-10, format!("mu vs C_0 = 1 optimum: {worst_opt:.2e}"));
    let en = |m| -pair_mu(m, 0.5, 0.0, 1.0).log2();
    let (e1, e10) = (en(1), en(10));
    rep.check((e1 - 0.54807).abs() <= 1e-4, format!("E_N(M=1) = {e1:.6}"));
    rep.check((e10 - 1.23322).abs() <= 1e-4, format!("E_N(M=10) = {e10:.6}"));
    let asymptote = 1.0 / std::f64::consts::LN_2;
    let curve: Vec<f64> = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 4000].iter().map(|&m| en(m)).collect();
    let monotone = curve.windows(2).all(|w| w[1] > w[0]) && curve.iter().all(|&e| e < asymptote);
    rep.check(monotone, "E_N increases towards the asymptote from below");
    let gap = asymptote - curve.last().unwrap();
    rep.check(gap < 1e-3, format!("gap to 1.442695 at M=4000: {gap:.2e}"));
    rep.finish();
}

fn en_column(id: ExperimentId, config: &str) -> Vec<(String, f64, f64, usize, f64)> {
    let spec = SweepSpec::from_config(id, config, &[]).unwrap();
    let sweep = run_experiment(&spec).unwrap();
    assert_eq!(sweep.failed_rows, 0);
    let t = &sweep.table;
    let (d, eta, m, en) =
        (t.column("depth").unwrap(), t.column("eta_hd").unwrap(), t.column("M").unwrap(), t.column("log_negativity").unwrap());
    (0..t.len()).map(|i| (t.text(i, "protocol").unwrap().to_string(), d[i], eta[i], m[i] as usize, en[i])).collect()
}

#[test]
fn criterion_05_decoherence_ordering() {
    let _guard = lock();
    let mut rep = Report::new(5, "decoherence ordering", 5);
    let rows = en_column(
        ExperimentId::DepthSweep,
        "r = 0.5\nn_bar = 0.0\nc0 = 1.0\ndepth = [10.0, 30.0, 100.0, 300.0]\nsteps = [1, 2, 3, 4]",
    );
    let find = |p: &str, d: f64, m: usize| rows.iter().find(|r| r.0 == p && r.1 == d && r.3 == m).unwrap().4;
    let mut violations = Vec::new();
    for d in [10.0, 30.0, 100.0, 300.0] {
        for m in 1..=4 {
            let (v, f) = (find("variable", d, m), find("fixed", d, m));
            if v < f - 1e-12 {
                violations.push(format!("d={d} M={m}: {v:.5} < {f:.5}"));
            }
        }
    }
    rep.check(violations.is_empty(), format!("variable >= fixed on 16 points {violations:?}"));
    let (f1, f2) = (find("fixed", 10.0, 1), find("fixed", 10.0, 2));
    rep.check(f2 < f1, format!("fixed kappa at d=10: E_N(M=2) = {f2:.5} vs E_N(M=1) = {f1:.5}"));
    rep.finish();
}

#[test]
fn criterion_06_homodyne_robustness() {
    let _guard = lock();
    let mut rep = Report::new(6, "homodyne robustness", 5);
    let rows = en_column(
        ExperimentId::HdSweep,
        "r = 0.5\nn_bar = 0.0\nc0 = 1.0\ndepth = inf\neta_hd = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4]\nsteps = [2, 4]",
    );
    for p in ["variable", "fixed"] {
        for m in [2, 4] {
            let mut curve: Vec<(f64, f64)> = rows.iter().filter(|r| r.0 == p && r.3 == m).map(|r| (r.2, r.4)).collect();
            curve.sort_by(|a, b| b.0.total_cmp(&a.0));
            let at_half = curve.iter().find(|c| (c.0 - 0.5).abs() < 1e-12).unwrap().1;
            rep.check(at_half > 0.0, format!("{p} M={m}: E_N(eta=0.5) = {at_half:.4}"));
            let monotone = curve.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
            rep.check(monotone, format!("{p} M={m}: non-increasing as eta falls"));
        }
    }
    rep.finish();
}

#[test]
fn criterion_07_dephased_moments() {
    let _guard = lock();
    let mut rep = Report::new(7, "dephased-state moments", 1);
    let r = 0.5;
    let mut worst: f64 = 0.0;
    for k in 0..=15 {
        let sigma = 0.1 * k as f64;
        let (_, cov) = dephased_tmsv(r, &PhaseNoiseModel::new(sigma, 41).unwrap()).unwrap().mean_cov().unwrap();
        let expected = (-sigma * sigma).exp() * (2.0 * r).sinh();
        worst = worst.max((cov[(0, 2)] - expected).abs()).max((cov[(1, 3)] + expected).abs());
    }
    rep.check(worst <= 1e-8, format!("cross-covariance error {worst:.2e} for sigma in [0, 1.5] at K=41"));
    let i = total_variance_of(&dephased_tmsv(r, &PhaseNoiseModel::new(1.0, 41).unwrap()).unwrap()).unwrap();
    rep.check((i - 1.11075).abs() <= 1e-4, format!("I(r=0.5, sigma=1) = {i:.6}"));
    rep.finish();
}

fn non_decreasing(values: &[f64]) -> Result<(), String> {
    match values.windows(2).position(|w| w[1] < w[0] - 1e-12) {
        None => Ok(()),
        Some(i) => Err(format!("drops at step {}->{}: {:.6} -> {:.6}", i, i + 1, values[i], values[i + 1])),
    }
}

#[test]
fn criterion_08_purification_properties() {
    let _guard = lock();
    let mut rep = Report::new(8, "purification properties", 300);
    let c0 = (2.0 / std::f64::consts::PI).sqrt();
    for sigma in [0.25, 0.5, 1.0] {
        let config = PurificationConfig::new(20, 0.5, sigma, c0).unwrap();
        assert_eq!(config.n_max, 30);
        let res = purify_run_narrow(&config).unwrap();
        let series = |f: fn(&gaussify::mixture::StepTrace) -> Option<f64>| -> Vec<f64> {
            std::iter::once(&res.input).chain(&res.trace).map(|t| f(t).unwrap()).collect()
        };
        let (p, g, e) = (series(|t| t.purity), series(|t| t.gaussianity), series(|t| t.log_negativity));
        let last = res.last();
        match non_decreasing(&p) {
            Ok(()) => rep.check(true, format!("sigma={sigma}: P non-decreasing")),
            Err(e) => rep.check(false, format!("sigma={sigma}: P {e}")),
        }
        match non_decreasing(&g) {
            Ok(()) => rep.check(true, format!("sigma={sigma}: G non-decreasing")),
            Err(e) => rep.check(false, format!("sigma={sigma}: G {e}")),
        }
        let g20 = g[20];
        rep.check(g20 >= 0.99, format!("sigma={sigma}: G(20) = {g20:.4}"));
        rep.check(last.total_variance < 1.0, format!("sigma={sigma}: I(20) = {:.4}", last.total_variance));
        rep.check(e[20] <= e[0], format!("sigma={sigma}: E_N(20) = {:.4} vs input {:.4}", e[20], e[0]));
    }
    rep.finish();
}

#[test]
fn criterion_09_oracle_agreement() {
    let _guard = lock();
    let mut rep = Report::new(9, "oracle agreement", 120);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n_max = 40;
    let (mut dp, mut dov, mut den) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..50 {
        let modes = 1 + i % 2;
        let state = common::random_state(&mut rng, modes, 3.0, 0.25);
        let partner = common::random_state(&mut rng, modes, 3.0, 0.25);
        let (rho, _) = gaussian_to_fock(&state, n_max).unwrap();
        let (rho_partner, _) = gaussian_to_fock(&partner, n_max).unwrap();
        dp = dp.max((purity_fock(&rho) - purity_gaussian(&state).unwrap()).abs());
        dov = dov.max((overlap_fock(&rho, &rho_partner).unwrap() - gaussian_overlap(&state, &partner).unwrap()).abs());
        if modes == 2 {
            den = den.max((negativity_fock(&rho).unwrap() - log_negativity(&state).unwrap()).abs());
        }
    }
    rep.check(dp <= 1e-4, format!("purity {dp:.1e}"));
    rep.check(dov <= 1e-4, format!("overlap {dov:.1e}"));
    rep.check(den <= 1e-4, format!("negativity {den:.1e}"));
    rep.finish();
}

fn window_config(q: f64, m: usize, seed: u64) -> PurificationConfig {
    PurificationConfig {
        q_threshold: q,
        mc_samples: 2000,
        rng_seed: seed,
        ..PurificationConfig::new(m, 0.5, 1.0, (2.0 / std::f64::consts::PI).sqrt()).unwrap()
    }
}

fn same_result(a: &PurificationResult, b: &PurificationResult) -> bool {
    a.success_probability.to_bits() == b.success_probability.to_bits()
        && a.trace == b.trace
        && a.total_variance_standard_error == b.total_variance_standard_error
        && a.accepted == b.accepted
}

#[test]
fn criterion_10_window_protocol() {
    let _guard = lock();
    let mut rep = Report::new(10, "window protocol", 600);
    let grid = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0];
    let narrow = purify_run_narrow(&PurificationConfig::new(4, 0.5, 1.0, (2.0 / std::f64::consts::PI).sqrt()).unwrap()).unwrap();
    for m in [2, 4] {
        let runs: Vec<PurificationResult> = grid.iter().map(|&q| purify_run(&window_config(q, m, 10)).unwrap()).collect();
        let success: Vec<f64> = runs.iter().map(|r| r.success_probability).collect();
        let increasing = success.windows(2).all(|w| w[1] > w[0]);
        rep.check(increasing, format!("M={m}: success {:?}", success.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>()));
        let i_window = runs[0].last().total_variance;
        let se = runs[0].total_variance_standard_error.unwrap();
        let i_narrow = narrow.trace[m - 1].total_variance;
        rep.check(
            (i_window - i_narrow).abs() <= 3.0 * se,
            format!("M={m}: I(Q=0.05) = {i_window:.4} +- {se:.4} vs narrow {i_narrow:.4}"),
        );
    }
    let again = purify_run(&window_config(0.2, 2, 10)).unwrap();
    let first = purify_run(&window_config(0.2, 2, 10)).unwrap();
    rep.check(same_result(&first, &again), "fixed seed reproduces bit-exactly");
    rep.finish();
}
