use rayon::prelude::*;

use super::fit::fit_log_points;
use super::spec::{ProtocolName, SweepSpec};
use super::table::{Cell, Table};
use super::ExperimentId;
use crate::error::{Error, Result};
use crate::mixture::{purify_run, PhaseNoiseModel, PurificationConfig, StepTrace};
use crate::protocol::{
    coupling_sequence, pair_mu_squared, run_pair, total_coupling, Decoherence, OpticalDepth, ProtocolKind,
};
use crate::symplectic::{log_negativity, partial_transpose, symplectic_eigenvalues, GaussianState};

/// Table of an experiment together with the number of failed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub table: Table,
    pub failed_rows: usize,
}

/// Short status tag of a row whose engine call failed.
pub fn status_of(err: &Error) -> &'static str {
    match err {
        Error::Infeasible { .. } => "infeasible",
        Error::Truncation { .. } => "truncation",
        Error::NoAcceptedTrajectories => "no-accepted",
        Error::InvalidParameter(_) | Error::Dimension(_) => "invalid",
        _ => "failed",
    }
}

/// Runs every grid point of `spec`. Engine failures are recorded per row in
/// the `status` column; rows appear in grid order.
pub fn run_experiment(spec: &SweepSpec) -> std::result::Result<Sweep, super::spec::SpecError> {
    spec.validate()?;
    let table = match spec.experiment {
        ExperimentId::CmRatio => cm_ratio(spec),
        ExperimentId::Ktot => ktot(spec),
        ExperimentId::MemoryEntanglement => memory_entanglement(spec),
        ExperimentId::DepthSweep | ExperimentId::HdSweep => decoherence_sweep(spec),
        ExperimentId::Purify => purify(spec),
        ExperimentId::WindowSweep => window_sweep(spec),
    };
    let status = table.column_index("status").expect("every table has a status column");
    let failed_rows = table.rows().iter().filter(|r| r[status] != Cell::from("ok")).count();
    Ok(Sweep { table, failed_rows })
}

fn cartesian<A: Clone, B: Clone>(a: &[A], b: &[B]) -> Vec<(A, B)> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone()))).collect()
}

fn decoherence(depth: f64, eta_hd: f64) -> Decoherence {
    Decoherence {
        depth: if depth.is_finite() { OpticalDepth::Finite(depth) } else { OpticalDepth::Infinite },
        eta_hd,
    }
}

/// Pushes `ok` rows or a failure row with `nan` metrics.
fn fill(table: &mut Table, prefix: Vec<Cell>, metrics: Result<Vec<f64>>, width: usize) {
    let (values, status) = match metrics {
        Ok(v) => (v, "ok"),
        Err(e) => (vec![f64::NAN; width], status_of(&e)),
    };
    let mut row = prefix;
    row.extend(values.into_iter().map(Cell::from));
    row.push(status.into());
    table.push(row).expect("row matches header");
}

fn cm_ratio(spec: &SweepSpec) -> Table {
    let mut table = Table::new(&["c0", "M", "c_ratio", "status"]);
    let rows: Vec<_> = cartesian(&spec.c0, &spec.steps)
        .into_par_iter()
        .map(|(c0, m)| ((c0, m), coupling_sequence(m, c0).map(|s| vec![s.c_final() / c0])))
        .collect();
    for ((c0, m), v) in rows {
        fill(&mut table, vec![c0.into(), m.into()], v, 1);
    }
    table
}

fn ktot(spec: &SweepSpec) -> Table {
    let mut table = Table::new(&["c0", "M", "ktot_squared", "status"]);
    let rows: Vec<_> = cartesian(&spec.c0, &spec.steps)
        .into_par_iter()
        .map(|(c0, m)| ((c0, m), coupling_sequence(m, c0).map(|s| vec![total_coupling(&s.steps)])))
        .collect();
    for &c0 in &spec.c0 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|((c, _), v)| *c == c0 && v.is_ok())
            .map(|((_, m), v)| (*m as f64, v.as_ref().unwrap()[0]))
            .unzip();
        if let Ok(fit) = fit_log_points(&xs, &ys) {
            table.note(
                "fit ktot_squared = a + b ln(M + 1)",
                format!(
                    "c0={} a={} b={} residual={}",
                    super::table::format_real(c0),
                    super::table::format_real(fit.a),
                    super::table::format_real(fit.b),
                    super::table::format_real(fit.residual)
                ),
            );
        }
    }
    for ((c0, m), v) in rows {
        fill(&mut table, vec![c0.into(), m.into()], v, 1);
    }
    table
}

fn pair_metrics(m: usize, kind: ProtocolKind, r: f64, n_bar: f64, dec: Decoherence) -> Result<(f64, f64, f64)> {
    let memory = GaussianState::thermal(n_bar)?;
    let run = run_pair(m, kind, &memory, &GaussianState::two_mode_squeezed(r), dec)?;
    let mu = symplectic_eigenvalues(&partial_transpose(run.final_state.cov(), 1)?)?[0];
    let last = run.metrics.last().expect("at least one step");
    Ok((mu, log_negativity(&run.final_state)?, last.purity))
}

fn memory_entanglement(spec: &SweepSpec) -> Table {
    let mut table = Table::new(&["r", "n_bar", "c0", "M", "mu", "mu_closed_form", "log_negativity", "status"]);
    let grid: Vec<_> = cartesian(&cartesian(&cartesian(&spec.r, &spec.n_bar), &spec.c0), &spec.steps)
        .into_iter()
        .map(|(((r, n), c0), m)| (r, n, c0, m))
        .collect();
    let rows: Vec<_> = grid
        .into_par_iter()
        .map(|(r, n, c0, m)| {
            let v = pair_metrics(m, ProtocolKind::Variable { c0 }, r, n, Decoherence::IDEAL)
                .map(|(mu, en, _)| vec![mu, pair_mu_squared(m, r, n, c0).sqrt(), en]);
            ((r, n, c0, m), v)
        })
        .collect();
    for ((r, n, c0, m), v) in rows {
        fill(&mut table, vec![r.into(), n.into(), c0.into(), m.into()], v, 3);
    }
    table
}

fn decoherence_sweep(spec: &SweepSpec) -> Table {
    let mut table = Table::new(&[
        "protocol",
        "r",
        "n_bar",
        "c0",
        "depth",
        "eta_hd",
        "M",
        "log_negativity",
        "purity",
        "status",
    ]);
    let mut grid = Vec::new();
    for &p in &spec.protocol {
        for &r in &spec.r {
            for &n in &spec.n_bar {
                for &c0 in &spec.c0 {
                    for &d in &spec.depth {
                        for &eta in &spec.eta_hd {
                            for &m in &spec.steps {
                                grid.push((p, r, n, c0, d, eta, m));
                            }
                        }
                    }
                }
            }
        }
    }
    let rows: Vec<_> = grid
        .into_par_iter()
        .map(|(p, r, n, c0, d, eta, m)| {
            let kind = match p {
                ProtocolName::Variable => ProtocolKind::Variable { c0 },
                ProtocolName::Fixed => ProtocolKind::FixedKappa,
            };
            let v = pair_metrics(m, kind, r, n, decoherence(d, eta)).map(|(_, en, purity)| vec![en, purity]);
            ((p, r, n, c0, d, eta, m), v)
        })
        .collect();
    for ((p, r, n, c0, d, eta, m), v) in rows {
        let prefix = vec![p.to_string().into(), r.into(), n.into(), c0.into(), d.into(), eta.into(), m.into()];
        fill(&mut table, prefix, v, 2);
    }
    table
}

fn purification_config(spec: &SweepSpec, steps: usize, r: f64, c0: f64, sigma: f64, d: f64, eta: f64, q: f64) -> Result<PurificationConfig> {
    let phase = match spec.phase_nodes {
        Some(k) => PhaseNoiseModel::new(sigma, k)?,
        None => PhaseNoiseModel::resolved(sigma, r)?,
    };
    let config = PurificationConfig {
        phase,
        q_threshold: q,
        mc_samples: if q > 0.0 { spec.trajectories } else { 0 },
        rng_seed: spec.seed,
        decoherence: decoherence(d, eta),
        n_max: spec.n_max,
        ..PurificationConfig::new(steps, r, 0.0, c0)?
    };
    config.validate()?;
    Ok(config)
}

/// Grid of `(r, c0, sigma, depth, eta_hd)` shared by the purification
/// experiments.
fn purification_grid(spec: &SweepSpec) -> Vec<(f64, f64, f64, f64, f64)> {
    let mut grid = Vec::new();
    for &r in &spec.r {
        for &c0 in &spec.c0 {
            for &s in &spec.sigma {
                for &d in &spec.depth {
                    for &eta in &spec.eta_hd {
                        grid.push((r, c0, s, d, eta));
                    }
                }
            }
        }
    }
    grid
}

fn narrow_metrics(t: &StepTrace) -> Vec<f64> {
    [Some(t.total_variance), t.log_negativity, t.purity, t.gaussianity].iter().map(|v| v.unwrap_or(f64::NAN)).collect()
}

fn purify(spec: &SweepSpec) -> Table {
    let mut table = Table::new(&[
        "r",
        "c0",
        "sigma",
        "depth",
        "eta_hd",
        "M",
        "total_variance",
        "log_negativity",
        "purity",
        "gaussianity",
        "status",
    ]);
    let horizon = *spec.steps.iter().max().expect("validated non-empty");
    let mut reported: Vec<usize> = std::iter::once(0).chain(spec.steps.iter().copied()).collect();
    reported.sort_unstable();
    reported.dedup();
    let runs: Vec<_> = purification_grid(spec)
        .into_par_iter()
        .map(|(r, c0, s, d, eta)| {
            let result = purification_config(spec, horizon.max(1), r, c0, s, d, eta, 0.0).and_then(|c| purify_run(&c));
            ((r, c0, s, d, eta), result)
        })
        .collect();
    for ((r, c0, s, d, eta), result) in runs {
        for &m in &reported {
            let metrics = result.as_ref().map_err(Clone::clone).map(|res| {
                let t = if m == 0 { &res.input } else { &res.trace[m - 1] };
                narrow_metrics(t)
            });
            fill(&mut table, vec![r.into(), c0.into(), s.into(), d.into(), eta.into(), m.into()], metrics, 4);
        }
    }
    table
}

fn window_sweep(spec: &SweepSpec) -> Table {
    let mut table = Table::new(&[
        "r",
        "c0",
        "sigma",
        "depth",
        "eta_hd",
        "q_threshold",
        "M",
        "success_probability",
        "success_se",
        "total_variance",
        "total_variance_se",
        "purity",
        "accepted",
        "status",
    ]);
    let mut grid = Vec::new();
    for point in purification_grid(spec) {
        for &q in &spec.q_threshold {
            for &m in &spec.steps {
                grid.push((point, q, m));
            }
        }
    }
    let rows: Vec<_> = grid
        .into_iter()
        .map(|((r, c0, s, d, eta), q, m)| {
            let result = purification_config(spec, m, r, c0, s, d, eta, q).and_then(|c| purify_run(&c));
            ((r, c0, s, d, eta, q, m), result)
        })
        .collect();
    for ((r, c0, s, d, eta, q, m), result) in rows {
        let mut row: Vec<Cell> = vec![r.into(), c0.into(), s.into(), d.into(), eta.into(), q.into(), m.into()];
        match result {
            Ok(res) => {
                let last = res.last();
                row.extend([
                    Cell::from(res.success_probability),
                    res.success_standard_error.into(),
                    last.total_variance.into(),
                    res.total_variance_standard_error.into(),
                    last.purity.into(),
                    Cell::Int(res.accepted.unwrap_or(0) as i64),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                row.extend((0..5).map(|_| Cell::Real(f64::NAN)));
                row.push(Cell::Int(0));
                row.push(status_of(&e).into());
            }
        }
        table.push(row).expect("row matches header");
    }
    table
}
