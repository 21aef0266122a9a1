//! Parameter sweeps behind the command-line tool.
//!
//! Each [`ExperimentId`] regenerates the data of one figure by calling a
//! single engine operation over a grid. A sweep is described by a TOML
//! config: top-level keys apply to every experiment, a table named after the
//! experiment id overrides them, and `key=value` overrides from the command
//! line win over both.
//!
//! ```toml
//! r = 0.5
//! seed = 7
//!
//! [purify]
//! sigma = [0.25, 0.5, 1.0]
//! steps = [2, 20]
//!
//! [window-sweep]
//! q_threshold = { from = 0.1, to = 1.0, count = 10 }
//! ```
//!
//! Output is CSV preceded by `#` metadata lines (tool version, seed and the
//! resolved spec as a config document), with reals written to 12
//! significant digits.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

mod fit;
mod run;
mod spec;
mod table;

pub use fit::{fit_log, fit_log_points, LogFit};
pub use run::{run_experiment, status_of, Sweep};
pub use spec::{Axis, Params, ProtocolName, SpecError, StepAxis, SweepSpec};
pub use table::{format_real, Cell, Metadata, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GAUSSIFY_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    CmRatio,
    Ktot,
    MemoryEntanglement,
    DepthSweep,
    HdSweep,
    Purify,
    WindowSweep,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::CmRatio,
        ExperimentId::Ktot,
        ExperimentId::MemoryEntanglement,
        ExperimentId::DepthSweep,
        ExperimentId::HdSweep,
        ExperimentId::Purify,
        ExperimentId::WindowSweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::CmRatio => "cm-ratio",
            ExperimentId::Ktot => "ktot",
            ExperimentId::MemoryEntanglement => "memory-entanglement",
            ExperimentId::DepthSweep => "depth-sweep",
            ExperimentId::HdSweep => "hd-sweep",
            ExperimentId::Purify => "purify",
            ExperimentId::WindowSweep => "window-sweep",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentId::CmRatio => "final-to-initial coupling ratio C_M/C_0 of the variable schedule",
            ExperimentId::Ktot => "total coupling K_tot^2 against M with a logarithmic fit",
            ExperimentId::MemoryEntanglement => "two-memory entanglement transferred from TMSV light",
            ExperimentId::DepthSweep => "entanglement under depumping for variable and fixed kappa",
            ExperimentId::HdSweep => "entanglement against homodyne efficiency",
            ExperimentId::Purify => "narrow-window purification of phase-diffused light",
            ExperimentId::WindowSweep => "finite-window purification: success probability and moments",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| SpecError(vec![format!("unknown experiment `{s}`")]))
    }
}

/// Failure of a command-line run.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{count} of {total} rows failed in the engine")]
    Engine { count: usize, total: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Spec(_) => 2,
            RunError::Engine { .. } => 3,
            RunError::Io { .. } => 1,
        }
    }
}

/// `$GAUSSIFY_OUT_DIR/<id>.csv`, or `<id>.csv` in the working directory.
pub fn default_output(id: ExperimentId) -> PathBuf {
    let name = format!("{id}.csv");
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(name),
        _ => PathBuf::from(name),
    }
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| RunError::Io { path: parent.into(), source })?;
    }
    std::fs::write(path, text).map_err(|source| RunError::Io { path: path.into(), source })
}

/// Runs `spec`, writes the CSV to `out` (and `<out>.json` when `json`), and
/// returns the sweep. Files are written even when some rows fail.
pub fn run_to_files(spec: &SweepSpec, out: &Path, json: bool) -> Result<Sweep, RunError> {
    let sweep = run_experiment(spec)?;
    let metadata = Metadata {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: spec.experiment.to_string(),
        seed: spec.seed,
        spec: spec.to_config(),
    };
    write(out, &sweep.table.to_csv(&metadata))?;
    if json {
        let mut path = out.as_os_str().to_owned();
        path.push(".json");
        write(Path::new(&path), &sweep.table.to_json(&metadata))?;
    }
    if sweep.failed_rows > 0 {
        return Err(RunError::Engine { count: sweep.failed_rows, total: sweep.table.len() });
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("fig9".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn files_are_byte_identical_across_runs() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SweepSpec::from_config(ExperimentId::Ktot, "steps = {from = 1, to = 20}", &[]).unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("sub/b.csv");
        run_to_files(&spec, &a, true).unwrap();
        run_to_files(&spec, &b, true).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let json: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join("a.csv.json")).unwrap()).unwrap();
        assert_eq!(json["rows"].as_array().unwrap().len(), 20);
    }
}
