use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentId;

/// A sweep specification that cannot be run, naming every offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError(pub Vec<String>);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid sweep spec: {}", self.0.join("; "))
    }
}

impl std::error::Error for SpecError {}

impl SpecError {
    fn one(msg: impl Into<String>) -> Self {
        Self(vec![msg.into()])
    }
}

/// Real-valued grid axis: a value, a list, or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    List(Vec<f64>),
    Range { from: f64, to: f64, count: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Value(v) => vec![*v],
            Axis::List(v) => v.clone(),
            Axis::Range { from, to, count } => match count {
                0 => vec![],
                1 => vec![*from],
                n => (0..*n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
            },
        }
    }
}

/// Integer grid axis; ranges are inclusive with unit stride by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepAxis {
    Value(usize),
    List(Vec<usize>),
    Range {
        from: usize,
        to: usize,
        #[serde(default = "unit")]
        by: usize,
    },
}

fn unit() -> usize {
    1
}

impl StepAxis {
    pub fn values(&self) -> Vec<usize> {
        match self {
            StepAxis::Value(v) => vec![*v],
            StepAxis::List(v) => v.clone(),
            StepAxis::Range { from, to, by } => (*from..=*to).step_by((*by).max(1)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolName {
    Variable,
    Fixed,
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolName::Variable => "variable",
            ProtocolName::Fixed => "fixed",
        })
    }
}

/// Raw parameters as written in a config file; unset fields take the
/// experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub r: Option<Axis>,
    pub n_bar: Option<Axis>,
    pub c0: Option<Axis>,
    pub steps: Option<StepAxis>,
    pub sigma: Option<Axis>,
    pub q_threshold: Option<Axis>,
    pub depth: Option<Axis>,
    pub eta_hd: Option<Axis>,
    pub protocol: Option<Vec<ProtocolName>>,
    pub trajectories: Option<usize>,
    pub n_max: Option<usize>,
    pub phase_nodes: Option<usize>,
    pub seed: Option<u64>,
}

/// Fully resolved sweep: every axis is an explicit, validated list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    #[serde(skip)]
    pub experiment: ExperimentId,
    pub r: Vec<f64>,
    pub n_bar: Vec<f64>,
    pub c0: Vec<f64>,
    pub steps: Vec<usize>,
    pub sigma: Vec<f64>,
    pub q_threshold: Vec<f64>,
    /// `inf` disables depumping.
    pub depth: Vec<f64>,
    pub eta_hd: Vec<f64>,
    pub protocol: Vec<ProtocolName>,
    pub trajectories: usize,
    pub n_max: usize,
    /// `None` resolves the phase rule automatically.
    pub phase_nodes: Option<usize>,
    pub seed: u64,
}

const PURIFY_C0: f64 = 0.797_884_560_802_865_4; // sqrt(2 / pi)

impl SweepSpec {
    /// Defaults that regenerate the figure belonging to `experiment`.
    pub fn defaults(experiment: ExperimentId) -> Self {
        let base = SweepSpec {
            experiment,
            r: vec![0.5],
            n_bar: vec![0.0],
            c0: vec![1.0],
            steps: vec![1],
            sigma: vec![1.0],
            q_threshold: vec![],
            depth: vec![f64::INFINITY],
            eta_hd: vec![1.0],
            protocol: vec![ProtocolName::Variable, ProtocolName::Fixed],
            trajectories: 2000,
            n_max: crate::fock::DEFAULT_N_MAX,
            phase_nodes: None,
            seed: 0,
        };
        match experiment {
            ExperimentId::CmRatio => SweepSpec { steps: (1..=200).collect(), ..base },
            ExperimentId::Ktot => SweepSpec { steps: (1..=100).collect(), ..base },
            ExperimentId::MemoryEntanglement => {
                SweepSpec { n_bar: vec![0.0, 0.5, 1.0], steps: vec![1, 2, 3, 5, 10], ..base }
            }
            ExperimentId::DepthSweep => {
                SweepSpec { depth: vec![10.0, 30.0, 100.0, 300.0], steps: (1..=4).collect(), ..base }
            }
            ExperimentId::HdSweep => SweepSpec {
                eta_hd: (0..=6).map(|i| 1.0 - 0.1 * i as f64).collect(),
                steps: vec![1, 2, 4],
                ..base
            },
            ExperimentId::Purify => {
                SweepSpec { c0: vec![PURIFY_C0], sigma: vec![0.25, 0.5, 1.0], steps: vec![2, 20], ..base }
            }
            ExperimentId::WindowSweep => SweepSpec {
                c0: vec![PURIFY_C0],
                steps: vec![2, 4],
                q_threshold: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0],
                ..base
            },
        }
    }

    /// Resolves a config document for `experiment`. Top-level keys apply to
    /// every experiment, a `[<experiment-id>]` table overrides them, and each
    /// `key=value` entry of `overrides` (TOML syntax) overrides both.
    pub fn from_config(experiment: ExperimentId, text: &str, overrides: &[String]) -> Result<Self, SpecError> {
        let doc: toml::Table = toml::from_str(text).map_err(|e| SpecError::one(format!("config: {}", e.message())))?;
        let mut merged = toml::Table::new();
        for (key, value) in &doc {
            match (ExperimentId::from_str(key), value) {
                (Ok(_), toml::Value::Table(_)) => {}
                (Ok(_), _) => return Err(SpecError::one(format!("section `{key}` must be a table"))),
                (Err(_), _) => {
                    merged.insert(key.clone(), value.clone());
                }
            }
        }
        if let Some(toml::Value::Table(section)) = doc.get(experiment.as_str()) {
            for (key, value) in section {
                merged.insert(key.clone(), value.clone());
            }
        }
        for entry in overrides {
            let (key, value) =
                entry.split_once('=').ok_or_else(|| SpecError::one(format!("override `{entry}` is not key=value")))?;
            let parsed: toml::Table = toml::from_str(&format!("{} = {}", key.trim(), value.trim()))
                .map_err(|e| SpecError::one(format!("override `{entry}`: {}", e.message())))?;
            merged.extend(parsed);
        }
        let params: Params = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| SpecError::one(format!("config: {}", e.message())))?;
        Self::from_params(experiment, &params)
    }

    pub fn from_params(experiment: ExperimentId, params: &Params) -> Result<Self, SpecError> {
        let mut spec = Self::defaults(experiment);
        let axis = |a: &Option<Axis>, default: &Vec<f64>| a.as_ref().map(Axis::values).unwrap_or_else(|| default.clone());
        spec.r = axis(&params.r, &spec.r);
        spec.n_bar = axis(&params.n_bar, &spec.n_bar);
        spec.c0 = axis(&params.c0, &spec.c0);
        spec.sigma = axis(&params.sigma, &spec.sigma);
        spec.q_threshold = axis(&params.q_threshold, &spec.q_threshold);
        spec.depth = axis(&params.depth, &spec.depth);
        spec.eta_hd = axis(&params.eta_hd, &spec.eta_hd);
        if let Some(s) = &params.steps {
            spec.steps = s.values();
        }
        if let Some(p) = &params.protocol {
            spec.protocol = p.clone();
        }
        spec.trajectories = params.trajectories.unwrap_or(spec.trajectories);
        spec.n_max = params.n_max.unwrap_or(spec.n_max);
        spec.phase_nodes = params.phase_nodes.or(spec.phase_nodes);
        spec.seed = params.seed.unwrap_or(spec.seed);
        spec.validate()?;
        Ok(spec)
    }

    /// The spec as a config document that resolves back to itself.
    pub fn to_config(&self) -> String {
        toml::to_string(self).expect("spec serialises")
    }

    /// Checks every field the experiment reads.
    pub fn validate(&self) -> Result<(), SpecError> {
        use ExperimentId::*;
        let e = self.experiment;
        let mut errors = Vec::new();
        let mut check = |name: &str, values: &[f64], ok: fn(f64) -> bool, rule: &str| {
            if values.is_empty() {
                errors.push(format!("`{name}` grid is empty"));
            }
            for v in values {
                if !ok(*v) {
                    errors.push(format!("`{name}` = {v} violates {rule}"));
                }
            }
        };
        check("c0", &self.c0, |v| v > 0.0 && v.is_finite(), "c0 > 0");
        if !matches!(e, CmRatio | Ktot) {
            check("r", &self.r, |v| v >= 0.0 && v.is_finite(), "r >= 0");
        }
        if matches!(e, MemoryEntanglement | DepthSweep | HdSweep) {
            check("n_bar", &self.n_bar, |v| v >= 0.0 && v.is_finite(), "n_bar >= 0");
        }
        if matches!(e, DepthSweep | HdSweep | Purify | WindowSweep) {
            check("depth", &self.depth, |v| v > 0.0, "depth > 0 (inf disables depumping)");
            check("eta_hd", &self.eta_hd, |v| v > 0.0 && v <= 1.0, "0 < eta_hd <= 1");
        }
        if matches!(e, Purify | WindowSweep) {
            check("sigma", &self.sigma, |v| v >= 0.0 && v.is_finite(), "sigma >= 0");
        }
        if e == WindowSweep {
            check("q_threshold", &self.q_threshold, |v| v > 0.0, "q_threshold > 0");
            if self.trajectories == 0 {
                errors.push("`trajectories` must be at least 1".into());
            }
        }
        if self.steps.is_empty() {
            errors.push("`steps` grid is empty".into());
        }
        if self.steps.contains(&0) && e != Purify {
            errors.push("`steps` entries must be >= 1".into());
        }
        if matches!(e, DepthSweep | HdSweep) && self.protocol.is_empty() {
            errors.push("`protocol` list is empty".into());
        }
        if self.n_max == 0 {
            errors.push("`n_max` must be at least 1".into());
        }
        if let Some(k) = self.phase_nodes {
            if k == 0 || k % 2 == 0 {
                errors.push(format!("`phase_nodes` = {k} must be odd"));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(SpecError(errors))
        }
    }
}
