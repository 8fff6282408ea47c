//! Experiment configuration: one JSON document, validated in full.

use std::path::PathBuf;

use gpaf::coupling::CouplingEngine;
use gpaf::process::SamplerKind;
use gpaf::ProcessParams;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Generate,
    Ensemble,
    Theory,
    Analyze,
    Couple,
    CheckKernel,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Generate => "generate",
            Mode::Ensemble => "ensemble",
            Mode::Theory => "theory",
            Mode::Analyze => "analyze",
            Mode::Couple => "couple",
            Mode::CheckKernel => "check-kernel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DiameterChoice {
    Skip,
    #[default]
    Ifub,
    Exact,
}

/// Thresholds and ranges used by the analysis steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Lower cutoff of the tail fit.
    pub k_min: u64,
    /// Largest `k` written to `theory.csv` and compared in reports.
    pub k_max: usize,
    /// Truncation of the limiting recursion.
    pub theory_k_max: usize,
    /// Kernel check: cap mass fraction `μ`, S2 constant `L`, S3 lower bound.
    pub mu: f64,
    pub l: f64,
    pub c3_min: f64,
    pub diameter: DiameterChoice,
    /// Random points per snapshot at which the total attraction is probed.
    pub probe_points: usize,
    /// 0-based vertices whose degrees are recorded at every snapshot.
    pub tracked_vertices: Vec<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            k_min: 20,
            k_max: 1000,
            theory_k_max: 1_000_000,
            mu: 0.25,
            l: 50.0,
            c3_min: 0.0,
            diameter: DiameterChoice::Ifub,
            probe_points: 0,
            tracked_vertices: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ProcessParams,
    pub mode: Mode,
    pub outputs: PathBuf,
    #[serde(default = "one")]
    pub replicas: usize,
    #[serde(default)]
    pub snapshot_times: Vec<usize>,
    /// Worker threads; all available cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub sampler: SamplerKind,
    /// Write `edges.tsv` (or one file per replica).
    #[serde(default)]
    pub write_edges: bool,
    /// Edge list read by `analyze`.
    #[serde(default)]
    pub input: Option<PathBuf>,
    /// Perturbation time for `couple`.
    #[serde(default)]
    pub tau: Option<usize>,
    #[serde(default)]
    pub coupling_engine: CouplingEngine,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

/// Key that marks a document as a run manifest rather than a bare config.
pub const MANIFEST_VERSION_KEY: &str = "manifest_version";

fn one() -> usize {
    1
}

/// A validated configuration and the non-fatal findings.
#[derive(Debug, Clone)]
pub struct Validated {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config does not parse: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Constraint { field: &'static str, message: String },
}

fn violation(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Constraint {
        field,
        message: message.into(),
    }
}

/// Parses a config (or a `manifest.json`, whose `config` member is used) and
/// reports every violated constraint.
pub fn validate_config(raw: &str) -> Result<Validated, Vec<ConfigError>> {
    let mut value: Value = serde_json::from_str(raw).map_err(|e| vec![ConfigError::Parse(e.to_string())])?;
    if value.get(MANIFEST_VERSION_KEY).is_some() {
        value = value.get_mut("config").map(Value::take).unwrap_or(Value::Null);
    }
    let config: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| vec![ConfigError::Parse(e.to_string())])?;
    let (errors, warnings) = check(&config);
    if errors.is_empty() {
        Ok(Validated { config, warnings })
    } else {
        Err(errors)
    }
}

fn check(c: &ExperimentConfig) -> (Vec<ConfigError>, Vec<String>) {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let p = &c.params;
    if p.n < 1 {
        errors.push(violation("params.n", "n ≥ 1 required"));
    }
    if p.m < 1 {
        errors.push(violation("params.m", "m ≥ 1 required"));
    }
    if !(p.alpha > 0.0 && p.alpha.is_finite()) {
        errors.push(violation("params.alpha", format!("alpha = {} violates α > 0", p.alpha)));
    } else if p.alpha <= 2.0 && matches!(c.mode, Mode::Theory | Mode::Ensemble) {
        warnings.push(format!(
            "alpha = {} ≤ 2: the limiting degree law needs α > 2; theory output is skipped",
            p.alpha
        ));
    }
    if !(p.delta > -(p.m as f64) && p.delta.is_finite()) {
        errors.push(violation(
            "params.delta",
            format!("delta = {} violates δ > −m (m = {})", p.delta, p.m),
        ));
    }
    if let Err(e) = p.kernel.validate() {
        errors.push(violation("params.kernel", e.to_string()));
    }
    if c.replicas < 1 {
        errors.push(violation("replicas", "replicas ≥ 1 required"));
    }
    if c.snapshot_times.windows(2).any(|w| w[0] >= w[1]) {
        errors.push(violation("snapshot_times", "must be strictly ascending"));
    }
    if let Some(&t) = c.snapshot_times.iter().find(|&&t| t < 1 || t > p.n) {
        errors.push(violation("snapshot_times", format!("{t} outside [1, n = {}]", p.n)));
    }
    if c.threads == Some(0) {
        errors.push(violation("threads", "threads ≥ 1 required"));
    }
    if let SamplerKind::Fast { acceptance_floor } = c.sampler {
        if !(0.0..=1.0).contains(&acceptance_floor) {
            errors.push(violation("sampler.acceptance_floor", "must lie in [0, 1]"));
        }
    }
    if let Some(&v) = c.analysis.tracked_vertices.iter().find(|&&v| v >= p.n) {
        errors.push(violation("analysis.tracked_vertices", format!("{v} outside [0, n)")));
    }
    if !(c.analysis.mu > 0.0 && c.analysis.mu <= 1.0) {
        errors.push(violation("analysis.mu", "μ ∈ (0, 1] required"));
    }
    if c.analysis.k_min < 1 {
        errors.push(violation("analysis.k_min", "k_min ≥ 1 required"));
    }
    if c.analysis.theory_k_max < 2 * p.m || c.analysis.k_max < 1 {
        errors.push(violation("analysis.theory_k_max", "k_max ≥ 2m required"));
    }
    match c.mode {
        Mode::Couple => match c.tau {
            None => errors.push(violation("tau", "couple mode needs tau")),
            Some(t) if t < 1 || t > p.n => {
                errors.push(violation("tau", format!("tau = {t} outside [1, n = {}]", p.n)))
            }
            _ => {}
        },
        Mode::Analyze if c.input.is_none() => {
            errors.push(violation("input", "analyze mode needs an edge list"))
        }
        _ => {}
    }
    (errors, warnings)
}
