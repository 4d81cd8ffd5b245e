use std::path::{Path, PathBuf};

use gnne_core::embedding::DeepWalkConfig;
use gnne_core::evaluation::EvalConfig;
use gnne_core::gnne::TrainConfig;
use gnne_core::methods::Method;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub name: String,
    pub path: PathBuf,
}

/// Synthetic training network and its spreading labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub ba_nodes: usize,
    pub ba_m: usize,
    /// SIR realizations per node for the labels.
    pub label_runs: usize,
    /// Infection probability for labels; the epidemic threshold when absent.
    pub label_beta: Option<f64>,
    pub model: TrainConfig,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            ba_nodes: 1000,
            ba_m: 2,
            label_runs: 1000,
            label_beta: None,
            model: TrainConfig::default(),
        }
    }
}

/// One-at-a-time variation of depth, feature width and head count around
/// the trained configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub layers: Vec<usize>,
    pub feature_dim: Vec<usize>,
    pub heads: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            layers: vec![1, 2, 3, 4],
            feature_dim: vec![16, 32, 64, 128],
            heads: vec![1, 2, 4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub datasets: Vec<Dataset>,
    pub methods: Vec<Method>,
    pub training: TrainingConfig,
    pub embedding: DeepWalkConfig,
    pub evaluation: EvalConfig,
    pub ci_radius: usize,
    pub sweep: Option<SweepConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            datasets: Vec::new(),
            methods: Method::ALL.to_vec(),
            training: TrainingConfig::default(),
            embedding: DeepWalkConfig::default(),
            evaluation: EvalConfig::default(),
            ci_radius: gnne_core::centrality::DEFAULT_CI_RADIUS,
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    /// Reads a config file; relative dataset paths are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {} is invalid: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for d in &mut cfg.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::usage(format!(
                "config schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.methods.is_empty() {
            return Err(CliError::usage("config lists no methods"));
        }
        let t = &self.training;
        if t.ba_m == 0 || t.ba_nodes <= t.ba_m {
            return Err(CliError::usage("training network needs ba_nodes > ba_m >= 1"));
        }
        if t.label_runs == 0 {
            return Err(CliError::usage("label_runs must be at least 1"));
        }
        t.model.validate()?;
        if let Some(s) = &self.evaluation.spread {
            if !(s.top_frac > 0.0 && s.top_frac < 1.0) || s.runs == 0 {
                return Err(CliError::usage("spread settings need 0 < top_frac < 1 and runs >= 1"));
            }
        }
        if !(self.evaluation.figure_step > 0.0 && self.evaluation.figure_step <= 0.5) {
            return Err(CliError::usage("figure_step must lie in (0, 0.5]"));
        }
        if self.ci_radius == 0 {
            return Err(CliError::usage("ci_radius must be at least 1"));
        }
        let mut names: Vec<&str> = self.datasets.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::usage("dataset names must be unique"));
        }
        if let Some(bad) = self
            .datasets
            .iter()
            .find(|d| d.name.is_empty() || d.name.contains(['/', '\\', ',']))
        {
            return Err(CliError::usage(format!(
                "dataset name {:?} must be non-empty without '/', '\\' or ','",
                bad.name
            )));
        }
        Ok(())
    }

    /// Model settings with the experiment seed applied.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.training.model
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert!(text.contains("\"GNNE\""));
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"schema_version": 1, "methods": ["dc", "GNNE"], "training": {"label_runs": 5}}"#)
                .unwrap();
        assert_eq!(cfg.methods, vec![Method::Dc, Method::Gnne]);
        assert_eq!(cfg.training.label_runs, 5);
        assert_eq!(cfg.training.ba_nodes, 1000);
        assert_eq!(cfg.training.model.epochs_task, 2000);
    }

    #[test]
    fn schema_violations_are_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus": 1}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"methods": ["XYZ"]}"#).is_err());
        let cfg = ExperimentConfig {
            schema_version: 7,
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
