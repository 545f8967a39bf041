use std::path::{Path, PathBuf};

use dbp_core::asymptotics::SinrModel;
use dbp_core::equalize::LamaParams;
use dbp_core::model::{ClusterPartition, Constellation, ConstellationKind};
use dbp_core::{Architecture, EqualizerKind};
use serde::Deserialize;

use crate::CliError;

/// Run configuration. Every section is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub partition: PartitionSection,
    #[serde(default)]
    pub equalizer: EqualizerSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub bs_antennas: Option<usize>,
    pub users: Option<usize>,
    #[serde(default = "default_constellation")]
    pub constellation: String,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self { bs_antennas: None, users: None, constellation: default_constellation() }
    }
}

/// At most one of the three keys; no key means a single cluster.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    pub clusters: Option<usize>,
    pub counts: Option<Vec<usize>>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualizerSection {
    #[serde(default = "default_kinds")]
    pub kinds: Vec<String>,
    #[serde(default = "default_architectures")]
    pub architectures: Vec<String>,
    #[serde(default = "default_lama_iterations")]
    pub lama_iterations: usize,
    #[serde(default = "default_damping")]
    pub lama_damping: f64,
    /// `"fixed-point"` or `"iterations"`; how analytic LAMA SINRs are obtained.
    #[serde(default = "default_lama_model")]
    pub lama_model: String,
}

impl Default for EqualizerSection {
    fn default() -> Self {
        Self {
            kinds: default_kinds(),
            architectures: default_architectures(),
            lama_iterations: default_lama_iterations(),
            lama_damping: default_damping(),
            lama_model: default_lama_model(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub es_over_n0_db: Vec<f64>,
    #[serde(default)]
    pub snr_db: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub target_rate: Vec<f64>,
    #[serde(default)]
    pub snr_loss_db: Vec<f64>,
    #[serde(default = "default_beta_min")]
    pub beta_min: f64,
    #[serde(default = "default_beta_max")]
    pub beta_max: f64,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            beta: Vec::new(),
            es_over_n0_db: Vec::new(),
            snr_db: Vec::new(),
            trials: default_trials(),
            seed: 0,
            target_rate: Vec::new(),
            snr_loss_db: Vec::new(),
            beta_min: default_beta_min(),
            beta_max: default_beta_max(),
            resolution: default_resolution(),
            grid_points: default_grid_points(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub file: Option<String>,
}

fn default_constellation() -> String {
    "16qam".into()
}
fn default_kinds() -> Vec<String> {
    EqualizerKind::ALL.iter().map(|k| k.name().to_string()).collect()
}
fn default_architectures() -> Vec<String> {
    vec!["pd".into(), "fd".into()]
}
fn default_lama_iterations() -> usize {
    LamaParams::default().max_iterations
}
fn default_damping() -> f64 {
    LamaParams::default().damping
}
fn default_lama_model() -> String {
    "fixed-point".into()
}
fn default_trials() -> usize {
    1000
}
fn default_beta_min() -> f64 {
    1e-6
}
fn default_beta_max() -> f64 {
    1.0
}
fn default_resolution() -> f64 {
    1e-4
}
fn default_grid_points() -> usize {
    201
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    /// Checks that do not depend on the command.
    fn check(&self) -> Result<(), CliError> {
        if self.sweep.trials == 0 {
            return Err(bad("sweep.trials must be at least 1"));
        }
        let p = &self.partition;
        let given = [p.clusters.is_some(), p.counts.is_some(), p.weights.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(bad("partition: set only one of clusters, counts, weights"));
        }
        if p.clusters == Some(0) {
            return Err(bad("partition.clusters must be at least 1"));
        }
        self.constellation()?;
        self.kinds()?;
        self.architectures()?;
        self.lama()?;
        self.sinr_model()?;
        for (name, values) in [
            ("beta", &self.sweep.beta),
            ("es_over_n0_db", &self.sweep.es_over_n0_db),
            ("snr_db", &self.sweep.snr_db),
            ("target_rate", &self.sweep.target_rate),
            ("snr_loss_db", &self.sweep.snr_loss_db),
        ] {
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(bad(format!("sweep.{name} contains {v}")));
            }
        }
        if let Some(b) = self.sweep.beta.iter().find(|&&b| b <= 0.0) {
            return Err(bad(format!("sweep.beta must be positive, found {b}")));
        }
        Ok(())
    }

    pub fn constellation(&self) -> Result<Constellation, CliError> {
        let kind: ConstellationKind = self.system.constellation.parse().map_err(|e| bad(format!("system.constellation: {e}")))?;
        Ok(Constellation::new(kind))
    }

    pub fn kinds(&self) -> Result<Vec<EqualizerKind>, CliError> {
        if self.equalizer.kinds.is_empty() {
            return Err(bad("equalizer.kinds is empty"));
        }
        self.equalizer.kinds.iter().map(|k| k.parse().map_err(|e| bad(format!("equalizer.kinds: {e}")))).collect()
    }

    pub fn architectures(&self) -> Result<Vec<Architecture>, CliError> {
        if self.equalizer.architectures.is_empty() {
            return Err(bad("equalizer.architectures is empty"));
        }
        self.equalizer
            .architectures
            .iter()
            .map(|a| a.parse().map_err(|e| bad(format!("equalizer.architectures: {e}"))))
            .collect()
    }

    pub fn lama(&self) -> Result<LamaParams, CliError> {
        LamaParams::new(self.equalizer.lama_iterations, self.equalizer.lama_damping).map_err(|e| bad(format!("equalizer: {e}")))
    }

    pub fn sinr_model(&self) -> Result<SinrModel, CliError> {
        match self.equalizer.lama_model.as_str() {
            "fixed-point" => Ok(SinrModel::FixedPoint),
            "iterations" => Ok(SinrModel::Iterations(self.equalizer.lama_iterations)),
            other => Err(bad(format!("equalizer.lama_model: expected \"fixed-point\" or \"iterations\", found \"{other}\""))),
        }
    }

    /// Cluster fractions for the analytic commands.
    pub fn weights(&self) -> Result<Vec<f64>, CliError> {
        let p = &self.partition;
        if let Some(w) = &p.weights {
            let total: f64 = w.iter().sum();
            if w.is_empty() || w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) || (total - 1.0).abs() > 1e-9 {
                return Err(bad(format!("partition.weights {w:?} must be non-negative and sum to 1")));
            }
            return Ok(w.clone());
        }
        if let Some(counts) = &p.counts {
            let total: usize = counts.iter().sum();
            if total == 0 {
                return Err(bad("partition.counts is empty"));
            }
            return Ok(counts.iter().map(|&n| n as f64 / total as f64).collect());
        }
        let c = p.clusters.unwrap_or(1);
        Ok(vec![1.0 / c as f64; c])
    }

    /// Antenna partition for simulations.
    pub fn partition(&self, bs_antennas: usize) -> Result<ClusterPartition, CliError> {
        let p = &self.partition;
        let part = if let Some(w) = &p.weights {
            ClusterPartition::from_weights(bs_antennas, w)
        } else if let Some(counts) = &p.counts {
            ClusterPartition::from_counts(counts.clone())
        } else {
            ClusterPartition::uniform(bs_antennas, p.clusters.unwrap_or(1))
        };
        let part = part.map_err(|e| bad(format!("partition: {e}")))?;
        if part.total() != bs_antennas {
            return Err(bad(format!("partition covers {} antennas, system.bs_antennas is {bs_antennas}", part.total())));
        }
        Ok(part)
    }

    pub fn system_size(&self) -> Result<(usize, usize), CliError> {
        match (self.system.bs_antennas, self.system.users) {
            (Some(b), Some(u)) if b > 0 && u > 0 => Ok((b, u)),
            (Some(_), Some(_)) => Err(bad("system.bs_antennas and system.users must be positive")),
            _ => Err(bad("system.bs_antennas and system.users are required")),
        }
    }
}
