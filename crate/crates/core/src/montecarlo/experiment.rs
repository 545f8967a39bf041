use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::seed::child_seed;
use super::ser::{ser_closed_form, wilson_interval, WILSON_Z95};
use crate::asymptotics::{asymptotic_sinr, MseSpec, SinrModel};
use crate::equalize::centralized::centralized_equalize;
use crate::equalize::{equalize_fused, fuse_partials, hard_detect, local_preprocess, EqualizerOutput, LamaParams};
use crate::fusion::fd_equalize;
use crate::model::{sample_rayleigh_channel, sample_symbols, transmit, ClusterPartition, Constellation, SystemConfig};
use crate::{from_db, Architecture, EqualizerKind, Error, Result};

/// One symbol-error-rate sweep.
///
/// SNR points are the average receive SNR `beta Es / N0` in dB. Every trial
/// draws a fresh channel, symbol vector and noise vector from a seed that
/// depends only on `(seed, SNR index, trial index)`, so configurations that
/// differ only in equalizer or architecture see the same realizations.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub bs_antennas: usize,
    pub users: usize,
    pub partition: ClusterPartition,
    pub constellation: Constellation,
    pub kind: EqualizerKind,
    pub architecture: Architecture,
    pub lama: LamaParams,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        SystemConfig::new(self.bs_antennas, self.users, 0.0, self.constellation.es())?;
        if self.partition.total() != self.bs_antennas {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} antennas, system has {}",
                self.partition.total(),
                self.bs_antennas
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Empty("SNR points"));
        }
        if let Some(s) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(format!("SNR point {s}")));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        self.lama.validate()
    }

    pub fn beta(&self) -> f64 {
        self.users as f64 / self.bs_antennas as f64
    }

    /// Noise variance at SNR point `snr_db`.
    pub fn n0(&self, snr_db: f64) -> f64 {
        self.beta() * self.constellation.es() / from_db(snr_db)
    }
}

/// Aggregated outcome at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct SerPoint {
    pub snr_db: f64,
    pub trials: usize,
    /// Detected symbols, `trials * U`.
    pub symbols: u64,
    pub errors: u64,
    pub ser: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub sinr_predicted: f64,
    pub ser_predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerResult {
    pub kind: EqualizerKind,
    pub architecture: Architecture,
    pub clusters: usize,
    pub points: Vec<SerPoint>,
}

fn equalize(config: &ExperimentConfig, channel: &crate::model::ChannelRealization, y: &crate::CVector, n0: f64) -> Result<EqualizerOutput> {
    let c = &config.constellation;
    match config.architecture {
        Architecture::Centralized => centralized_equalize(config.kind, channel.h(), y, c, n0, &config.lama),
        Architecture::Partial => {
            let partials = channel
                .cluster_views()
                .iter()
                .zip(channel.split(y)?)
                .map(|(h_c, y_c)| local_preprocess(h_c, &y_c))
                .collect::<Result<Vec<_>>>()?;
            let fused = fuse_partials(&partials)?;
            equalize_fused(config.kind, &fused, c, n0, config.beta(), &config.lama)
        }
        Architecture::Full => Ok(fd_equalize(config.kind, channel, y, c, n0, &config.lama)?.0),
    }
}

/// Runs one trial and returns per-user symbol-error indicators.
pub fn run_trial(config: &ExperimentConfig, snr_index: usize, trial_index: usize) -> Result<Vec<bool>> {
    let snr_db = *config.snr_db.get(snr_index).ok_or(Error::InvalidParameter(format!("SNR index {snr_index}")))?;
    let n0 = config.n0(snr_db);
    let wrap = |e: Error| Error::Trial { snr_db, trial: trial_index, source: Box::new(e) };
    let mut rng = ChaCha8Rng::seed_from_u64(child_seed(config.seed, snr_index, trial_index));
    let sys = SystemConfig::new(config.bs_antennas, config.users, n0, config.constellation.es()).map_err(wrap)?;
    let channel = sample_rayleigh_channel(&sys, &mut rng).partitioned(&config.partition).map_err(wrap)?;
    let (sent, s0) = sample_symbols(&config.constellation, config.users, &mut rng);
    let y = transmit(&channel, &s0, n0, &mut rng).map_err(wrap)?;
    // detection works on the unit-gain estimate
    let out = equalize(config, &channel, &y, n0).map_err(wrap)?.unbiased(config.constellation.es());
    let detected = hard_detect(&out.z, &config.constellation);
    Ok(sent.iter().zip(&detected).map(|(a, b)| a != b).collect())
}

/// Large-system SINR matching the configured equalizer and architecture at
/// SNR point `snr_db`. LAMA is evaluated after the configured number of
/// iterations.
pub fn predicted_sinr(config: &ExperimentConfig, snr_db: f64) -> Result<f64> {
    let spec = MseSpec::new(config.kind, &config.constellation)?;
    let es_over_n0 = config.constellation.es() / config.n0(snr_db);
    let weights = match config.architecture {
        Architecture::Full => config.partition.weights(),
        _ => vec![1.0],
    };
    asymptotic_sinr(
        &spec,
        config.architecture,
        es_over_n0,
        config.beta(),
        &weights,
        SinrModel::Iterations(config.lama.max_iterations),
    )
}

/// Runs all trials at all SNR points.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SerResult> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let mut points = Vec::with_capacity(config.snr_db.len());
    for (si, &snr_db) in config.snr_db.iter().enumerate() {
        let per_trial: Vec<Result<u64>> = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|t| run_trial(config, si, t).map(|e| e.iter().filter(|&&x| x).count() as u64))
                .collect()
        });
        let mut errors = 0u64;
        for r in per_trial {
            errors += r?;
        }
        let symbols = (config.trials * config.users) as u64;
        let (ci_low, ci_high) = wilson_interval(errors, symbols, WILSON_Z95);
        let sinr_predicted = predicted_sinr(config, snr_db)?;
        points.push(SerPoint {
            snr_db,
            trials: config.trials,
            symbols,
            errors,
            ser: errors as f64 / symbols as f64,
            ci_low,
            ci_high,
            sinr_predicted,
            ser_predicted: ser_closed_form(&config.constellation, sinr_predicted)?,
        });
    }
    Ok(SerResult { kind: config.kind, architecture: config.architecture, clusters: config.partition.clusters(), points })
}
