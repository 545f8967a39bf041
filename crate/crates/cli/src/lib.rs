//! Command implementations behind the `dbp` binary. Each command turns a
//! [`Config`] into a [`Table`] that is written as CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod presets;

use std::io::Write;
use std::path::Path;

use dbp_core::asymptotics::{
    asymptotic_sinr, min_antenna_ratio, sinr_fd, sinr_fd_se, FdSinr, FixedPointOptions, MseSpec, RateQuery, SinrModel,
};
use dbp_core::model::{message_volume, MessageVolume};
use dbp_core::montecarlo::{run_experiment, ExperimentConfig};
use dbp_core::validation::{run_validation, ValidationOptions, ValidationReport};
use dbp_core::{from_db, to_db, Architecture, Error};
use rayon::prelude::*;

pub use config::Config;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Classifies a library error raised at `point`.
    fn at(point: String) -> impl Fn(Error) -> CliError {
        move |e| {
            if e.is_numerical() {
                CliError::Numerical(format!("{point}: {e}"))
            } else {
                CliError::Config(format!("{point}: {e}"))
            }
        }
    }
}

/// CSV-shaped output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        out.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            out.write_record(row).map_err(io)?;
        }
        out.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
        let f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

fn num(x: f64, point: &str) -> Result<String, CliError> {
    if x.is_finite() {
        Ok(x.to_string())
    } else {
        Err(CliError::Numerical(format!("{point}: non-finite result {x}")))
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    if workers == Some(0) {
        return Err(CliError::Config("workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))
}

pub const ANALYZE_HEADER: &[&str] =
    &["beta", "es_over_n0_db", "equalizer", "architecture", "weights", "sinr_db", "sigma2", "cluster_sinr_db"];

/// Asymptotic SINR over the `(beta, Es/N0)` grid for every configured
/// equalizer and architecture. FD rows list the per-cluster SINRs; empty
/// clusters contribute nothing and are omitted.
pub fn analyze(cfg: &Config) -> Result<Table, CliError> {
    if cfg.sweep.beta.is_empty() || cfg.sweep.es_over_n0_db.is_empty() {
        return Err(CliError::Config("analyze needs sweep.beta and sweep.es_over_n0_db".into()));
    }
    let c = cfg.constellation()?;
    let weights = cfg.weights()?;
    let model = cfg.sinr_model()?;
    let opts = FixedPointOptions { check_multiplicity: false, ..Default::default() };
    let mut table = Table::new(ANALYZE_HEADER);
    for &beta in &cfg.sweep.beta {
        for &db in &cfg.sweep.es_over_n0_db {
            for kind in cfg.kinds()? {
                for arch in cfg.architectures()? {
                    let point = format!("beta = {beta}, Es/N0 = {db} dB, {kind}-{arch}");
                    let err = CliError::at(point.clone());
                    let spec = MseSpec::new(kind, &c).map_err(&err)?;
                    let a = from_db(db);
                    let (sinr, clusters) = if arch == Architecture::Full {
                        let fd: FdSinr = match model {
                            SinrModel::Iterations(t) if !kind.is_linear() => sinr_fd_se(&spec, a, beta, &weights, t),
                            _ => sinr_fd(&spec, a, beta, &weights, &opts),
                        }
                        .map_err(&err)?;
                        let per: Vec<f64> =
                            fd.cluster_sinr.iter().zip(&weights).filter(|(_, &w)| w > 0.0).map(|(s, _)| to_db(*s)).collect();
                        (fd.sinr, join(&per))
                    } else {
                        (asymptotic_sinr(&spec, arch, a, beta, &weights, model).map_err(&err)?, String::new())
                    };
                    table.rows.push(vec![
                        num(beta, &point)?,
                        num(db, &point)?,
                        kind.to_string(),
                        arch.to_string(),
                        join(&weights),
                        num(to_db(sinr), &point)?,
                        num(spec.es() / sinr, &point)?,
                        clusters,
                    ]);
                }
            }
        }
    }
    Ok(table)
}

pub const SIMULATE_HEADER: &[&str] =
    &["snr_db", "equalizer", "architecture", "C", "trials", "errors", "ser", "ci_low", "ci_high", "ser_predicted"];

/// Monte Carlo SER for every configured equalizer and architecture. All
/// curves share the channel, symbol and noise draws.
pub fn simulate(cfg: &Config, seed: Option<u64>, workers: Option<usize>) -> Result<Table, CliError> {
    let (bs_antennas, users) = cfg.system_size()?;
    if cfg.sweep.snr_db.is_empty() {
        return Err(CliError::Config("simulate needs sweep.snr_db".into()));
    }
    if workers == Some(0) {
        return Err(CliError::Config("workers must be at least 1".into()));
    }
    let partition = cfg.partition(bs_antennas)?;
    let mut table = Table::new(SIMULATE_HEADER);
    for kind in cfg.kinds()? {
        for arch in cfg.architectures()? {
            let exp = ExperimentConfig {
                bs_antennas,
                users,
                partition: partition.clone(),
                constellation: cfg.constellation()?,
                kind,
                architecture: arch,
                lama: cfg.lama()?,
                snr_db: cfg.sweep.snr_db.clone(),
                trials: cfg.sweep.trials,
                seed: seed.unwrap_or(cfg.sweep.seed),
                workers,
            };
            let result = run_experiment(&exp).map_err(CliError::at(format!("{kind}-{arch}")))?;
            for p in result.points {
                let point = format!("{kind}-{arch} at {} dB", p.snr_db);
                table.rows.push(vec![
                    num(p.snr_db, &point)?,
                    kind.to_string(),
                    arch.to_string(),
                    result.clusters.to_string(),
                    p.trials.to_string(),
                    p.errors.to_string(),
                    num(p.ser, &point)?,
                    num(p.ci_low, &point)?,
                    num(p.ci_high, &point)?,
                    num(p.ser_predicted, &point)?,
                ]);
            }
        }
    }
    Ok(table)
}

pub const RATE_HEADER: &[&str] =
    &["equalizer", "architecture", "constellation", "target_rate", "snr_loss_db", "min_inv_beta"];

/// Minimum `B/U` over the `(target_rate, snr_loss_db)` grid. Queries run in
/// parallel; the row order is fixed by the configuration.
pub fn rate_search(cfg: &Config, workers: Option<usize>) -> Result<Table, CliError> {
    if cfg.sweep.target_rate.is_empty() || cfg.sweep.snr_loss_db.is_empty() {
        return Err(CliError::Config("rate-search needs sweep.target_rate and sweep.snr_loss_db".into()));
    }
    let c = cfg.constellation()?;
    let weights = cfg.weights()?;
    let model = cfg.sinr_model()?;
    let mut queries = Vec::new();
    for kind in cfg.kinds()? {
        for arch in cfg.architectures()? {
            for &rate in &cfg.sweep.target_rate {
                for &loss in &cfg.sweep.snr_loss_db {
                    let mut q = RateQuery::new(kind, arch, c.clone(), rate, loss, weights.len());
                    q.weights = weights.clone();
                    q.beta_min = cfg.sweep.beta_min;
                    q.beta_max = cfg.sweep.beta_max;
                    q.resolution = cfg.sweep.resolution;
                    q.grid_points = cfg.sweep.grid_points;
                    q.model = model;
                    queries.push(q);
                }
            }
        }
    }
    let results: Vec<Result<Vec<String>, CliError>> = pool(workers)?.install(|| {
        queries
            .par_iter()
            .map(|q| {
                let point = format!(
                    "{}-{} {} R = {} loss = {} dB",
                    q.kind, q.architecture, c.kind(), q.target_rate, q.snr_loss_db
                );
                let r = min_antenna_ratio(q).map_err(CliError::at(point.clone()))?;
                Ok(vec![
                    q.kind.to_string(),
                    q.architecture.to_string(),
                    c.kind().to_string(),
                    num(q.target_rate, &point)?,
                    num(q.snr_loss_db, &point)?,
                    num(r.min_inv_beta, &point)?,
                ])
            })
            .collect()
    });
    let mut table = Table::new(RATE_HEADER);
    for r in results {
        table.rows.push(r?);
    }
    Ok(table)
}

/// Per-block message volumes, in MiB rounded to two decimals.
pub fn volumes(users: u64, subcarriers: u64, symbols: u64, clusters: u64, bytes_per_entry: u64) -> (MessageVolume, Table) {
    let v = message_volume(users, subcarriers, symbols, clusters, bytes_per_entry);
    let mut table = Table::new(&["architecture", "bytes", "mib"]);
    for (name, bytes, mib) in [
        ("pd", v.pd_bytes, v.pd_mib()),
        ("fd", v.fd_bytes, v.fd_mib()),
        ("cs", v.cs_bytes_per_iteration, v.cs_mib()),
    ] {
        table.rows.push(vec![name.into(), bytes.to_string(), format!("{mib:.2}")]);
    }
    (v, table)
}

pub fn validate(corrupt_fusion_weights: bool) -> ValidationReport {
    run_validation(&ValidationOptions { corrupt_fusion_weights })
}

/// Fixed-width pass/fail table.
pub fn format_report(report: &ValidationReport) -> String {
    let width = report.outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for o in &report.outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{status}  {:width$}  {}", o.name, o.description));
        if !o.passed {
            s.push_str(&format!(" ({})", o.detail));
        }
        s.push('\n');
    }
    let passed = report.outcomes.iter().filter(|o| o.passed).count();
    s.push_str(&format!("{passed}/{} properties passed\n", report.outcomes.len()));
    s
}
