use super::fixed_point::{sinr_fd, solve_fixed_point, FixedPointOptions};
use super::information::{awgn_mutual_information, sinr_for_rate};
use super::mse::MseSpec;
use super::state_evolution::{se_trajectory, sinr_fd_se};
use crate::model::Constellation;
use crate::{from_db, Architecture, EqualizerKind, Error, Result};

/// Which asymptotic SINR to use for iterative equalizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinrModel {
    /// Largest fixed point (infinitely many iterations).
    FixedPoint,
    /// State evolution stopped after the given number of iterations.
    Iterations(usize),
}

/// Asymptotic post-equalization SINR for one architecture.
///
/// `weights` are the cluster fractions and only matter for the fully
/// decentralized architecture.
pub fn asymptotic_sinr(
    spec: &MseSpec,
    architecture: Architecture,
    es_over_n0: f64,
    beta: f64,
    weights: &[f64],
    model: SinrModel,
) -> Result<f64> {
    let opts = FixedPointOptions { check_multiplicity: false, ..Default::default() };
    let model = if spec.kind().is_linear() { SinrModel::FixedPoint } else { model };
    match (architecture, model) {
        (Architecture::Full, SinrModel::FixedPoint) => Ok(sinr_fd(spec, es_over_n0, beta, weights, &opts)?.sinr),
        (Architecture::Full, SinrModel::Iterations(t)) => Ok(sinr_fd_se(spec, es_over_n0, beta, weights, t)?.sinr),
        (_, SinrModel::FixedPoint) => {
            Ok(solve_fixed_point(spec, spec.es() / es_over_n0, beta, 1.0, &opts)?.sinr)
        }
        (_, SinrModel::Iterations(t)) => {
            Ok(spec.es() / se_trajectory(spec, spec.es() / es_over_n0, beta, 1.0, t)?.terminal())
        }
    }
}

/// Minimum antenna-ratio query.
#[derive(Debug, Clone)]
pub struct RateQuery {
    pub kind: EqualizerKind,
    pub architecture: Architecture,
    pub constellation: Constellation,
    /// Bits per user and channel use.
    pub target_rate: f64,
    /// Excess Es/N0 over the interference-free AWGN channel, in dB.
    pub snr_loss_db: f64,
    /// Cluster fractions for the fully decentralized architecture.
    pub weights: Vec<f64>,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Bisection stops once the bracket on `beta` is this narrow.
    pub resolution: f64,
    /// Points of the coarse scan that precedes the bisection.
    pub grid_points: usize,
    pub model: SinrModel,
}

impl RateQuery {
    /// Query with `clusters` equal clusters and the default search range.
    pub fn new(
        kind: EqualizerKind,
        architecture: Architecture,
        constellation: Constellation,
        target_rate: f64,
        snr_loss_db: f64,
        clusters: usize,
    ) -> Self {
        let c = clusters.max(1);
        Self {
            kind,
            architecture,
            constellation,
            target_rate,
            snr_loss_db,
            weights: vec![1.0 / c as f64; c],
            beta_min: 1e-6,
            beta_max: 1.0,
            resolution: 1e-4,
            grid_points: 201,
            model: SinrModel::FixedPoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// Largest feasible `U / B`.
    pub beta: f64,
    pub min_inv_beta: f64,
    /// Es/N0 at which the AWGN channel reaches the target rate.
    pub awgn_sinr: f64,
    /// Es/N0 the equalizer operates at (AWGN value plus the loss).
    pub es_over_n0: f64,
}

/// Finds the smallest `B/U` at which the equalizer, operating `snr_loss_db`
/// above the AWGN requirement, still supports the target rate.
///
/// The feasible set in `beta` is located by a coarse scan from the top of the
/// range, then the boundary above the largest feasible grid point is refined
/// by bisection. Points where the equalizer is undefined (ZF beyond its
/// regime) count as infeasible.
pub fn min_antenna_ratio(q: &RateQuery) -> Result<RateResult> {
    if !(q.snr_loss_db >= 0.0 && q.snr_loss_db.is_finite()) {
        return Err(Error::InvalidParameter(format!("SNR loss {} dB must be non-negative", q.snr_loss_db)));
    }
    if !(q.beta_min > 0.0 && q.beta_min < q.beta_max && q.beta_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta range [{}, {}]", q.beta_min, q.beta_max)));
    }
    if !(q.resolution > 0.0) || q.grid_points < 2 {
        return Err(Error::InvalidParameter("search resolution and grid size must be positive".into()));
    }
    let awgn_sinr = sinr_for_rate(&q.constellation, q.target_rate)?;
    let es_over_n0 = awgn_sinr * from_db(q.snr_loss_db);
    let spec = MseSpec::new(q.kind, &q.constellation)?;

    let feasible = |beta: f64| -> Result<bool> {
        match asymptotic_sinr(&spec, q.architecture, es_over_n0, beta, &q.weights, q.model) {
            Ok(sinr) => Ok(awgn_mutual_information(&q.constellation, sinr)? >= q.target_rate),
            Err(Error::InvalidRegime(_)) => Ok(false),
            Err(e) => Err(e),
        }
    };

    let n = q.grid_points;
    let grid = |k: usize| q.beta_min + (q.beta_max - q.beta_min) * k as f64 / (n - 1) as f64;
    let mut top = None;
    for k in (0..n).rev() {
        if feasible(grid(k))? {
            top = Some(k);
            break;
        }
    }
    let Some(k) = top else {
        return Err(Error::Infeasible(format!(
            "{}-{} cannot reach {} bits at {} dB loss for beta in [{}, {}]",
            q.kind, q.architecture, q.target_rate, q.snr_loss_db, q.beta_min, q.beta_max
        )));
    };
    let beta = if k == n - 1 {
        q.beta_max
    } else {
        let (mut lo, mut hi) = (grid(k), grid(k + 1));
        while hi - lo > q.resolution {
            let mid = 0.5 * (lo + hi);
            if feasible(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok(RateResult { beta, min_inv_beta: beta.recip(), awgn_sinr, es_over_n0 })
}
