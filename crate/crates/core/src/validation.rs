//! Invariant suite: analytic identities, bounds and equivalences between the
//! numerical routes, each reported as a named pass/fail property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{
    asymptotic_sinr, awgn_mutual_information, psi, se_trajectory, sinr_fd, sinr_fd_lmmse_closed, sinr_fd_zf_closed,
    sinr_pd_closed_form, solve_fixed_point, ComplexGaussRule, FixedPointOptions, MseSpec, SinrModel,
};
use crate::equalize::centralized::{centralized_equalize, centralized_lama};
use crate::equalize::{
    equalize_fused, fuse_partials, lama_equalize, local_preprocess, EqualizerOutput, FusedStats, LamaParams,
};
use crate::fusion::{fd_equalize, fused_variance_with, optimal_fusion_weights, FusionWeights};
use crate::model::{
    message_volume, sample_rayleigh_channel, sample_symbols, transmit, ChannelRealization, ClusterPartition,
    Constellation, SystemConfig,
};
use crate::montecarlo::ser_closed_form;
use crate::{from_db, Architecture, CVector, EqualizerKind};

/// Switches for negative controls.
#[derive(Debug, Clone, Copy, Default)]
pub struct ValidationOptions {
    /// Perturb the inverse-variance fusion weights before they are checked.
    pub corrupt_fusion_weights: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub description: &'static str,
    pub passed: bool,
    /// Failure reason, empty on success.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub outcomes: Vec<PropertyOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &PropertyOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

type Check = fn(&ValidationOptions) -> Result<(), String>;

const PROPERTIES: &[(&str, &str, Check)] = &[
    ("closed-form-fixed-point", "linear SINR closed forms equal the fixed-point solutions", closed_form_fixed_point),
    ("adder-tree-fusion", "summed cluster Gram/MRC statistics equal the full ones", adder_tree_fusion),
    ("pd-equals-centralized", "PD outputs equal centralized outputs for all equalizers", pd_equals_centralized),
    ("lama-trace-equivalence", "Gram-domain and residual-domain LAMA iterates agree", lama_trace_equivalence),
    ("optimal-fusion-weights", "inverse-variance weights minimize the fused variance", optimal_fusion),
    ("fd-single-cluster", "FD with one cluster reproduces PD", fd_single_cluster),
    ("mrc-fd-single-user", "MRC fusion equals pooled MRC without interference", mrc_fd_single_user),
    ("zf-fd-partition-invariance", "fused ZF SINR does not depend on the allocation", zf_partition_invariance),
    ("lmmse-fd-bounds", "uniform allocation bounds fused L-MMSE from below, pooling from above", lmmse_fd_bounds),
    ("fd-below-pd", "fused SINR never exceeds pooled SINR; MRC equal", fd_below_pd),
    ("lmmse-dominance", "L-MMSE SINR dominates MRC and ZF", lmmse_dominance),
    ("state-evolution-limit", "state evolution converges to the LAMA fixed point", state_evolution_limit),
    ("lama-mse-quadrature", "separable LAMA MSE agrees with a 2-D Gauss-Hermite rule", lama_mse_quadrature),
    ("information-limits", "AWGN mutual information is 0 at zero SINR and saturates", information_limits),
    ("ser-limits", "closed-form SER hits the guessing limit and decreases", ser_limits),
    ("message-volume-linearity", "message volumes scale linearly in the cluster count", volume_linearity),
];

/// Runs every property.
pub fn run_validation(opts: &ValidationOptions) -> ValidationReport {
    let outcomes = PROPERTIES
        .iter()
        .map(|&(name, description, check)| {
            let result = check(opts);
            PropertyOutcome { name, description, passed: result.is_ok(), detail: result.err().unwrap_or_default() }
        })
        .collect();
    ValidationReport { outcomes }
}

/// Names of all properties, in report order.
pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|p| p.0).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn same_output(a: &EqualizerOutput, b: &EqualizerOutput, tol: f64) -> Result<(), String> {
    let dz = (&a.z - &b.z).iter().map(|x| x.norm()).fold(0.0, f64::max);
    let ds = a.sigma2.iter().zip(&b.sigma2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let dg = a.gain.iter().zip(&b.gain).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure(dz < tol && ds < tol && dg < tol, || format!("{}: |dz| = {dz:e}, |dsigma2| = {ds:e}, |dgain| = {dg:e}", a.kind))
}

struct Instance {
    channel: ChannelRealization,
    y: CVector,
    n0: f64,
}

fn instance(rng: &mut ChaCha8Rng, b: usize, u: usize, clusters: usize, n0: f64, c: &Constellation) -> Instance {
    let cfg = SystemConfig::new(b, u, n0, c.es()).expect("valid system");
    let channel = sample_rayleigh_channel(&cfg, rng)
        .partitioned(&ClusterPartition::uniform(b, clusters).expect("valid partition"))
        .expect("partition matches");
    let (_, s) = sample_symbols(c, u, rng);
    let y = transmit(&channel, &s, n0, rng).expect("dimensions match");
    Instance { channel, y, n0 }
}

fn pd_stats(inst: &Instance) -> Result<FusedStats, String> {
    let ys = inst.channel.split(&inst.y).map_err(|e| e.to_string())?;
    let partials = inst
        .channel
        .cluster_views()
        .iter()
        .zip(ys)
        .map(|(h, y)| local_preprocess(h, &y))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    fuse_partials(&partials).map_err(|e| e.to_string())
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

const SNR_GRID_DB: [f64; 4] = [0.0, 5.0, 10.0, 20.0];
const BETA_GRID: [f64; 8] = [0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9];

fn closed_form_fixed_point(_: &ValidationOptions) -> Result<(), String> {
    for kind in EqualizerKind::LINEAR {
        let spec = MseSpec::linear(kind, 1.0).map_err(|e| e.to_string())?;
        for db in SNR_GRID_DB {
            let a = from_db(db);
            for beta in BETA_GRID {
                let fp = solve_fixed_point(&spec, 1.0 / a, beta, 1.0, &FixedPointOptions::default())
                    .map_err(|e| e.to_string())?;
                let cf = sinr_pd_closed_form(kind, a, beta).map_err(|e| e.to_string())?;
                ensure(rel(fp.sinr, cf) < 1e-9, || format!("{kind} at {db} dB, beta {beta}: {} vs {cf}", fp.sinr))?;
            }
        }
    }
    Ok(())
}

fn adder_tree_fusion(_: &ValidationOptions) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let c = Constellation::qpsk();
    for clusters in [1, 2, 4, 8] {
        let inst = instance(&mut rng, 64, 16, clusters, 0.1, &c);
        let fused = pd_stats(&inst)?;
        let full = FusedStats::from_channel(inst.channel.h(), &inst.y).map_err(|e| e.to_string())?;
        let dg = (&fused.gram - &full.gram).iter().map(|x| x.norm()).fold(0.0, f64::max);
        let dm = (&fused.mrc - &full.mrc).iter().map(|x| x.norm()).fold(0.0, f64::max);
        ensure(dg < 1e-12 && dm < 1e-12, || format!("C = {clusters}: {dg:e}, {dm:e}"))?;
    }
    Ok(())
}

fn pd_equals_centralized(_: &ValidationOptions) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let c = Constellation::qam16();
    let lama = LamaParams::new(5, 1.0).map_err(|e| e.to_string())?;
    for clusters in [2, 4, 8] {
        for _ in 0..3 {
            let inst = instance(&mut rng, 64, 16, clusters, 0.05, &c);
            let fused = pd_stats(&inst)?;
            for kind in EqualizerKind::ALL {
                let pd = equalize_fused(kind, &fused, &c, inst.n0, 0.25, &lama).map_err(|e| e.to_string())?;
                let cen =
                    centralized_equalize(kind, inst.channel.h(), &inst.y, &c, inst.n0, &lama).map_err(|e| e.to_string())?;
                same_output(&pd, &cen, 1e-10)?;
            }
        }
    }
    Ok(())
}

fn lama_trace_equivalence(_: &ValidationOptions) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let c = Constellation::qpsk();
    for damping in [1.0, 0.7] {
        let params = LamaParams::new(5, damping).map_err(|e| e.to_string())?;
        let inst = instance(&mut rng, 64, 16, 4, 0.2, &c);
        let fused = pd_stats(&inst)?;
        let pd = lama_equalize(&fused, &c, inst.n0, 0.25, &params).map_err(|e| e.to_string())?;
        let cen = centralized_lama(inst.channel.h(), &inst.y, &c, inst.n0, &params).map_err(|e| e.to_string())?;
        for (a, b) in pd.trace.iter().zip(&cen.trace) {
            let dz = (&a.z - &b.z).iter().map(|x| x.norm()).fold(0.0, f64::max);
            ensure(dz < 1e-10 && (a.phi - b.phi).abs() < 1e-10, || {
                format!("iteration {}: |dz| = {dz:e}, |dphi| = {:e}", a.t, (a.phi - b.phi).abs())
            })?;
        }
    }
    Ok(())
}

fn optimal_fusion(opts: &ValidationOptions) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let clusters = 4;
    let users = 3;
    let sigma2: Vec<Vec<f64>> =
        (0..clusters).map(|_| (0..users).map(|_| 0.05 + rng.random::<f64>()).collect()).collect();
    let mut weights = optimal_fusion_weights(&sigma2).map_err(|e| e.to_string())?;
    if opts.corrupt_fusion_weights {
        corrupt(&mut weights);
    }
    for u in 0..users {
        let column: Vec<f64> = sigma2.iter().map(|row| row[u]).collect();
        let nu: Vec<f64> = (0..clusters).map(|c| weights.nu[(c, u)]).collect();
        let total: f64 = nu.iter().sum();
        ensure((total - 1.0).abs() < 1e-12, || format!("user {u}: weights sum to {total}"))?;
        let best = column.iter().map(|s| s.recip()).sum::<f64>().recip();
        let achieved = fused_variance_with(&nu, &column);
        ensure(rel(achieved, best) < 1e-12, || format!("user {u}: fused variance {achieved} above optimum {best}"))?;
        for _ in 0..100 {
            let other = random_weights(&mut rng, clusters);
            let v = fused_variance_with(&other, &column);
            ensure(achieved <= v * (1.0 + 1e-12), || format!("user {u}: random weights reach {v} < {achieved}"))?;
        }
    }
    Ok(())
}

fn corrupt(weights: &mut FusionWeights) {
    // reverse the cluster order: still unit-sum, no longer inverse-variance
    let c = weights.clusters();
    for u in 0..weights.users() {
        for k in 0..c / 2 {
            weights.nu.swap((k, u), (c - 1 - k, u));
        }
    }
}

fn fd_single_cluster(_: &ValidationOptions) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let c = Constellation::qam16();
    let lama = LamaParams::default();
    let inst = instance(&mut rng, 64, 8, 1, 0.05, &c);
    let fused = pd_stats(&inst)?;
    for kind in EqualizerKind::ALL {
        let (fd, _) = fd_equalize(kind, &inst.channel, &inst.y, &c, inst.n0, &lama).map_err(|e| e.to_string())?;
        let pd = equalize_fused(kind, &fused, &c, inst.n0, 0.125, &lama).map_err(|e| e.to_string())?.unbiased(c.es());
        same_output(&fd, &pd, 1e-10)?;
    }
    Ok(())
}

fn mrc_fd_single_user(_: &ValidationOptions) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let c = Constellation::qpsk();
    for clusters in [2, 4, 8] {
        let inst = instance(&mut rng, 64, 1, clusters, 0.3, &c);
        let (fd, _) = fd_equalize(EqualizerKind::Mrc, &inst.channel, &inst.y, &c, inst.n0, &LamaParams::default())
            .map_err(|e| e.to_string())?;
        let pd = equalize_fused(EqualizerKind::Mrc, &pd_stats(&inst)?, &c, inst.n0, 1.0 / 64.0, &LamaParams::default())
            .map_err(|e| e.to_string())?;
        same_output(&fd, &pd, 1e-12)?;
    }
    Ok(())
}

fn zf_partition_invariance(_: &ValidationOptions) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let spec = MseSpec::linear(EqualizerKind::Zf, 1.0).map_err(|e| e.to_string())?;
    let (a, beta, clusters) = (10.0, 0.05, 4);
    let exact = sinr_fd_zf_closed(a, beta, clusters).map_err(|e| e.to_string())?;
    let mut tried = 0;
    while tried < 10 {
        let w = random_weights(&mut rng, clusters);
        if w.iter().any(|&x| x <= beta * 1.01) {
            continue;
        }
        tried += 1;
        let fd = sinr_fd(&spec, a, beta, &w, &FixedPointOptions::default()).map_err(|e| e.to_string())?;
        ensure(rel(fd.sinr, exact) < 1e-9, || format!("weights {w:?}: {} vs {exact}", fd.sinr))?;
    }
    Ok(())
}

fn lmmse_fd_bounds(_: &ValidationOptions) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let (a, beta) = (10.0, 0.25);
    for _ in 0..100 {
        let w = random_weights(&mut rng, 4);
        let r = sinr_fd_lmmse_closed(a, beta, &w).map_err(|e| e.to_string())?;
        ensure(r.sinr >= r.lower_bound - 1e-12, || format!("{w:?}: {} below {}", r.sinr, r.lower_bound))?;
        ensure(r.sinr <= r.upper_bound + 1e-12, || format!("{w:?}: {} above {}", r.sinr, r.upper_bound))?;
    }
    let uniform = sinr_fd_lmmse_closed(a, beta, &[0.25; 4]).map_err(|e| e.to_string())?;
    ensure((uniform.sinr - uniform.lower_bound).abs() < 1e-12, || "uniform allocation misses the bound".into())?;
    let pooled = sinr_fd_lmmse_closed(a, beta, &[1.0, 0.0, 0.0, 0.0]).map_err(|e| e.to_string())?;
    let pd = sinr_pd_closed_form(EqualizerKind::Lmmse, a, beta).map_err(|e| e.to_string())?;
    ensure((pooled.sinr - pd).abs() < 1e-12, || format!("degenerate allocation {} vs {pd}", pooled.sinr))
}

fn fd_below_pd(_: &ValidationOptions) -> Result<(), String> {
    let c = Constellation::qpsk();
    let allocations: [&[f64]; 3] = [&[0.5, 0.5], &[0.7, 0.3], &[0.25; 4]];
    for kind in EqualizerKind::ALL {
        let spec = MseSpec::new(kind, &c).map_err(|e| e.to_string())?;
        for db in [0.0, 10.0] {
            for beta in [0.05, 0.1, 0.2] {
                let pd = asymptotic_sinr(&spec, Architecture::Partial, from_db(db), beta, &[1.0], SinrModel::FixedPoint)
                    .map_err(|e| e.to_string())?;
                for w in allocations {
                    if kind == EqualizerKind::Zf && w.iter().any(|&x| x <= beta) {
                        continue;
                    }
                    let fd = asymptotic_sinr(&spec, Architecture::Full, from_db(db), beta, w, SinrModel::FixedPoint)
                        .map_err(|e| e.to_string())?;
                    ensure(fd <= pd * (1.0 + 1e-9), || format!("{kind} {db} dB beta {beta} {w:?}: FD {fd} > PD {pd}"))?;
                    if kind == EqualizerKind::Mrc {
                        ensure(rel(fd, pd) < 1e-12, || format!("MRC FD {fd} differs from PD {pd}"))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn lmmse_dominance(_: &ValidationOptions) -> Result<(), String> {
    for db in SNR_GRID_DB {
        let a = from_db(db);
        for beta in BETA_GRID {
            let l = sinr_pd_closed_form(EqualizerKind::Lmmse, a, beta).map_err(|e| e.to_string())?;
            let m = sinr_pd_closed_form(EqualizerKind::Mrc, a, beta).map_err(|e| e.to_string())?;
            let z = sinr_pd_closed_form(EqualizerKind::Zf, a, beta).map_err(|e| e.to_string())?;
            ensure(l >= m.max(z) * (1.0 - 1e-12), || format!("PD {db} dB beta {beta}: {l} < max({m}, {z})"))?;
            let w = [0.5, 0.5];
            let lf = sinr_fd_lmmse_closed(a, beta, &w).map_err(|e| e.to_string())?.sinr;
            let mf = sinr_fd(&MseSpec::linear(EqualizerKind::Mrc, 1.0).unwrap(), a, beta, &w, &Default::default())
                .map_err(|e| e.to_string())?
                .sinr;
            let zf = if beta < 0.5 { sinr_fd_zf_closed(a, beta, 2).map_err(|e| e.to_string())? } else { 0.0 };
            ensure(lf >= mf.max(zf) * (1.0 - 1e-12), || format!("FD {db} dB beta {beta}: {lf} < max({mf}, {zf})"))?;
        }
    }
    Ok(())
}

fn state_evolution_limit(_: &ValidationOptions) -> Result<(), String> {
    for c in [Constellation::qpsk(), Constellation::qam16()] {
        let spec = MseSpec::lama(&c).map_err(|e| e.to_string())?;
        for beta in [0.125, 0.25] {
            for db in [5.0, 10.0] {
                let n0 = 1.0 / from_db(db);
                let fp = solve_fixed_point(&spec, n0, beta, 1.0, &Default::default()).map_err(|e| e.to_string())?;
                let se = se_trajectory(&spec, n0, beta, 1.0, 200).map_err(|e| e.to_string())?;
                ensure((se.terminal() - fp.sigma2).abs() < 1e-9, || {
                    format!("{:?} beta {beta} {db} dB: {} vs {}", c.kind(), se.terminal(), fp.sigma2)
                })?;
            }
        }
    }
    Ok(())
}

fn lama_mse_quadrature(_: &ValidationOptions) -> Result<(), String> {
    let c = Constellation::qam16();
    let spec = MseSpec::lama(&c).map_err(|e| e.to_string())?;
    let rule = ComplexGaussRule::new(96).map_err(|e| e.to_string())?;
    for sigma2 in [0.3, 1.0] {
        let sigma = f64::sqrt(sigma2);
        let symbols = c.symbols();
        let direct = symbols
            .iter()
            .map(|&s| {
                rule.expect(|z| {
                    let p = crate::equalize::posterior_stats(s + z * sigma, sigma2, &c).expect("finite input");
                    (p.mean - s).norm_sqr()
                })
            })
            .sum::<f64>()
            / symbols.len() as f64;
        let got = psi(&spec, sigma2).map_err(|e| e.to_string())?;
        ensure(rel(got, direct) < 1e-4, || format!("sigma2 {sigma2}: {got} vs {direct}"))?;
    }
    Ok(())
}

fn information_limits(_: &ValidationOptions) -> Result<(), String> {
    for c in [Constellation::qpsk(), Constellation::qam16(), Constellation::qam64()] {
        let zero = awgn_mutual_information(&c, 0.0).map_err(|e| e.to_string())?;
        let high = awgn_mutual_information(&c, 1e6).map_err(|e| e.to_string())?;
        ensure(zero == 0.0 && (high - c.bits()).abs() < 1e-6, || format!("{:?}: {zero}, {high}", c.kind()))?;
    }
    Ok(())
}

fn ser_limits(_: &ValidationOptions) -> Result<(), String> {
    for c in [Constellation::qpsk(), Constellation::qam16(), Constellation::qam64()] {
        let m = c.len() as f64;
        let guess = ser_closed_form(&c, 0.0).map_err(|e| e.to_string())?;
        ensure((guess - (m - 1.0) / m).abs() < 1e-12, || format!("{:?}: SER at zero SINR {guess}", c.kind()))?;
        let mut prev = guess;
        for k in 1..50 {
            let s = ser_closed_form(&c, from_db(-5.0 + 0.6 * k as f64)).map_err(|e| e.to_string())?;
            ensure(s < prev, || format!("{:?}: SER not decreasing at step {k}", c.kind()))?;
            prev = s;
        }
    }
    Ok(())
}

fn volume_linearity(_: &ValidationOptions) -> Result<(), String> {
    let one = message_volume(16, 1200, 14, 1, 8);
    for c in [2u64, 4, 8] {
        let v = message_volume(16, 1200, 14, c, 8);
        ensure(
            v.pd_bytes == c * one.pd_bytes && v.fd_bytes == c * one.fd_bytes && v.cs_bytes_per_iteration == c * one.cs_bytes_per_iteration,
            || format!("C = {c} is not linear"),
        )?;
    }
    ensure(one.pd_bytes == (16 * 16 * 1200 + 16 * 1200 * 14) * 8, || "C = 1 PD volume".into())
}
