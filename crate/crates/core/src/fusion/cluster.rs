use nalgebra::{Dyn, Matrix, Storage, U1};
use num_complex::Complex64;

use super::{fuse_estimates, optimal_fusion_weights};
use crate::equalize::{lama_equalize, linear_equalize, local_preprocess, EqualizerOutput, FusedStats, LamaParams};
use crate::model::{ChannelRealization, Constellation};
use crate::{CVector, EqualizerKind, Error, Result};

/// Local estimate of one cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutput {
    pub cluster_id: usize,
    pub kind: EqualizerKind,
    pub z: CVector,
    pub sigma2: Vec<f64>,
}

/// What a cluster knows besides its own `(y_c, H_c)`.
#[derive(Debug, Clone, Copy)]
pub struct ClusterContext<'a> {
    pub constellation: &'a Constellation,
    pub n0: f64,
    /// Antenna fraction `w_c = B_c / B`.
    pub antenna_fraction: f64,
    pub lama: LamaParams,
}

/// Runs the requested equalizer on one cluster's local system.
///
/// Linear equalizers consume the raw local statistics; the shrinkage of
/// L-MMSE is removed so every cluster reports an estimate of the form
/// `s + e_c`, as fusion assumes. LAMA assumes unit
/// average column energy, so the local system is rescaled by `1/sqrt(w_c)`
/// first: the Gram matrix and MRC vector are divided by `w_c`, the noise
/// variance becomes `N0 / w_c`, and the local ratio is `U / B_c`.
pub fn cluster_equalize<S1, S2>(
    cluster_id: usize,
    kind: EqualizerKind,
    h_c: &Matrix<Complex64, Dyn, Dyn, S1>,
    y_c: &Matrix<Complex64, Dyn, U1, S2>,
    ctx: &ClusterContext<'_>,
) -> Result<ClusterOutput>
where
    S1: Storage<Complex64, Dyn, Dyn>,
    S2: Storage<Complex64, Dyn, U1>,
{
    let (b_c, users) = h_c.shape();
    if kind == EqualizerKind::Zf && b_c < users {
        return Err(Error::SingularGram);
    }
    let w = ctx.antenna_fraction;
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::InvalidParameter(format!("antenna fraction {w} outside (0, 1]")));
    }
    let part = local_preprocess(h_c, y_c)?;
    let fused = FusedStats { gram: part.gram, mrc: part.mrc };
    let out = match kind {
        EqualizerKind::Lama => {
            let scale = Complex64::new(w.recip(), 0.0);
            let normalized = FusedStats { gram: fused.gram * scale, mrc: fused.mrc * scale };
            let beta_c = users as f64 / b_c as f64;
            lama_equalize(&normalized, ctx.constellation, ctx.n0 / w, beta_c, &ctx.lama)?.output
        }
        linear => linear_equalize(linear, &fused, ctx.n0, ctx.constellation.es())?.unbiased(ctx.constellation.es()),
    };
    Ok(ClusterOutput { cluster_id, kind, z: out.z, sigma2: out.sigma2 })
}

/// Equalizes every cluster of `channel` and fuses the local estimates.
pub fn fd_equalize(
    kind: EqualizerKind,
    channel: &ChannelRealization,
    y: &CVector,
    constellation: &Constellation,
    n0: f64,
    lama: &LamaParams,
) -> Result<(EqualizerOutput, Vec<ClusterOutput>)> {
    let ys = channel.split(y)?;
    let b = channel.bs_antennas() as f64;
    let outputs = channel
        .cluster_views()
        .iter()
        .zip(&ys)
        .enumerate()
        .map(|(c, (h_c, y_c))| {
            let ctx = ClusterContext {
                constellation,
                n0,
                antenna_fraction: h_c.nrows() as f64 / b,
                lama: *lama,
            };
            cluster_equalize(c, kind, h_c, y_c, &ctx)
        })
        .collect::<Result<Vec<_>>>()?;
    let sigma2: Vec<Vec<f64>> = outputs.iter().map(|o| o.sigma2.clone()).collect();
    let weights = optimal_fusion_weights(&sigma2)?;
    let fused = fuse_estimates(&outputs, &weights)?;
    Ok((fused, outputs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equalize::hermitian_inverse;
    use crate::model::{sample_rayleigh_channel, sample_symbols, transmit, ClusterPartition, SystemConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zf_needs_enough_antennas() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = SystemConfig::new(8, 16, 0.1, 1.0).unwrap();
        let ch = sample_rayleigh_channel(&cfg, &mut rng);
        let y = crate::model::sample_unit_noise(8, &mut rng);
        let c = Constellation::qpsk();
        let ctx = ClusterContext { constellation: &c, n0: 0.1, antenna_fraction: 0.5, lama: LamaParams::default() };
        assert_eq!(cluster_equalize(0, EqualizerKind::Zf, ch.h(), &y, &ctx), Err(Error::SingularGram));
    }

    #[test]
    fn zf_variance_matches_dense_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cfg = SystemConfig::new(32, 16, 0.1, 1.0).unwrap();
        let c = Constellation::qpsk();
        let ch = sample_rayleigh_channel(&cfg, &mut rng);
        let (_, s) = sample_symbols(&c, 16, &mut rng);
        let y = transmit(&ch, &s, 0.1, &mut rng).unwrap();
        let ctx = ClusterContext { constellation: &c, n0: 0.1, antenna_fraction: 0.125, lama: LamaParams::default() };
        let out = cluster_equalize(0, EqualizerKind::Zf, ch.h(), &y, &ctx).unwrap();
        let g = ch.h().ad_mul(ch.h());
        let inv = g.clone().try_inverse().unwrap();
        for u in 0..16 {
            assert!((out.sigma2[u] - inv[(u, u)].re * 0.1).abs() < 1e-10);
        }
        // the Cholesky route agrees with the LU route
        assert!((hermitian_inverse(&g).unwrap() - inv).camax() < 1e-10);
    }

    #[test]
    fn single_cluster_is_centralized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = SystemConfig::new(64, 8, 0.05, 1.0).unwrap();
        let c = Constellation::qam16();
        let ch = sample_rayleigh_channel(&cfg, &mut rng)
            .partitioned(&ClusterPartition::uniform(64, 1).unwrap())
            .unwrap();
        let (_, s) = sample_symbols(&c, 8, &mut rng);
        let y = transmit(&ch, &s, 0.05, &mut rng).unwrap();
        let lama = LamaParams::new(6, 1.0).unwrap();
        let fused_stats = FusedStats::from_channel(ch.h(), &y).unwrap();
        for kind in EqualizerKind::ALL {
            let (fd, _) = fd_equalize(kind, &ch, &y, &c, 0.05, &lama).unwrap();
            let pd = crate::equalize::equalize_fused(kind, &fused_stats, &c, 0.05, cfg.beta(), &lama).unwrap().unbiased(c.es());
            assert!((fd.z - &pd.z).camax() < 1e-12, "{kind}");
            for (a, b) in fd.sigma2.iter().zip(&pd.sigma2) {
                assert!((a - b).abs() < 1e-12 * b.max(1.0));
            }
        }
    }
}
