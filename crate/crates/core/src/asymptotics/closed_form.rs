use super::fixed_point::check_weights;
use crate::{EqualizerKind, Error, Result};

fn check_snr(es_over_n0: f64, beta: f64) -> Result<()> {
    if !(es_over_n0 > 0.0 && es_over_n0.is_finite()) {
        return Err(Error::InvalidParameter(format!("Es/N0 = {es_over_n0} must be positive")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("system ratio {beta} must be non-negative")));
    }
    Ok(())
}

/// Asymptotic SINR of the linear equalizers when all antennas are pooled.
pub fn sinr_pd_closed_form(kind: EqualizerKind, es_over_n0: f64, beta: f64) -> Result<f64> {
    check_snr(es_over_n0, beta)?;
    let a = es_over_n0;
    match kind {
        EqualizerKind::Mrc => Ok(a / (1.0 + beta * a)),
        EqualizerKind::Zf => {
            if beta >= 1.0 {
                return Err(Error::InvalidRegime(format!("ZF needs beta < 1, got {beta}")));
            }
            Ok(a * (1.0 - beta))
        }
        EqualizerKind::Lmmse => Ok(lmmse_cluster_sinr(a, beta, 1.0)),
        EqualizerKind::Lama => Err(Error::InvalidParameter("LAMA has no closed form".into())),
    }
}

/// L-MMSE SINR of a cluster holding the fraction `w` of the antennas:
/// the positive root of `x^2 + x (1 - a (w - beta)) - a w = 0`.
pub fn lmmse_cluster_sinr(es_over_n0: f64, beta: f64, w: f64) -> f64 {
    let b = 1.0 - es_over_n0 * (w - beta);
    let c = es_over_n0 * w;
    // numerically stable positive root
    if b >= 0.0 {
        2.0 * c / ((b * b + 4.0 * c).sqrt() + b)
    } else {
        0.5 * ((b * b + 4.0 * c).sqrt() - b)
    }
}

/// Fused ZF SINR with `clusters` clusters, independent of the allocation.
pub fn sinr_fd_zf_closed(es_over_n0: f64, beta: f64, clusters: usize) -> Result<f64> {
    check_snr(es_over_n0, beta)?;
    if clusters == 0 {
        return Err(Error::InvalidPartition("no clusters".into()));
    }
    let load = clusters as f64 * beta;
    if load >= 1.0 {
        return Err(Error::InvalidRegime(format!("ZF fusion needs C beta < 1, got {load}")));
    }
    Ok(es_over_n0 * (1.0 - load))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmmseFdBounds {
    /// Fused SINR for the given allocation.
    pub sinr: f64,
    /// Value for the uniform allocation over the same number of clusters,
    /// a lower bound over all allocations.
    pub lower_bound: f64,
    /// Value with all antennas in one cluster (the pooled SINR).
    pub upper_bound: f64,
}

/// Fused L-MMSE SINR for allocation `weights`, with its allocation bounds.
pub fn sinr_fd_lmmse_closed(es_over_n0: f64, beta: f64, weights: &[f64]) -> Result<LmmseFdBounds> {
    check_snr(es_over_n0, beta)?;
    check_weights(weights)?;
    let a = es_over_n0;
    let sinr = weights.iter().map(|&w| lmmse_cluster_sinr(a, beta, w)).sum();
    let c = weights.len() as f64;
    let b = c - a * (1.0 - c * beta);
    let lower_bound = 0.5 * ((b * b + 4.0 * a * c).sqrt() - b);
    Ok(LmmseFdBounds { sinr, lower_bound, upper_bound: lmmse_cluster_sinr(a, beta, 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corollary_values() {
        assert!((sinr_pd_closed_form(EqualizerKind::Mrc, 10.0, 0.25).unwrap() - 10.0 / 3.5).abs() < 1e-14);
        assert!((sinr_pd_closed_form(EqualizerKind::Zf, 10.0, 0.25).unwrap() - 7.5).abs() < 1e-14);
        let l = sinr_pd_closed_form(EqualizerKind::Lmmse, 10.0, 0.25).unwrap();
        assert!((l - 7.784589286804264).abs() < 1e-12);
        assert!(matches!(sinr_pd_closed_form(EqualizerKind::Zf, 10.0, 1.0), Err(Error::InvalidRegime(_))));
    }

    #[test]
    fn vanishing_load_gives_awgn() {
        for kind in EqualizerKind::LINEAR {
            for a in [0.5, 10.0, 1000.0] {
                let s = sinr_pd_closed_form(kind, a, 1e-9).unwrap();
                assert!((s / a - 1.0).abs() < 1e-6, "{kind} {a}");
            }
        }
    }

    #[test]
    fn zf_fd() {
        assert!((sinr_fd_zf_closed(10.0, 0.25, 2).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(sinr_fd_zf_closed(10.0, 0.25, 1).unwrap(), sinr_pd_closed_form(EqualizerKind::Zf, 10.0, 0.25).unwrap());
        assert!(sinr_fd_zf_closed(10.0, 0.25, 4).is_err());
    }

    #[test]
    fn lmmse_fd() {
        let r = sinr_fd_lmmse_closed(10.0, 0.25, &[0.5, 0.5]).unwrap();
        assert!((r.sinr - 6.216990566028302).abs() < 1e-12);
        assert!((r.sinr - r.lower_bound).abs() < 1e-12);
        let d = sinr_fd_lmmse_closed(10.0, 0.25, &[1.0, 0.0, 0.0]).unwrap();
        assert!((d.sinr - d.upper_bound).abs() < 1e-12);
        assert!(sinr_fd_lmmse_closed(10.0, 0.25, &[0.5, 0.4]).is_err());
    }

    #[test]
    fn stable_root_matches_textbook() {
        for (a, beta, w) in [(10.0, 0.25, 0.5), (1e-3, 2.0, 0.1), (1e4, 0.01, 1.0), (3.0, 0.9, 0.05)] {
            let b: f64 = 1.0 - a * (w - beta);
            let naive = 0.5 * ((b * b + 4.0 * a * w).sqrt() - b);
            assert!((lmmse_cluster_sinr(a, beta, w) - naive).abs() < 1e-9 * naive.max(1.0));
        }
    }
}
