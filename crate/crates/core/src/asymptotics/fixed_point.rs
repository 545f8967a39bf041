use super::mse::{psi, MseSpec};
use crate::{EqualizerKind, Error, Result};

/// ZF needs `beta / w` below one by at least this margin.
const ZF_MARGIN: f64 = 1e-9;
/// Relative gap between the fixed points reached from above and from below
/// beyond which both are reported.
const MULTIPLICITY_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    /// Stop when the relative change of `sigma^2` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Also iterate from `N0 / w` upward (LAMA only) to detect several
    /// fixed points.
    pub check_multiplicity: bool,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 100_000, check_multiplicity: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult {
    /// Largest solution of `w sigma^2 = N0 + beta Psi(sigma^2)`.
    pub sigma2: f64,
    pub sinr: f64,
    pub iterations: usize,
    /// Smallest solution, when it differs from the largest.
    pub lower_sigma2: Option<f64>,
}

impl FixedPointResult {
    pub fn has_multiple(&self) -> bool {
        self.lower_sigma2.is_some()
    }
}

fn check_inputs(spec: &MseSpec, n0: f64, beta: f64, w: f64) -> Result<()> {
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise variance {n0} must be positive")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("system ratio {beta} must be non-negative")));
    }
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::InvalidParameter(format!("antenna fraction {w} outside (0, 1]")));
    }
    if spec.kind() == EqualizerKind::Zf && beta / w >= 1.0 - ZF_MARGIN {
        return Err(Error::InvalidRegime(format!("ZF needs beta/w < 1, got beta = {beta}, w = {w}")));
    }
    Ok(())
}

fn iterate(spec: &MseSpec, n0: f64, beta: f64, w: f64, start: f64, opts: &FixedPointOptions) -> Result<(f64, usize)> {
    let mut s = start;
    for k in 1..=opts.max_iter {
        let next = (n0 + beta * psi(spec, s)?) / w;
        if !next.is_finite() {
            return Err(Error::NonFinite { iteration: k });
        }
        if (next - s).abs() <= opts.tol * next {
            return Ok((next, k));
        }
        s = next;
    }
    Err(Error::NonConvergence { iterations: opts.max_iter, sigma2: s })
}

/// Solves `w sigma^2 = N0 + beta Psi(sigma^2)` by iterating from
/// `(N0 + beta Es) / w` downward, which reaches the largest solution.
pub fn solve_fixed_point(spec: &MseSpec, n0: f64, beta: f64, w: f64, opts: &FixedPointOptions) -> Result<FixedPointResult> {
    check_inputs(spec, n0, beta, w)?;
    let (sigma2, iterations) = iterate(spec, n0, beta, w, (n0 + beta * spec.es()) / w, opts)?;
    let mut lower_sigma2 = None;
    if opts.check_multiplicity && spec.kind() == EqualizerKind::Lama && beta > 0.0 {
        let (low, _) = iterate(spec, n0, beta, w, n0 / w, opts)?;
        if (sigma2 - low).abs() > MULTIPLICITY_GAP * sigma2 {
            lower_sigma2 = Some(low);
        }
    }
    Ok(FixedPointResult { sigma2, sinr: spec.es() / sigma2, iterations, lower_sigma2 })
}

/// Per-cluster and fused asymptotic SINR of the fully decentralized
/// architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSinr {
    pub cluster_sinr: Vec<f64>,
    /// `f64::INFINITY` for empty clusters.
    pub cluster_sigma2: Vec<f64>,
    pub sinr: f64,
    pub sigma2: f64,
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidPartition("no clusters".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidPartition(format!("cluster fraction {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPartition(format!("cluster fractions sum to {total}")));
    }
    Ok(())
}

/// Combines per-cluster variances into the fused result.
pub(crate) fn fuse_cluster_variances(es: f64, cluster_sigma2: Vec<f64>) -> FdSinr {
    let cluster_sinr: Vec<f64> = cluster_sigma2.iter().map(|s| es / s).collect();
    let sinr = cluster_sinr.iter().sum::<f64>();
    let sigma2 = cluster_sigma2.iter().map(|s| s.recip()).sum::<f64>().recip();
    FdSinr { cluster_sinr, cluster_sigma2, sinr, sigma2 }
}

/// Solves the per-cluster fixed points for fractions `weights` and fuses them.
///
/// The fused variance is checked against `N0 + beta sum_c nu_c Psi(sigma_c^2)`.
pub fn sinr_fd(spec: &MseSpec, es_over_n0: f64, beta: f64, weights: &[f64], opts: &FixedPointOptions) -> Result<FdSinr> {
    check_weights(weights)?;
    let n0 = spec.es() / es_over_n0;
    let cluster_sigma2 = weights
        .iter()
        .map(|&w| if w == 0.0 { Ok(f64::INFINITY) } else { solve_fixed_point(spec, n0, beta, w, opts).map(|r| r.sigma2) })
        .collect::<Result<Vec<_>>>()?;
    let fd = fuse_cluster_variances(spec.es(), cluster_sigma2);

    let mut mixed = 0.0;
    for &s in fd.cluster_sigma2.iter().filter(|s| s.is_finite()) {
        mixed += fd.sigma2 / s * psi(spec, s)?;
    }
    let predicted = n0 + beta * mixed;
    if (predicted - fd.sigma2).abs() > 1e-9 * fd.sigma2 {
        return Err(Error::Inconsistent(format!(
            "fused variance {} differs from N0 + beta sum nu Psi = {predicted}",
            fd.sigma2
        )));
    }
    Ok(fd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Constellation;

    fn lin(kind: EqualizerKind) -> MseSpec {
        MseSpec::linear(kind, 1.0).unwrap()
    }

    #[test]
    fn lmmse_point() {
        let r = solve_fixed_point(&lin(EqualizerKind::Lmmse), 0.1, 0.25, 1.0, &Default::default()).unwrap();
        assert!((r.sigma2 - 0.128458928680426).abs() < 1e-12);
        assert!((r.sinr - 7.784589286804264).abs() < 1e-9);
        assert!((r.sinr * r.sigma2 - 1.0).abs() < 1e-15);
        let residual = r.sigma2 - 0.1 - 0.25 * r.sigma2 / (1.0 + r.sigma2);
        assert!(residual.abs() < 1e-11 * r.sigma2);
    }

    #[test]
    fn mrc_single_step_and_zf_value() {
        let r = solve_fixed_point(&lin(EqualizerKind::Mrc), 0.3, 0.7, 0.5, &Default::default()).unwrap();
        assert_eq!(r.iterations, 1);
        assert!((r.sigma2 - (0.3 + 0.7) / 0.5).abs() < 1e-15);
        let r = solve_fixed_point(&lin(EqualizerKind::Zf), 0.1, 0.25, 1.0, &Default::default()).unwrap();
        assert!((r.sigma2 - 0.1 / 0.75).abs() < 1e-12);
    }

    #[test]
    fn zf_regime() {
        let zf = lin(EqualizerKind::Zf);
        assert!(matches!(solve_fixed_point(&zf, 0.1, 0.5, 0.5, &Default::default()), Err(Error::InvalidRegime(_))));
        assert!(matches!(solve_fixed_point(&zf, 0.1, 1.2, 1.0, &Default::default()), Err(Error::InvalidRegime(_))));
        assert!(solve_fixed_point(&zf, 0.1, 0.49, 0.5, &Default::default()).is_ok());
        assert!(solve_fixed_point(&zf, 0.0, 0.1, 1.0, &Default::default()).is_err());
    }

    #[test]
    fn fd_zf_and_lmmse_examples() {
        let fd = sinr_fd(&lin(EqualizerKind::Zf), 10.0, 0.25, &[0.5, 0.5], &Default::default()).unwrap();
        assert!((fd.sinr - 5.0).abs() < 1e-9);
        let fd = sinr_fd(&lin(EqualizerKind::Lmmse), 10.0, 0.25, &[0.5, 0.5], &Default::default()).unwrap();
        assert!((fd.sinr - 6.216990566028302).abs() < 1e-9);
        assert!((fd.sigma2 - 1.0 / fd.sinr).abs() < 1e-12);
    }

    #[test]
    fn fd_empty_cluster_and_bad_weights() {
        let spec = lin(EqualizerKind::Lmmse);
        let a = sinr_fd(&spec, 10.0, 0.25, &[1.0, 0.0], &Default::default()).unwrap();
        let b = sinr_fd(&spec, 10.0, 0.25, &[1.0], &Default::default()).unwrap();
        assert!((a.sinr - b.sinr).abs() < 1e-12);
        assert_eq!(a.cluster_sinr[1], 0.0);
        assert!(sinr_fd(&spec, 10.0, 0.25, &[0.5, 0.6], &Default::default()).is_err());
        assert!(sinr_fd(&spec, 10.0, 0.25, &[1.5, -0.5], &Default::default()).is_err());
        assert!(sinr_fd(&spec, 10.0, 0.25, &[], &Default::default()).is_err());
    }

    #[test]
    fn lama_beats_lmmse() {
        let c = Constellation::qpsk();
        let lama = MseSpec::lama(&c).unwrap();
        let mmse = lin(EqualizerKind::Lmmse);
        for (n0, beta) in [(0.1, 0.25), (0.3, 0.5), (0.05, 1.0)] {
            let a = solve_fixed_point(&lama, n0, beta, 1.0, &Default::default()).unwrap();
            let b = solve_fixed_point(&mmse, n0, beta, 1.0, &Default::default()).unwrap();
            assert!(a.sinr >= b.sinr - 1e-9);
        }
    }

    #[test]
    fn lama_multiple_fixed_points_flagged() {
        // heavily loaded 16-QAM near the transition has a low-noise branch
        let spec = MseSpec::lama(&Constellation::qam16()).unwrap();
        let mut found = false;
        for beta in [1.0, 1.2, 1.5, 2.0] {
            for db in [14.0, 16.0, 18.0, 20.0] {
                let n0 = crate::from_db(-db);
                let r = solve_fixed_point(&spec, n0, beta, 1.0, &Default::default()).unwrap();
                if let Some(low) = r.lower_sigma2 {
                    assert!(low < r.sigma2);
                    found = true;
                }
            }
        }
        assert!(found);
    }
}
