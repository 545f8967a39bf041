use super::fixed_point::{check_weights, fuse_cluster_variances, FdSinr};
use super::mse::{psi, MseSpec};
use crate::{Error, Result};

/// Effective noise variances `sigma_1^2, ..., sigma_T^2` of an iterative
/// equalizer; entry `t - 1` describes the output after `t` iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct SeTrajectory {
    pub sigma2: Vec<f64>,
}

impl SeTrajectory {
    pub fn terminal(&self) -> f64 {
        *self.sigma2.last().expect("trajectory is never empty")
    }
}

/// Runs `sigma_t^2 = (N0 + beta Psi(sigma_{t-1}^2)) / w` from
/// `sigma_1^2 = (N0 + beta Es) / w`.
pub fn se_trajectory(spec: &MseSpec, n0: f64, beta: f64, w: f64, iterations: usize) -> Result<SeTrajectory> {
    if iterations == 0 {
        return Err(Error::InvalidParameter("state evolution needs at least one iteration".into()));
    }
    if !(n0 > 0.0 && n0.is_finite()) || !(beta >= 0.0 && beta.is_finite()) || !(w > 0.0 && w <= 1.0) {
        return Err(Error::InvalidParameter(format!("state evolution inputs N0 = {n0}, beta = {beta}, w = {w}")));
    }
    let mut sigma2 = Vec::with_capacity(iterations);
    sigma2.push((n0 + beta * spec.es()) / w);
    for _ in 1..iterations {
        let prev = *sigma2.last().unwrap();
        sigma2.push((n0 + beta * psi(spec, prev)?) / w);
    }
    Ok(SeTrajectory { sigma2 })
}

/// Fused SINR of per-cluster iterative equalizers stopped after `iterations`.
pub fn sinr_fd_se(spec: &MseSpec, es_over_n0: f64, beta: f64, weights: &[f64], iterations: usize) -> Result<FdSinr> {
    check_weights(weights)?;
    let n0 = spec.es() / es_over_n0;
    let cluster_sigma2 = weights
        .iter()
        .map(|&w| if w == 0.0 { Ok(f64::INFINITY) } else { se_trajectory(spec, n0, beta, w, iterations).map(|t| t.terminal()) })
        .collect::<Result<Vec<_>>>()?;
    Ok(fuse_cluster_variances(spec.es(), cluster_sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::solve_fixed_point;
    use crate::model::Constellation;

    #[test]
    fn initialization_and_trivial_cases() {
        let spec = MseSpec::lama(&Constellation::qpsk()).unwrap();
        assert_eq!(se_trajectory(&spec, 0.1, 0.25, 1.0, 1).unwrap().sigma2, vec![0.1 + 0.25]);
        let t = se_trajectory(&spec, 0.1, 0.0, 1.0, 5).unwrap();
        assert!(t.sigma2.iter().all(|&s| s == 0.1));
        assert!(se_trajectory(&spec, 0.1, 0.25, 1.0, 0).is_err());
    }

    #[test]
    fn converges_to_fixed_point() {
        let spec = MseSpec::lama(&Constellation::qpsk()).unwrap();
        let t = se_trajectory(&spec, 0.1, 0.25, 1.0, 50).unwrap();
        assert!(t.sigma2.windows(2).all(|p| p[1] <= p[0] + 1e-15));
        let fp = solve_fixed_point(&spec, 0.1, 0.25, 1.0, &Default::default()).unwrap();
        assert!((t.terminal() - fp.sigma2).abs() < 1e-9);
    }

    #[test]
    fn fd_single_cluster() {
        let spec = MseSpec::lama(&Constellation::qam16()).unwrap();
        let fd = sinr_fd_se(&spec, 10.0, 0.25, &[1.0], 3).unwrap();
        let t = se_trajectory(&spec, 0.1, 0.25, 1.0, 3).unwrap();
        assert!((fd.sigma2 - t.terminal()).abs() < 1e-15);
    }
}
