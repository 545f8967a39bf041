use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ClusterOutput;
use crate::equalize::EqualizerOutput;
use crate::{CVector, Error, Result};

/// Variances below this are raised to it before inversion.
pub const VARIANCE_FLOOR: f64 = 1e-15;

/// Per-cluster, per-user fusion weights `nu[(c, u)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionWeights {
    pub nu: DMatrix<f64>,
}

impl FusionWeights {
    pub fn clusters(&self) -> usize {
        self.nu.nrows()
    }

    pub fn users(&self) -> usize {
        self.nu.ncols()
    }
}

fn check_variances(sigma2: &[Vec<f64>]) -> Result<usize> {
    let users = sigma2.first().ok_or(Error::Empty("cluster variances"))?.len();
    for (c, row) in sigma2.iter().enumerate() {
        if row.len() != users {
            return Err(Error::DimensionMismatch { context: "cluster variance length", expected: users, found: row.len() });
        }
        if let Some((u, &v)) = row.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("variance {v} for cluster {c}, user {u}")));
        }
    }
    Ok(users)
}

/// Inverse-variance weights `nu_{c,u} = sigma_{c,u}^{-2} / sum_c' sigma_{c',u}^{-2}`.
pub fn optimal_fusion_weights(sigma2: &[Vec<f64>]) -> Result<FusionWeights> {
    let users = check_variances(sigma2)?;
    let clusters = sigma2.len();
    let mut nu = DMatrix::from_fn(clusters, users, |c, u| sigma2[c][u].max(VARIANCE_FLOOR).recip());
    for mut col in nu.column_iter_mut() {
        let total: f64 = col.sum();
        col /= total;
    }
    Ok(FusionWeights { nu })
}

/// Variance `sum_c nu_c^2 sigma_c^2` of a fused estimate built with arbitrary
/// unit-sum weights, assuming uncorrelated cluster errors.
pub fn fused_variance_with(nu: &[f64], sigma2: &[f64]) -> f64 {
    nu.iter().zip(sigma2).map(|(n, s)| n * n * s).sum()
}

/// `z_u = sum_c nu_{c,u} z_{c,u}` with variance `(sum_c 1/sigma_{c,u}^2)^{-1}`.
pub fn fuse_estimates(outputs: &[ClusterOutput], weights: &FusionWeights) -> Result<EqualizerOutput> {
    let first = outputs.first().ok_or(Error::Empty("cluster outputs"))?;
    let users = first.z.len();
    if weights.clusters() != outputs.len() {
        return Err(Error::DimensionMismatch { context: "fusion weight rows", expected: outputs.len(), found: weights.clusters() });
    }
    if weights.users() != users {
        return Err(Error::DimensionMismatch { context: "fusion weight columns", expected: users, found: weights.users() });
    }
    let mut z = CVector::zeros(users);
    let mut precision = vec![0.0; users];
    for (c, out) in outputs.iter().enumerate() {
        if out.z.len() != users || out.sigma2.len() != users {
            return Err(Error::DimensionMismatch { context: "cluster estimate length", expected: users, found: out.z.len() });
        }
        for u in 0..users {
            z[u] += out.z[u] * Complex64::new(weights.nu[(c, u)], 0.0);
            precision[u] += out.sigma2[u].max(VARIANCE_FLOOR).recip();
        }
    }
    let sigma2 = precision.into_iter().map(f64::recip).collect();
    EqualizerOutput::new(z, sigma2, first.kind)
}
