use nalgebra::Cholesky;
use num_complex::Complex64;

use super::{EqualizerOutput, FusedStats};
use crate::{CMatrix, EqualizerKind, Error, Result};

/// Smallest accepted `L_ii^2 / max_j G_jj` in the Cholesky factor.
const PIVOT_FLOOR: f64 = 1e-12;

/// Inverse of a Hermitian positive definite matrix via Cholesky.
pub fn hermitian_inverse(m: &CMatrix) -> Result<CMatrix> {
    let scale = (0..m.nrows()).map(|i| m[(i, i)].re).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::SingularGram);
    }
    let chol = Cholesky::new(m.clone()).ok_or(Error::SingularGram)?;
    let l = chol.l_dirty();
    if (0..m.nrows()).any(|i| !(l[(i, i)].norm_sqr() > PIVOT_FLOOR * scale)) {
        return Err(Error::SingularGram);
    }
    Ok(chol.inverse())
}

/// `diag(W G W^H N0 + (W G - I)(W G - I)^H Es)` for a linear filter `W`
/// applied to the MRC output.
pub(crate) fn filter_error_variance(w: &CMatrix, g: &CMatrix, n0: f64, es: f64) -> Result<Vec<f64>> {
    let wg = w * g;
    let noise = &wg * w.adjoint();
    let scale = (0..g.nrows()).map(|i| g[(i, i)].re.abs()).fold(1.0, f64::max);
    (0..g.nrows())
        .map(|u| {
            let residual: f64 = wg
                .row(u)
                .iter()
                .enumerate()
                .map(|(k, x)| (x - if k == u { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).norm_sqr())
                .sum();
            let v = noise[(u, u)].re * n0 + residual * es;
            if v < -1e-12 * scale * (n0 + es) {
                Err(Error::NegativeVariance { index: u, value: v })
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

/// MRC, ZF or L-MMSE on the fused Gram matrix and MRC vector.
pub fn linear_equalize(kind: EqualizerKind, fused: &FusedStats, n0: f64, es: f64) -> Result<EqualizerOutput> {
    let g = &fused.gram;
    let users = fused.users();
    if g.nrows() != users || g.ncols() != users {
        return Err(Error::DimensionMismatch {
            context: "Gram matrix size",
            expected: users,
            found: g.nrows(),
        });
    }
    if !(n0 >= 0.0) || !(es > 0.0) {
        return Err(Error::InvalidParameter(format!("need N0 >= 0 and Es > 0 (got {n0}, {es})")));
    }
    match kind {
        EqualizerKind::Mrc => {
            let diag: Vec<f64> = (0..users).map(|u| g[(u, u)].re).collect();
            if diag.iter().any(|d| !(*d > 0.0)) {
                return Err(Error::SingularGram);
            }
            let w = CMatrix::from_fn(users, users, |i, j| {
                if i == j { Complex64::new(diag[i].recip(), 0.0) } else { Complex64::new(0.0, 0.0) }
            });
            let z = fused.mrc.zip_map(&nalgebra::DVector::from_vec(diag), |y, d| y / d);
            let sigma2 = filter_error_variance(&w, g, n0, es)?;
            EqualizerOutput::new(z, sigma2, kind)
        }
        EqualizerKind::Zf => {
            let ginv = hermitian_inverse(g)?;
            let z = &ginv * &fused.mrc;
            let sigma2 = (0..users).map(|u| ginv[(u, u)].re * n0).collect::<Vec<_>>();
            if let Some((index, &value)) = sigma2.iter().enumerate().find(|(_, v)| **v < 0.0) {
                return Err(Error::NegativeVariance { index, value });
            }
            EqualizerOutput::new(z, sigma2, kind)
        }
        EqualizerKind::Lmmse => {
            let rho = n0 / es;
            let mut a = g.clone();
            for u in 0..users {
                a[(u, u)] += rho;
            }
            let w = hermitian_inverse(&a)?;
            let z = &w * &fused.mrc;
            let sigma2 = filter_error_variance(&w, g, n0, es)?;
            // diag((G + rho I)^{-1} G) = 1 - rho diag((G + rho I)^{-1})
            let gain = (0..users).map(|u| 1.0 - rho * w[(u, u)].re).collect();
            EqualizerOutput::new(z, sigma2, kind)?.with_gain(gain)
        }
        EqualizerKind::Lama => Err(Error::InvalidParameter(
            "LAMA is not a linear equalizer; use lama_equalize".into(),
        )),
    }
}
