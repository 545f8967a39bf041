//! Reference equalizers that operate directly on the full `(y, H)` pair.
//!
//! These take a different numerical route from the fused-statistics
//! equalizers (QR factorizations of `H` instead of Cholesky on the Gram
//! matrix, and the residual-based LAMA recursion instead of the Gram-domain
//! one), so they double as a cross-check of the partially decentralized
//! path.

use num_complex::Complex64;

use super::{posterior_unchecked, EqualizerOutput, LamaParams, LamaRun, LamaState};
use crate::model::Constellation;
use crate::{CMatrix, CVector, EqualizerKind, Error, Result};

const R_DIAG_FLOOR: f64 = 1e-10;

fn check_dims(h: &CMatrix, y: &CVector) -> Result<()> {
    if h.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "channel rows vs. receive length",
            expected: h.nrows(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Least squares through a thin QR of `a` (rows >= cols). Returns the
/// solution and `R^{-1}`.
fn qr_solve(a: CMatrix, b: &CVector) -> Result<(CVector, CMatrix)> {
    let n = a.ncols();
    if a.nrows() < n {
        return Err(Error::SingularGram);
    }
    let qr = a.qr();
    let r = qr.r();
    let q = qr.q();
    let scale = (0..n).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if (0..n).any(|i| !(r[(i, i)].norm() > R_DIAG_FLOOR * scale)) {
        return Err(Error::SingularGram);
    }
    let qhb = q.ad_mul(b);
    let x = r.solve_upper_triangular(&qhb).ok_or(Error::SingularGram)?;
    let r_inv = r.solve_upper_triangular(&CMatrix::identity(n, n)).ok_or(Error::SingularGram)?;
    Ok((x, r_inv))
}

fn row_norms_sqr(m: &CMatrix) -> Vec<f64> {
    m.row_iter().map(|r| r.iter().map(|x| x.norm_sqr()).sum()).collect()
}

/// MRC, ZF or L-MMSE computed from `(y, H)`.
pub fn centralized_linear(kind: EqualizerKind, h: &CMatrix, y: &CVector, n0: f64, es: f64) -> Result<EqualizerOutput> {
    check_dims(h, y)?;
    let users = h.ncols();
    match kind {
        EqualizerKind::Mrc => {
            let norms: Vec<f64> = h.column_iter().map(|c| c.norm_squared()).collect();
            if norms.iter().any(|n| !(*n > 0.0)) {
                return Err(Error::SingularGram);
            }
            let z = CVector::from_fn(users, |u, _| h.column(u).dotc(y) / norms[u]);
            let sigma2 = (0..users)
                .map(|u| {
                    let interference: f64 = (0..users)
                        .filter(|&k| k != u)
                        .map(|k| h.column(u).dotc(&h.column(k)).norm_sqr())
                        .sum();
                    n0 / norms[u] + es * interference / (norms[u] * norms[u])
                })
                .collect();
            EqualizerOutput::new(z, sigma2, kind)
        }
        EqualizerKind::Zf => {
            let (z, r_inv) = qr_solve(h.clone(), y)?;
            let sigma2 = row_norms_sqr(&r_inv).into_iter().map(|d| d * n0).collect();
            EqualizerOutput::new(z, sigma2, kind)
        }
        EqualizerKind::Lmmse => {
            let rho = n0 / es;
            let b = h.nrows();
            let mut a = CMatrix::zeros(b + users, users);
            a.rows_mut(0, b).copy_from(h);
            for u in 0..users {
                a[(b + u, u)] = Complex64::new(rho.sqrt(), 0.0);
            }
            let mut rhs = CVector::zeros(b + users);
            rhs.rows_mut(0, b).copy_from(y);
            let (z, r_inv) = qr_solve(a, &rhs)?;
            // W = (G + rho I)^{-1} = R^{-1} R^{-H}
            let w = &r_inv * r_inv.adjoint();
            let noise = row_norms_sqr(&(&w * h.adjoint()));
            let mut resid = &w * h.ad_mul(h);
            for u in 0..users {
                resid[(u, u)] -= Complex64::new(1.0, 0.0);
            }
            let interference = row_norms_sqr(&resid);
            let sigma2 = noise.iter().zip(&interference).map(|(n, i)| n * n0 + i * es).collect();
            let gain = (0..users).map(|u| resid[(u, u)].re + 1.0).collect();
            EqualizerOutput::new(z, sigma2, kind)?.with_gain(gain)
        }
        EqualizerKind::Lama => Err(Error::InvalidParameter(
            "LAMA is not a linear equalizer; use centralized_lama".into(),
        )),
    }
}

/// The residual-domain LAMA recursion on `(y, H)`:
///
/// ```text
/// z^t     = s^t + H^H r^t
/// s^{t+1} = F(z^t, N0 (1 + tau^t))
/// tau^{t+1} = beta / N0 * <G(z^t, N0 (1 + tau^t))>
/// r^{t+1} = y - H s^{t+1} + tau^{t+1} / (1 + tau^t) r^t
/// ```
///
/// Traces report `phi^t = N0 tau^t / beta` and `v^t = H^H r^t - H^H (y - H s^t)`
/// so they line up with the Gram-domain iterates. Requires `N0 > 0`.
pub fn centralized_lama(
    h: &CMatrix,
    y: &CVector,
    constellation: &Constellation,
    n0: f64,
    params: &LamaParams,
) -> Result<LamaRun> {
    check_dims(h, y)?;
    params.validate()?;
    if !(n0 > 0.0) {
        return Err(Error::InvalidParameter("residual-domain LAMA needs N0 > 0".into()));
    }
    let users = h.ncols();
    let beta = users as f64 / h.nrows() as f64;
    let symbols = constellation.symbols();
    let theta = params.damping;

    let mut s = CVector::from_element(users, constellation.mean());
    let mut tau = beta * constellation.variance() / n0;
    let mut r = y - h * &s;
    let mut trace = Vec::with_capacity(params.max_iterations);

    for t in 1..=params.max_iterations {
        let hr = h.ad_mul(&r);
        let z = &s + &hr;
        let plain = h.ad_mul(&(y - h * &s));
        if z.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return Err(Error::NonFinite { iteration: t });
        }
        trace.push(LamaState { t, s: s.clone(), v: hr - plain, phi: n0 * tau / beta, z: z.clone() });
        if t == params.max_iterations {
            break;
        }
        let var = n0 * (1.0 + tau);
        let mut s_new = CVector::zeros(users);
        let mut g_sum = 0.0;
        for (k, zk) in z.iter().enumerate() {
            let p = posterior_unchecked(*zk, var, symbols);
            s_new[k] = p.mean;
            g_sum += p.variance;
        }
        let tau_new = beta / n0 * g_sum / users as f64;
        s = if theta < 1.0 {
            s_new * Complex64::new(theta, 0.0) + &s * Complex64::new(1.0 - theta, 0.0)
        } else {
            s_new
        };
        r = y - h * &s + &r * Complex64::new(tau_new / (1.0 + tau), 0.0);
        tau = tau_new;
    }

    let last = trace.last().expect("at least one iteration");
    let sigma2 = n0 + beta * last.phi;
    let output = EqualizerOutput::new(last.z.clone(), vec![sigma2; users], EqualizerKind::Lama)?;
    Ok(LamaRun { output, trace })
}

/// Dispatches to [`centralized_linear`] or [`centralized_lama`].
pub fn centralized_equalize(
    kind: EqualizerKind,
    h: &CMatrix,
    y: &CVector,
    constellation: &Constellation,
    n0: f64,
    params: &LamaParams,
) -> Result<EqualizerOutput> {
    match kind {
        EqualizerKind::Lama => Ok(centralized_lama(h, y, constellation, n0, params)?.output),
        linear => centralized_linear(linear, h, y, n0, constellation.es()),
    }
}
