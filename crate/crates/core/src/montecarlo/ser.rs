use statrs::function::erf::erfc;

use crate::model::Constellation;
use crate::{Error, Result};

/// Two-sided 95% standard-normal quantile.
pub const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Symbol error rate of minimum-distance detection of square M-QAM over
/// complex AWGN at `sinr = Es / N0`.
///
/// Each real dimension is a `sqrt(M)`-PAM decision with error probability
/// `p = 2 (1 - 1/sqrt(M)) Q(sqrt(3 sinr / (M - 1)))`; a symbol is correct only
/// if both dimensions are, so `SER = 1 - (1 - p)^2`.
pub fn ser_closed_form(c: &Constellation, sinr: f64) -> Result<f64> {
    if !(sinr >= 0.0) {
        return Err(Error::InvalidParameter(format!("SINR {sinr} must be non-negative")));
    }
    let m = c.len() as f64;
    let p = 2.0 * (1.0 - m.sqrt().recip()) * q_function((3.0 * sinr / (m - 1.0)).sqrt());
    Ok(p * (2.0 - p))
}

/// Wilson score interval for `errors` successes out of `n` at normal
/// quantile `z`.
pub fn wilson_interval(errors: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = errors as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}
