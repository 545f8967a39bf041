use num_complex::Complex64;

use crate::model::Constellation;
use crate::{Error, Result};

const MAX_ALPHABET: usize = 64;

/// Posterior mean `F` and variance `G` of a uniform-prior symbol observed
/// through `z = s + CN(0, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorStats {
    pub mean: Complex64,
    pub variance: f64,
}

pub fn posterior_stats(z: Complex64, tau: f64, constellation: &Constellation) -> Result<PosteriorStats> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("posterior variance tau = {tau} must be > 0")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite observation {z}")));
    }
    Ok(posterior_unchecked(z, tau, constellation.symbols()))
}

/// Log-domain evaluation; callers guarantee `tau > 0` and a finite `z`.
#[inline]
pub(crate) fn posterior_unchecked(z: Complex64, tau: f64, symbols: &[Complex64]) -> PosteriorStats {
    debug_assert!(symbols.len() <= MAX_ALPHABET);
    let mut w = [0.0f64; MAX_ALPHABET];
    let w = &mut w[..symbols.len()];
    let mut best = f64::INFINITY;
    for (wk, a) in w.iter_mut().zip(symbols) {
        *wk = (z - a).norm_sqr();
        best = best.min(*wk);
    }
    let mut total = 0.0;
    let mut mean = Complex64::new(0.0, 0.0);
    for (wk, a) in w.iter_mut().zip(symbols) {
        *wk = (-(*wk - best) / tau).exp();
        total += *wk;
        mean += a * *wk;
    }
    mean /= total;
    let variance = w.iter().zip(symbols).map(|(wk, a)| wk * (a - mean).norm_sqr()).sum::<f64>() / total;
    PosteriorStats { mean, variance }
}
