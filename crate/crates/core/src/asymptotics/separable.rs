//! One-dimensional integrals behind the LAMA MSE and the AWGN mutual
//! information. A square QAM alphabet with a uniform prior is the product of
//! two PAM alphabets, and circular noise splits into two independent real
//! components of half the variance, so both quantities are twice their PAM
//! counterparts.
//!
//! The integrals run over the normalized noise `t ~ N(0, 1)`. They are cut at
//! `t = 0` and at every decision boundary, where the posterior switches
//! sharply at high SNR, and each piece is integrated with the
//! double-exponential rule, which clusters nodes at the piece ends.

use std::f64::consts::{LN_2, PI};

/// Gaussian mass beyond this many standard deviations is below `1e-340`.
const SPAN: f64 = 40.0;
const PIECE_TOL: f64 = 1e-16;

fn std_normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
}

fn breakpoints(levels: &[f64], s: f64, sd: f64) -> Vec<f64> {
    let mut bp = vec![-SPAN, 0.0, SPAN];
    for pair in levels.windows(2) {
        let t = (0.5 * (pair[0] + pair[1]) - s) / sd;
        if t.abs() < SPAN {
            bp.push(t);
        }
    }
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    bp
}

fn integrate(bp: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    bp.windows(2).map(|ab| quadrature::integrate(&f, ab[0], ab[1], PIECE_TOL).integral).sum()
}

/// Posterior mean of a uniform PAM input observed in real Gaussian noise of
/// variance `v`.
pub(crate) fn pam_posterior_mean(levels: &[f64], x: f64, v: f64) -> f64 {
    let best = levels.iter().map(|l| (x - l) * (x - l)).fold(f64::INFINITY, f64::min);
    let (mut num, mut den) = (0.0, 0.0);
    for l in levels {
        let w = (-((x - l) * (x - l) - best) / (2.0 * v)).exp();
        num += l * w;
        den += w;
    }
    num / den
}

/// `E|F(S + N) - S|^2` for uniform PAM `S` and `N ~ N(0, v)`.
pub(crate) fn pam_mse(levels: &[f64], v: f64) -> f64 {
    let sd = v.sqrt();
    let total: f64 = levels
        .iter()
        .map(|&s| {
            integrate(&breakpoints(levels, s, sd), |t| {
                let e = pam_posterior_mean(levels, s + sd * t, v) - s;
                std_normal_pdf(t) * e * e
            })
        })
        .sum();
    total / levels.len() as f64
}

/// Mutual information in bits between uniform PAM `S` and `S + N`,
/// `N ~ N(0, v)`.
pub(crate) fn pam_information(levels: &[f64], v: f64) -> f64 {
    let sd = v.sqrt();
    let loss: f64 = levels
        .iter()
        .map(|&s| {
            integrate(&breakpoints(levels, s, sd), |t| {
                // log-likelihood ratios against the transmitted level
                let lr = |l: &f64| -(s - l) * (2.0 * sd * t + s - l) / (2.0 * v);
                let top = levels.iter().map(lr).fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = levels.iter().map(|l| (lr(l) - top).exp()).sum();
                std_normal_pdf(t) * (top + sum.ln())
            })
        })
        .sum();
    ((levels.len() as f64).ln() - loss / levels.len() as f64) / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpsk_information_closed_form_limits() {
        let l = [-1.0, 1.0];
        assert!(pam_information(&l, 1e-4) > 1.0 - 1e-12);
        assert!(pam_information(&l, 1e4) < 1e-3);
    }

    #[test]
    fn bpsk_mse_matches_tanh_form() {
        // F(x) = tanh(x / v) for levels +-1; compare with a dense midpoint rule
        let v: f64 = 0.3;
        let n = 400_000;
        let (a, b) = (-12.0, 12.0);
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let t = a + (k as f64 + 0.5) * h;
            let e = (1.0 + v.sqrt() * t) / v;
            acc += std_normal_pdf(t) * (e.tanh() - 1.0).powi(2) * h;
        }
        assert!((pam_mse(&[-1.0, 1.0], v) - acc).abs() < 1e-10);
    }

    #[test]
    fn posterior_mean_is_stable() {
        assert_eq!(pam_posterior_mean(&[-1.0, 1.0], 1e6, 1e-6), 1.0);
        assert!(pam_posterior_mean(&[-1.0, 1.0], 0.0, 0.1).abs() < 1e-15);
    }
}
