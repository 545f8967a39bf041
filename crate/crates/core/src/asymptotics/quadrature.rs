use num_complex::Complex64;
use std::f64::consts::PI;

use crate::{Error, Result};

/// Gauss–Hermite order used per real dimension unless stated otherwise.
pub const DEFAULT_ORDER: usize = 32;

/// Gauss–Hermite rule for the weight `exp(-x^2)` on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes by Newton iteration on the orthonormal Hermite recurrence.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > 150 {
            return Err(Error::InvalidParameter(format!("quadrature order {order} outside 1..=150")));
        }
        let n = order;
        let nf = n as f64;
        let pim4 = PI.powf(-0.25);
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NonConvergence { iterations: 100, sigma2: z });
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        // ascending order
        x.reverse();
        w.reverse();
        Ok(Self { nodes: x, weights: w })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Tensor rule for `E f(Z)` with `Z ~ CN(0, 1)`; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGaussRule {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl ComplexGaussRule {
    pub fn new(order: usize) -> Result<Self> {
        let gh = GaussHermite::new(order)?;
        let mut points = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for (xr, wr) in gh.nodes.iter().zip(&gh.weights) {
            for (xi, wi) in gh.nodes.iter().zip(&gh.weights) {
                points.push(Complex64::new(*xr, *xi));
                weights.push(wr * wi / PI);
            }
        }
        Ok(Self { points, weights })
    }

    pub fn order(&self) -> usize {
        (self.points.len() as f64).sqrt().round() as usize
    }

    pub fn expect(&self, mut f: impl FnMut(Complex64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_moments() {
        let sp = PI.sqrt();
        for n in [1, 2, 5, 20, 32, 64, 100] {
            let gh = GaussHermite::new(n).unwrap();
            let m = |k: i32| gh.nodes.iter().zip(&gh.weights).map(|(x, w)| w * x.powi(k)).sum::<f64>();
            assert!((m(0) - sp).abs() < 1e-12, "n={n}");
            assert!(m(1).abs() < 1e-12);
            if n >= 2 {
                assert!((m(2) - sp / 2.0).abs() < 1e-12);
            }
            if n >= 3 {
                assert!((m(4) - 3.0 * sp / 4.0).abs() < 1e-12);
            }
            assert!(gh.nodes.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn two_point_rule() {
        let gh = GaussHermite::new(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((gh.nodes[1] - r).abs() < 1e-15);
        assert!((gh.weights[0] - PI.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn complex_gaussian_moments() {
        let rule = ComplexGaussRule::new(DEFAULT_ORDER).unwrap();
        assert!((rule.expect(|_| 1.0) - 1.0).abs() < 1e-13);
        assert!((rule.expect(|z| z.norm_sqr()) - 1.0).abs() < 1e-13);
        assert!((rule.expect(|z| z.norm_sqr().powi(2)) - 2.0).abs() < 1e-12);
        assert!(rule.expect(|z| z.re * z.im).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(GaussHermite::new(0).is_err());
    }
}
