use num_complex::Complex64;

use super::{posterior_unchecked, EqualizerOutput, FusedStats};
use crate::model::Constellation;
use crate::{CVector, EqualizerKind, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LamaParams {
    /// Number of iterations `T_max` (at least 1).
    pub max_iterations: usize,
    /// Mean damping `theta` in (0, 1]; 1 disables damping.
    pub damping: f64,
}

impl Default for LamaParams {
    fn default() -> Self {
        Self { max_iterations: 10, damping: 1.0 }
    }
}

impl LamaParams {
    pub fn new(max_iterations: usize, damping: f64) -> Result<Self> {
        let p = Self { max_iterations, damping };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("LAMA needs at least one iteration".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping {} outside (0, 1]",
                self.damping
            )));
        }
        Ok(())
    }
}

/// Iterate `t`: mean `s^t`, Onsager vector `v^t`, signal-variance estimate
/// `phi^t`, and the resulting observation `z^t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LamaState {
    pub t: usize,
    pub s: CVector,
    pub v: CVector,
    pub phi: f64,
    pub z: CVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LamaRun {
    pub output: EqualizerOutput,
    pub trace: Vec<LamaState>,
}

fn all_finite(v: &CVector) -> bool {
    v.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

/// LAMA on the fused MRC vector and Gram matrix.
///
/// `beta` is the ratio of users to the antennas that produced `fused`.
pub fn lama_equalize(
    fused: &FusedStats,
    constellation: &Constellation,
    n0: f64,
    beta: f64,
    params: &LamaParams,
) -> Result<LamaRun> {
    params.validate()?;
    let users = fused.users();
    let g = &fused.gram;
    if g.nrows() != users || g.ncols() != users {
        return Err(Error::DimensionMismatch { context: "Gram matrix size", expected: users, found: g.nrows() });
    }
    if !(n0 >= 0.0) || !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("need N0 >= 0 and beta >= 0 (got {n0}, {beta})")));
    }
    let symbols = constellation.symbols();
    let theta = params.damping;

    let mut s = CVector::from_element(users, constellation.mean());
    let mut v = CVector::zeros(users);
    let mut phi = constellation.variance();
    let mut trace = Vec::with_capacity(params.max_iterations);

    for t in 1..=params.max_iterations {
        // z = y_mrc + (I - G) s + v
        let mut z = &fused.mrc + &s + &v;
        z.gemv(Complex64::new(-1.0, 0.0), g, &s, Complex64::new(1.0, 0.0));
        if !all_finite(&z) || !phi.is_finite() {
            return Err(Error::NonFinite { iteration: t });
        }
        trace.push(LamaState { t, s: s.clone(), v: v.clone(), phi, z: z.clone() });
        if t == params.max_iterations {
            break;
        }

        let tau = n0 + beta * phi;
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "effective variance N0 + beta*phi = {tau} at iteration {t}"
            )));
        }
        let mut s_new = CVector::zeros(users);
        let mut var_sum = 0.0;
        for (k, zk) in z.iter().enumerate() {
            let p = posterior_unchecked(*zk, tau, symbols);
            s_new[k] = p.mean;
            var_sum += p.variance;
        }
        let phi_new = var_sum / users as f64;
        let onsager = beta * phi_new / tau;
        v = (&z - &s) * Complex64::new(onsager, 0.0);
        s = if theta < 1.0 {
            s_new * Complex64::new(theta, 0.0) + &s * Complex64::new(1.0 - theta, 0.0)
        } else {
            s_new
        };
        phi = phi_new;
    }

    let last = trace.last().expect("at least one iteration");
    let sigma2 = n0 + beta * last.phi;
    let output = EqualizerOutput::new(last.z.clone(), vec![sigma2; users], EqualizerKind::Lama)?;
    Ok(LamaRun { output, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CMatrix;

    #[test]
    fn first_iterate_is_mrc_output() {
        let c = Constellation::qam16();
        let mrc = CVector::from_fn(4, |i, _| Complex64::new(0.1 * i as f64, -0.2));
        let gram = CMatrix::from_fn(4, 4, |i, j| Complex64::new(if i == j { 1.1 } else { 0.05 }, 0.0));
        let fused = FusedStats { gram, mrc: mrc.clone() };
        let run = lama_equalize(&fused, &c, 0.1, 0.25, &LamaParams::new(1, 1.0).unwrap()).unwrap();
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.trace[0].phi, c.es());
        assert!((run.output.z.clone() - mrc).camax() < 1e-15);
        assert!((run.output.sigma2[0] - (0.1 + 0.25 * c.es())).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_noiseless_system() {
        let c = Constellation::qpsk();
        let s0 = CVector::from_vec(vec![c.symbols()[0], c.symbols()[3], c.symbols()[1]]);
        let fused = FusedStats { gram: CMatrix::identity(3, 3), mrc: s0.clone() };
        let run = lama_equalize(&fused, &c, 1e-12, 0.25, &LamaParams::new(1, 1.0).unwrap()).unwrap();
        assert_eq!(run.output.z, s0);

        let run = lama_equalize(&fused, &c, 1e-12, 0.25, &LamaParams::new(8, 1.0).unwrap()).unwrap();
        let phis: Vec<f64> = run.trace.iter().map(|st| st.phi).collect();
        assert!(phis.windows(2).all(|w| w[1] <= w[0]), "{phis:?}");
        assert!(*phis.last().unwrap() < 1e-6);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LamaParams::new(0, 1.0).is_err());
        assert!(LamaParams::new(3, 0.0).is_err());
        assert!(LamaParams::new(3, 1.5).is_err());
    }
}
