use super::separable::pam_mse;
use crate::model::Constellation;
use crate::{EqualizerKind, Error, Result};

/// MSE function `Psi(sigma^2)` of one equalizer in the decoupled model.
#[derive(Debug, Clone)]
pub struct MseSpec {
    kind: EqualizerKind,
    es: f64,
    lama: Option<(Constellation, Vec<f64>)>,
}

impl MseSpec {
    /// Spec for MRC, ZF or L-MMSE with symbol energy `es`.
    pub fn linear(kind: EqualizerKind, es: f64) -> Result<Self> {
        if !kind.is_linear() {
            return Err(Error::InvalidParameter("LAMA needs a constellation".into()));
        }
        if !(es > 0.0 && es.is_finite()) {
            return Err(Error::InvalidParameter(format!("symbol energy {es}")));
        }
        Ok(Self { kind, es, lama: None })
    }

    /// Spec for LAMA with a uniform prior on `constellation`.
    pub fn lama(constellation: &Constellation) -> Result<Self> {
        let levels = constellation.levels();
        Ok(Self { kind: EqualizerKind::Lama, es: constellation.es(), lama: Some((constellation.clone(), levels)) })
    }

    /// Any kind, taking `Es` from the constellation.
    pub fn new(kind: EqualizerKind, constellation: &Constellation) -> Result<Self> {
        match kind {
            EqualizerKind::Lama => Self::lama(constellation),
            linear => Self::linear(linear, constellation.es()),
        }
    }

    pub fn kind(&self) -> EqualizerKind {
        self.kind
    }

    pub fn es(&self) -> f64 {
        self.es
    }

    pub fn constellation(&self) -> Option<&Constellation> {
        self.lama.as_ref().map(|(c, _)| c)
    }
}

/// Evaluates `Psi(sigma^2)`.
///
/// For LAMA this is the MSE of the posterior-mean denoiser on `S + sigma Z`,
/// evaluated per real dimension (see the separable integrals).
pub fn psi(spec: &MseSpec, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidParameter(format!("decoupled variance {sigma2} must be positive")));
    }
    let es = spec.es;
    Ok(match spec.kind {
        EqualizerKind::Mrc => es,
        EqualizerKind::Zf => sigma2,
        EqualizerKind::Lmmse => es * sigma2 / (es + sigma2),
        EqualizerKind::Lama => {
            let (_, levels) = spec.lama.as_ref().expect("LAMA spec carries a constellation");
            2.0 * pam_mse(levels, 0.5 * sigma2)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::ComplexGaussRule;
    use crate::equalize::posterior_unchecked;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // direct 2-D tensor Gauss-Hermite evaluation over the complex noise
    fn gauss_hermite_mse(c: &Constellation, sigma2: f64, order: usize) -> f64 {
        let rule = ComplexGaussRule::new(order).unwrap();
        let sigma = sigma2.sqrt();
        let symbols = c.symbols();
        symbols
            .iter()
            .map(|&s| rule.expect(|z| (posterior_unchecked(s + z * sigma, sigma2, symbols).mean - s).norm_sqr()))
            .sum::<f64>()
            / symbols.len() as f64
    }

    #[test]
    fn linear_forms() {
        let mrc = MseSpec::linear(EqualizerKind::Mrc, 2.0).unwrap();
        let zf = MseSpec::linear(EqualizerKind::Zf, 2.0).unwrap();
        let mmse = MseSpec::linear(EqualizerKind::Lmmse, 2.0).unwrap();
        for s in [1e-3, 0.5, 7.0] {
            assert_eq!(psi(&mrc, s).unwrap(), 2.0);
            assert_eq!(psi(&zf, s).unwrap(), s);
            assert!((psi(&mmse, s).unwrap() - 2.0 * s / (2.0 + s)).abs() < 1e-15);
        }
        assert!(psi(&zf, 0.0).is_err());
        assert!(psi(&zf, -1.0).is_err());
        assert!(MseSpec::linear(EqualizerKind::Lama, 1.0).is_err());
    }

    #[test]
    fn lama_matches_two_dimensional_quadrature() {
        // the tensor rule converges slowly at small sigma^2, so only moderate
        // noise levels are compared at high order
        for c in [Constellation::qpsk(), Constellation::qam16(), Constellation::qam64()] {
            let spec = MseSpec::lama(&c).unwrap();
            for s2 in [0.1, 0.5, 2.0] {
                let got = psi(&spec, s2).unwrap();
                let want = gauss_hermite_mse(&c, s2, 120);
                assert!((got - want).abs() < 1e-4 * want, "{:?} {s2}: {got} vs {want}", c.kind());
            }
        }
    }

    #[test]
    fn lama_qpsk_reference_value() {
        let spec = MseSpec::lama(&Constellation::qpsk()).unwrap();
        assert!((psi(&spec, 0.1).unwrap() - 0.002411314735412258).abs() < 1e-14);
    }

    #[test]
    fn lama_limits() {
        let c = Constellation::qam16();
        let spec = MseSpec::lama(&c).unwrap();
        assert!(psi(&spec, 1e-4).unwrap() < 1e-12);
        // no information left: posterior mean is the prior mean
        assert!((psi(&spec, 1e6).unwrap() - c.es()).abs() < 1e-4);
        // never worse than L-MMSE
        let mmse = MseSpec::linear(EqualizerKind::Lmmse, c.es()).unwrap();
        for s2 in [0.01, 0.1, 1.0, 10.0] {
            assert!(psi(&spec, s2).unwrap() <= psi(&mmse, s2).unwrap() + 1e-12);
        }
    }

    #[test]
    fn lama_high_snr_is_smooth() {
        // Psi decays like a Gaussian tail; consecutive ratios stay ordered
        let spec = MseSpec::lama(&Constellation::qam16()).unwrap();
        let vals: Vec<f64> = [0.08, 0.04, 0.02, 0.01].iter().map(|&s| psi(&spec, s).unwrap()).collect();
        assert!(vals.windows(2).all(|p| p[1] < p[0]));
        assert!(vals[3] > 0.0 && vals[3] < 1e-4);
    }

    #[test]
    fn lama_qpsk_monte_carlo() {
        use rand_distr::{Distribution, StandardNormal};
        let c = Constellation::qpsk();
        let sigma2: f64 = 0.5;
        let quad = psi(&MseSpec::lama(&c).unwrap(), sigma2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 10_000_000usize;
        let sd = (sigma2 / 2.0).sqrt();
        let (mut sum, mut sum2) = (0.0, 0.0);
        for i in 0..n {
            let s = c.symbols()[i % 4];
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let y = s + crate::Complex64::new(re * sd, im * sd);
            let e = (posterior_unchecked(y, sigma2, c.symbols()).mean - s).norm_sqr();
            sum += e;
            sum2 += e * e;
        }
        let mean = sum / n as f64;
        let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - quad).abs() < 3.0 * se, "mc {mean} ± {se}, quadrature {quad}");
    }
}
