use super::separable::pam_information;
use crate::model::Constellation;
use crate::{Error, Result};

/// Mutual information in bits of uniform inputs from `c` over complex AWGN
/// at signal-to-noise ratio `sinr = Es / N0`.
pub fn awgn_mutual_information(c: &Constellation, sinr: f64) -> Result<f64> {
    if !(sinr >= 0.0) {
        return Err(Error::InvalidParameter(format!("SINR {sinr} must be non-negative")));
    }
    if sinr == 0.0 {
        return Ok(0.0);
    }
    let bits = c.bits();
    if sinr.is_infinite() {
        return Ok(bits);
    }
    let n0 = c.es() / sinr;
    Ok((2.0 * pam_information(&c.levels(), 0.5 * n0)).clamp(0.0, bits))
}

/// Smallest AWGN SINR at which the mutual information reaches `rate`, by
/// bisection on the log scale.
pub fn sinr_for_rate(c: &Constellation, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < c.bits()) {
        return Err(Error::Infeasible(format!(
            "rate {rate} bits is outside (0, {}) for {}",
            c.bits(),
            c.kind().name()
        )));
    }
    let (mut lo, mut hi) = (1e-10f64.ln(), 1e10f64.ln());
    if awgn_mutual_information(c, hi.exp())? < rate {
        return Err(Error::Infeasible(format!("rate {rate} bits needs more than 100 dB")));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if awgn_mutual_information(c, mid.exp())? < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::ComplexGaussRule;
    use crate::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn limits() {
        for c in [Constellation::qpsk(), Constellation::qam16(), Constellation::qam64()] {
            assert_eq!(awgn_mutual_information(&c, 0.0).unwrap(), 0.0);
            assert!((awgn_mutual_information(&c, 1e6).unwrap() - c.bits()).abs() < 1e-6);
            let mut prev = 0.0;
            for k in 0..40 {
                let mi = awgn_mutual_information(&c, crate::from_db(-10.0 + k as f64)).unwrap();
                assert!(mi > prev || (mi == c.bits() && prev == c.bits()));
                prev = mi;
            }
        }
        assert!(awgn_mutual_information(&Constellation::qpsk(), -1.0).is_err());
    }

    #[test]
    fn qpsk_value() {
        let mi = awgn_mutual_information(&Constellation::qpsk(), 1.0).unwrap();
        assert!((mi - 0.971888308265871).abs() < 1e-12);
        let mi = awgn_mutual_information(&Constellation::qpsk(), 10.0).unwrap();
        assert!((mi - 1.993512655980059).abs() < 1e-12);
    }

    #[test]
    fn matches_two_dimensional_quadrature() {
        // the tensor rule only reaches about 1e-7 here; it guards against gross errors
        let rule = ComplexGaussRule::new(120).unwrap();
        for c in [Constellation::qpsk(), Constellation::qam16()] {
            for sinr in [0.3, 1.0, 10.0] {
                let sigma = (c.es() / sinr).sqrt();
                let symbols = c.symbols();
                let loss: f64 = symbols
                    .iter()
                    .map(|&s| {
                        rule.expect(|z| {
                            let terms: Vec<f64> =
                                symbols.iter().map(|&a| z.norm_sqr() - (z + (s - a) / sigma).norm_sqr()).collect();
                            let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                            (top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()) / std::f64::consts::LN_2
                        })
                    })
                    .sum();
                let want = c.bits() - loss / symbols.len() as f64;
                let got = awgn_mutual_information(&c, sinr).unwrap();
                assert!((got - want).abs() < 1e-6, "{:?} {sinr}: {got} vs {want}", c.kind());
            }
        }
    }

    #[test]
    fn qpsk_monte_carlo() {
        let c = Constellation::qpsk();
        let quad = awgn_mutual_information(&c, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 10_000_000usize;
        let sd = std::f64::consts::FRAC_1_SQRT_2;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for i in 0..n {
            let s = c.symbols()[i % 4];
            let noise = Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)) * sd;
            let y = s + noise;
            let num = (-(y - s).norm_sqr()).exp();
            let den: f64 = c.symbols().iter().map(|a| (-(y - a).norm_sqr()).exp()).sum::<f64>() / 4.0;
            let x = (num / den).log2();
            sum += x;
            sum2 += x * x;
        }
        let mean = sum / n as f64;
        let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - quad).abs() < 3.0 * se, "mc {mean} ± {se}, quadrature {quad}");
    }

    #[test]
    fn inverse() {
        for (c, r) in [(Constellation::qpsk(), 1.99), (Constellation::qam16(), 3.0), (Constellation::qpsk(), 0.1)] {
            let g = sinr_for_rate(&c, r).unwrap();
            assert!((awgn_mutual_information(&c, g).unwrap() - r).abs() < 1e-9);
        }
        assert!(matches!(sinr_for_rate(&Constellation::qpsk(), 2.0), Err(Error::Infeasible(_))));
    }
}
