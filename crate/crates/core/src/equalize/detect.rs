use crate::model::Constellation;
use crate::CVector;

/// Nearest-symbol decision per user; returns symbol indices into the
/// constellation (lowest index wins ties).
pub fn hard_detect(z: &CVector, constellation: &Constellation) -> Vec<usize> {
    z.iter().map(|&zu| constellation.nearest(zu)).collect()
}

pub fn indices_to_symbols(indices: &[usize], constellation: &Constellation) -> CVector {
    CVector::from_iterator(indices.len(), indices.iter().map(|&k| constellation.symbols()[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;

    #[test]
    fn decisions() {
        let c = Constellation::qpsk();
        let exact = CVector::from_vec(c.symbols().to_vec());
        assert_eq!(hard_detect(&exact, &c), vec![0, 1, 2, 3]);
        assert_eq!(hard_detect(&CVector::zeros(1), &c), vec![0]);

        let z = Complex64::new(0.9, 1.1);
        let by_search = (0..4)
            .min_by(|&i, &j| (z - c.symbols()[i]).norm().total_cmp(&(z - c.symbols()[j]).norm()))
            .unwrap();
        let got = hard_detect(&CVector::from_element(1, z), &c)[0];
        assert_eq!(got, by_search);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c.symbols()[got] - Complex64::new(r, r)).norm() < 1e-15);
    }
}
