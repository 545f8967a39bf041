use nalgebra::{Dyn, Matrix, Storage, U1};
use num_complex::Complex64;

use crate::{CMatrix, CVector, Error, Result};

/// One cluster's contribution `G_c = H_c^H H_c`, `y_c^MRC = H_c^H y_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialStats {
    pub gram: CMatrix,
    pub mrc: CVector,
}

/// Adder-tree output: `G = sum G_c`, `y^MRC = sum y_c^MRC`.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedStats {
    pub gram: CMatrix,
    pub mrc: CVector,
}

impl FusedStats {
    pub fn users(&self) -> usize {
        self.mrc.len()
    }

    /// Centralized preprocessing of the unpartitioned system.
    pub fn from_channel<S1, S2>(
        h: &Matrix<Complex64, Dyn, Dyn, S1>,
        y: &Matrix<Complex64, Dyn, U1, S2>,
    ) -> Result<Self>
    where
        S1: Storage<Complex64, Dyn, Dyn>,
        S2: Storage<Complex64, Dyn, U1>,
    {
        let PartialStats { gram, mrc } = local_preprocess(h, y)?;
        Ok(Self { gram, mrc })
    }
}

pub fn local_preprocess<S1, S2>(
    h_c: &Matrix<Complex64, Dyn, Dyn, S1>,
    y_c: &Matrix<Complex64, Dyn, U1, S2>,
) -> Result<PartialStats>
where
    S1: Storage<Complex64, Dyn, Dyn>,
    S2: Storage<Complex64, Dyn, U1>,
{
    if h_c.nrows() != y_c.nrows() {
        return Err(Error::DimensionMismatch {
            context: "cluster channel rows vs. receive length",
            expected: h_c.nrows(),
            found: y_c.nrows(),
        });
    }
    let gram = h_c.ad_mul(h_c);
    let mrc = h_c.ad_mul(y_c);
    Ok(PartialStats { gram, mrc })
}

pub fn fuse_partials(parts: &[PartialStats]) -> Result<FusedStats> {
    let first = parts.first().ok_or(Error::Empty("partial statistics"))?;
    let users = first.mrc.len();
    let mut gram = first.gram.clone();
    let mut mrc = first.mrc.clone();
    for p in &parts[1..] {
        if p.mrc.len() != users || p.gram.nrows() != users || p.gram.ncols() != users {
            return Err(Error::DimensionMismatch {
                context: "partial statistics user count",
                expected: users,
                found: p.mrc.len(),
            });
        }
        gram += &p.gram;
        mrc += &p.mrc;
    }
    Ok(FusedStats { gram, mrc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_rayleigh_channel, ClusterPartition, SystemConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_products(h: &CMatrix, y: &CVector) -> (CMatrix, CVector) {
        let (b, u) = h.shape();
        let mut g = CMatrix::zeros(u, u);
        let mut m = CVector::zeros(u);
        for i in 0..u {
            for j in 0..u {
                for k in 0..b {
                    g[(i, j)] += h[(k, i)].conj() * h[(k, j)];
                }
            }
            for k in 0..b {
                m[i] += h[(k, i)].conj() * y[k];
            }
        }
        (g, m)
    }

    #[test]
    fn identity_and_zero_channels() {
        let y = CVector::from_fn(3, |i, _| Complex64::new(i as f64, -1.0));
        let p = local_preprocess(&CMatrix::identity(3, 3), &y).unwrap();
        assert_eq!(p.gram, CMatrix::identity(3, 3));
        assert_eq!(p.mrc, y);
        let p = local_preprocess(&CMatrix::zeros(3, 3), &y).unwrap();
        assert!(p.gram.iter().all(|g| g.norm() == 0.0));
        assert!(p.mrc.iter().all(|g| g.norm() == 0.0));
    }

    #[test]
    fn matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = SystemConfig::new(4, 2, 0.1, 1.0).unwrap();
        let h = sample_rayleigh_channel(&cfg, &mut rng).h().clone();
        let y = crate::model::sample_unit_noise(4, &mut rng);
        let p = local_preprocess(&h, &y).unwrap();
        let (g, m) = naive_products(&h, &y);
        assert!((p.gram - g).camax() < 1e-12);
        assert!((p.mrc - m).camax() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let y = CVector::zeros(2);
        assert!(local_preprocess(&CMatrix::identity(3, 3), &y).is_err());
        assert_eq!(fuse_partials(&[]), Err(Error::Empty("partial statistics")));
    }

    #[test]
    fn fusion_matches_centralized() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = SystemConfig::new(64, 16, 0.1, 1.0).unwrap();
        let part = ClusterPartition::from_counts(vec![10, 30, 24]).unwrap();
        let ch = sample_rayleigh_channel(&cfg, &mut rng).partitioned(&part).unwrap();
        let y = crate::model::sample_unit_noise(64, &mut rng);
        let ys = ch.split(&y).unwrap();
        let parts: Vec<_> = ch
            .cluster_views()
            .iter()
            .zip(&ys)
            .map(|(h, y)| local_preprocess(h, y).unwrap())
            .collect();
        let fused = fuse_partials(&parts).unwrap();
        let central = FusedStats::from_channel(ch.h(), &y).unwrap();
        assert!((fused.gram - central.gram).camax() < 1e-12);
        assert!((fused.mrc - central.mrc).camax() < 1e-12);

        let single = fuse_partials(&parts[..1]).unwrap();
        assert_eq!(single.gram, parts[0].gram);
        assert_eq!(single.mrc, parts[0].mrc);
    }

    #[test]
    fn opposite_grams_cancel() {
        let g = CMatrix::from_fn(2, 2, |i, j| Complex64::new((i + j) as f64, i as f64 - j as f64));
        let a = PartialStats { gram: g.clone(), mrc: CVector::zeros(2) };
        let b = PartialStats { gram: -g, mrc: CVector::zeros(2) };
        let fused = fuse_partials(&[a, b]).unwrap();
        assert!(fused.gram.iter().all(|x| x.norm() == 0.0));
    }
}
