use std::ops::Range;

use nalgebra::{DMatrixView, DVectorView};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::Constellation;
use crate::{CMatrix, CVector, Error, Result};

/// Uplink dimensions and noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Base-station antennas `B`.
    pub bs_antennas: usize,
    /// Single-antenna users `U`.
    pub users: usize,
    /// Complex noise variance per receive entry.
    pub n0: f64,
    /// Average symbol energy.
    pub es: f64,
}

impl SystemConfig {
    pub fn new(bs_antennas: usize, users: usize, n0: f64, es: f64) -> Result<Self> {
        if bs_antennas == 0 || users == 0 {
            return Err(Error::InvalidParameter(
                "antenna and user counts must be at least 1".into(),
            ));
        }
        if !(n0 >= 0.0 && n0.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise variance {n0} must be >= 0")));
        }
        if !(es > 0.0 && es.is_finite()) {
            return Err(Error::InvalidParameter(format!("symbol energy {es} must be > 0")));
        }
        Ok(Self { bs_antennas, users, n0, es })
    }

    /// System ratio `U / B`.
    pub fn beta(&self) -> f64 {
        self.users as f64 / self.bs_antennas as f64
    }
}

/// Split of the `B` receive antennas into `C` contiguous clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    counts: Vec<usize>,
}

impl ClusterPartition {
    pub fn from_counts(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidPartition("at least one cluster is required".into()));
        }
        if let Some(c) = counts.iter().position(|&n| n == 0) {
            return Err(Error::InvalidPartition(format!("cluster {c} has no antennas")));
        }
        Ok(Self { counts })
    }

    /// `C` clusters of `B / C` antennas each.
    pub fn uniform(bs_antennas: usize, clusters: usize) -> Result<Self> {
        if clusters == 0 || !bs_antennas.is_multiple_of(clusters) {
            return Err(Error::InvalidPartition(format!(
                "{bs_antennas} antennas cannot be split into {clusters} equal clusters"
            )));
        }
        Self::from_counts(vec![bs_antennas / clusters; clusters])
    }

    /// Builds `B_c = w_c B`; every product must be a positive integer.
    pub fn from_weights(bs_antennas: usize, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPartition(format!("weights sum to {total}, not 1")));
        }
        let counts = weights
            .iter()
            .enumerate()
            .map(|(c, &w)| {
                let exact = w * bs_antennas as f64;
                let rounded = exact.round();
                if (exact - rounded).abs() > 1e-9 || rounded < 1.0 {
                    Err(Error::InvalidPartition(format!(
                        "cluster {c}: w = {w} gives {exact} antennas, not a positive integer"
                    )))
                } else {
                    Ok(rounded as usize)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let partition = Self::from_counts(counts)?;
        if partition.total() != bs_antennas {
            return Err(Error::InvalidPartition(format!(
                "cluster sizes add up to {}, expected {bs_antennas}",
                partition.total()
            )));
        }
        Ok(partition)
    }

    pub fn clusters(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Antenna fractions `w_c = B_c / B`.
    pub fn weights(&self) -> Vec<f64> {
        let b = self.total() as f64;
        self.counts.iter().map(|&n| n as f64 / b).collect()
    }

    /// Row ranges of each cluster inside `H` and `y`.
    pub fn ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.counts
            .iter()
            .map(|&n| {
                let r = start..start + n;
                start += n;
                r
            })
            .collect()
    }
}

/// A channel matrix together with its cluster row blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: CMatrix,
    ranges: Vec<Range<usize>>,
}

impl ChannelRealization {
    /// Wraps `h` as a single cluster.
    pub fn new(h: CMatrix) -> Self {
        let ranges = std::iter::once(0..h.nrows()).collect();
        Self { h, ranges }
    }

    pub fn with_partition(h: CMatrix, partition: &ClusterPartition) -> Result<Self> {
        Self::new(h).partitioned(partition)
    }

    pub fn partitioned(mut self, partition: &ClusterPartition) -> Result<Self> {
        if partition.total() != self.h.nrows() {
            return Err(Error::DimensionMismatch {
                context: "partition vs. channel rows",
                expected: self.h.nrows(),
                found: partition.total(),
            });
        }
        self.ranges = partition.ranges();
        Ok(self)
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn bs_antennas(&self) -> usize {
        self.h.nrows()
    }

    pub fn users(&self) -> usize {
        self.h.ncols()
    }

    pub fn clusters(&self) -> usize {
        self.ranges.len()
    }

    pub fn cluster_ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    /// Row block `H_c`.
    pub fn cluster(&self, c: usize) -> DMatrixView<'_, Complex64> {
        let r = &self.ranges[c];
        self.h.rows(r.start, r.len())
    }

    pub fn cluster_views(&self) -> Vec<DMatrixView<'_, Complex64>> {
        (0..self.clusters()).map(|c| self.cluster(c)).collect()
    }

    /// Slices a receive vector into the blocks `y_c` aligned with `H_c`.
    pub fn split<'a>(&self, y: &'a CVector) -> Result<Vec<DVectorView<'a, Complex64>>> {
        if y.len() != self.h.nrows() {
            return Err(Error::DimensionMismatch {
                context: "receive vector length",
                expected: self.h.nrows(),
                found: y.len(),
            });
        }
        Ok(self.ranges.iter().map(|r| y.rows(r.start, r.len())).collect())
    }

    /// Vertical concatenation of the cluster blocks.
    pub fn stack(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.h.nrows(), self.h.ncols());
        for (c, r) in self.ranges.iter().enumerate() {
            out.rows_mut(r.start, r.len()).copy_from(&self.cluster(c));
        }
        out
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, std_per_dim: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_dim, im * std_per_dim)
}

/// i.i.d. `CN(0, 1/B)` channel matrix.
pub fn sample_rayleigh_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> ChannelRealization {
    let std = (0.5 / cfg.bs_antennas as f64).sqrt();
    let h = CMatrix::from_fn(cfg.bs_antennas, cfg.users, |_, _| complex_gaussian(rng, std));
    ChannelRealization::new(h)
}

/// `len` i.i.d. `CN(0, 1)` entries.
pub fn sample_unit_noise<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector {
    let std = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_fn(len, |_, _| complex_gaussian(rng, std))
}

/// Uniform symbol draws; returns the symbol indices and the symbol vector.
pub fn sample_symbols<R: Rng + ?Sized>(
    constellation: &Constellation,
    users: usize,
    rng: &mut R,
) -> (Vec<usize>, CVector) {
    let m = constellation.len();
    let idx: Vec<usize> = (0..users).map(|_| rng.random_range(0..m)).collect();
    let s = CVector::from_iterator(users, idx.iter().map(|&k| constellation.symbols()[k]));
    (idx, s)
}

/// `y = H s0 + n` with `n ~ CN(0, N0 I)`.
pub fn transmit<R: Rng + ?Sized>(
    channel: &ChannelRealization,
    s0: &CVector,
    n0: f64,
    rng: &mut R,
) -> Result<CVector> {
    if s0.len() != channel.users() {
        return Err(Error::DimensionMismatch {
            context: "transmit vector length",
            expected: channel.users(),
            found: s0.len(),
        });
    }
    if !(n0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("noise variance {n0} must be >= 0")));
    }
    let mut y = channel.h() * s0;
    if n0 > 0.0 {
        let noise = sample_unit_noise(y.len(), rng);
        y.axpy(Complex64::new(n0.sqrt(), 0.0), &noise, Complex64::new(1.0, 0.0));
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rayleigh_entry_variance() {
        let cfg = SystemConfig::new(256, 16, 0.1, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ch = sample_rayleigh_channel(&cfg, &mut rng);
        let var = ch.h().iter().map(|h| h.norm_sqr()).sum::<f64>() / 4096.0;
        assert!((var * 256.0 - 1.0).abs() < 0.2, "variance {var}");
    }

    #[test]
    fn rayleigh_is_deterministic() {
        let cfg = SystemConfig::new(32, 4, 0.1, 1.0).unwrap();
        let a = sample_rayleigh_channel(&cfg, &mut ChaCha8Rng::seed_from_u64(3));
        let b = sample_rayleigh_channel(&cfg, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn rayleigh_columns_uncorrelated() {
        let cfg = SystemConfig::new(10_000, 4, 0.1, 1.0).unwrap();
        let ch = sample_rayleigh_channel(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
        let h = ch.h();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    // empirical E[h_i^* h_j] scaled to unit per-entry variance
                    let corr: Complex64 =
                        h.column(i).iter().zip(h.column(j).iter()).map(|(a, b)| a.conj() * b).sum();
                    assert!(corr.norm() < 0.02, "cross-correlation {corr}");
                }
            }
        }
    }

    #[test]
    fn noiseless_transmit_is_exact() {
        let cfg = SystemConfig::new(8, 3, 0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = sample_rayleigh_channel(&cfg, &mut rng);
        let (_, s) = sample_symbols(&Constellation::qpsk(), 3, &mut rng);
        let y = transmit(&ch, &s, 0.0, &mut rng).unwrap();
        assert_eq!(y, ch.h() * &s);

        let eye = ChannelRealization::new(CMatrix::identity(3, 3));
        assert_eq!(transmit(&eye, &s, 0.0, &mut rng).unwrap(), s);
    }

    #[test]
    fn transmit_rejects_bad_length() {
        let ch = ChannelRealization::new(CMatrix::identity(3, 3));
        let s = CVector::zeros(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            transmit(&ch, &s, 0.0, &mut rng),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn noise_variance_matches_n0() {
        let ch = ChannelRealization::new(CMatrix::identity(4, 4));
        let s = CVector::from_element(4, Complex64::new(0.5, -0.5));
        let clean = ch.h() * &s;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut acc = 0.0;
        let draws = 100_000 / 4;
        for _ in 0..draws {
            let y = transmit(&ch, &s, 0.1, &mut rng).unwrap();
            acc += (y - &clean).iter().map(|e| e.norm_sqr()).sum::<f64>();
        }
        let var = acc / (draws * 4) as f64;
        assert!((var / 0.1 - 1.0).abs() < 0.02, "noise variance {var}");
    }

    #[test]
    fn symbol_frequencies_and_energy() {
        let c = Constellation::qpsk();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000;
        let (idx, s) = sample_symbols(&c, n, &mut rng);
        let mut counts = [0usize; 4];
        for k in idx {
            counts[k] += 1;
        }
        for count in counts {
            let f = count as f64 / n as f64;
            assert!((f - 0.25).abs() < 0.01 * 0.25, "frequency {f}");
        }
        let energy = s.iter().map(|a| a.norm_sqr()).sum::<f64>() / n as f64;
        assert!((energy - c.es()).abs() < 0.01);
    }

    #[test]
    fn partitions() {
        let p = ClusterPartition::uniform(256, 8).unwrap();
        assert_eq!(p.counts(), &[32; 8]);
        assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(ClusterPartition::uniform(10, 3).is_err());
        assert!(ClusterPartition::from_weights(10, &[0.25, 0.75]).is_err());
        let p = ClusterPartition::from_weights(8, &[0.25, 0.75]).unwrap();
        assert_eq!(p.counts(), &[2, 6]);
        assert!(ClusterPartition::from_weights(8, &[0.5, 0.6]).is_err());
        assert!(ClusterPartition::from_weights(8, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn partition_reassembles_channel_and_receive_vector() {
        let cfg = SystemConfig::new(12, 3, 0.1, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = ClusterPartition::from_counts(vec![5, 3, 4]).unwrap();
        let ch = sample_rayleigh_channel(&cfg, &mut rng).partitioned(&p).unwrap();
        assert_eq!(&ch.stack(), ch.h());
        let (_, s) = sample_symbols(&Constellation::qam16(), 3, &mut rng);
        let y = transmit(&ch, &s, 0.1, &mut rng).unwrap();
        let parts = ch.split(&y).unwrap();
        let joined: Vec<Complex64> = parts.iter().flat_map(|p| p.iter().copied()).collect();
        assert_eq!(joined, y.iter().copied().collect::<Vec<_>>());
        assert_eq!(ch.cluster(1).nrows(), 3);
    }
}
