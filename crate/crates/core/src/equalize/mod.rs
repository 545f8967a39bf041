//! Equalization on fused Gram/MRC statistics (partially decentralized
//! architecture) and the centralized reference equalizers.

pub mod centralized;
mod detect;
mod lama;
mod linear;
mod posterior;
mod preprocess;

pub use detect::{hard_detect, indices_to_symbols};
pub use lama::{lama_equalize, LamaParams, LamaRun, LamaState};
pub use linear::{hermitian_inverse, linear_equalize};
pub use posterior::{posterior_stats, PosteriorStats};
pub(crate) use posterior::posterior_unchecked;
pub use preprocess::{fuse_partials, local_preprocess, FusedStats, PartialStats};

use crate::{CVector, EqualizerKind, Error, Result};

/// Estimate `z` with its per-user error variances.
///
/// `gain[u]` is the conditional bias `E[z_u | s_u] = gain[u] s_u`. It is one
/// for every equalizer except L-MMSE, whose estimate is shrunk toward zero;
/// `sigma2` is then the mean-square error of the shrunk estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerOutput {
    pub z: CVector,
    pub sigma2: Vec<f64>,
    pub gain: Vec<f64>,
    pub kind: EqualizerKind,
}

impl EqualizerOutput {
    pub fn new(z: CVector, sigma2: Vec<f64>, kind: EqualizerKind) -> Result<Self> {
        if z.len() != sigma2.len() {
            return Err(Error::DimensionMismatch {
                context: "estimate vs. variance length",
                expected: z.len(),
                found: sigma2.len(),
            });
        }
        if let Some((index, &value)) = sigma2.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeVariance { index, value });
        }
        let gain = vec![1.0; z.len()];
        Ok(Self { z, sigma2, gain, kind })
    }

    pub fn with_gain(mut self, gain: Vec<f64>) -> Result<Self> {
        if gain.len() != self.z.len() {
            return Err(Error::DimensionMismatch { context: "gain length", expected: self.z.len(), found: gain.len() });
        }
        if let Some(g) = gain.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter(format!("equalizer gain {g}")));
        }
        self.gain = gain;
        Ok(self)
    }

    pub fn users(&self) -> usize {
        self.z.len()
    }

    /// The same estimate rescaled to unit gain, `z_u / gain[u]`, with the
    /// variance of the remaining noise plus interference. This is the form
    /// the decoupled AWGN model describes, and the one to detect on and fuse.
    pub fn unbiased(&self, es: f64) -> Self {
        if self.gain.iter().all(|&g| g == 1.0) {
            return self.clone();
        }
        let z = CVector::from_fn(self.z.len(), |u, _| self.z[u] / self.gain[u]);
        let sigma2 = self
            .sigma2
            .iter()
            .zip(&self.gain)
            .map(|(s, g)| ((s - (1.0 - g) * (1.0 - g) * es) / (g * g)).max(0.0))
            .collect();
        Self { z, sigma2, gain: vec![1.0; self.z.len()], kind: self.kind }
    }
}

/// Equalizes fused statistics with any of the four algorithms.
pub fn equalize_fused(
    kind: EqualizerKind,
    fused: &FusedStats,
    constellation: &crate::model::Constellation,
    n0: f64,
    beta: f64,
    lama: &LamaParams,
) -> Result<EqualizerOutput> {
    match kind {
        EqualizerKind::Lama => Ok(lama_equalize(fused, constellation, n0, beta, lama)?.output),
        linear => linear_equalize(linear, fused, n0, constellation.es()),
    }
}
