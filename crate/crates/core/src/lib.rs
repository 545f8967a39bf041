//! Decentralized feedforward equalization for the massive MU-MIMO uplink.
//!
//! The crate is split along the processing chain:
//!
//! * [`model`]: constellations, Rayleigh channels, antenna partitions and
//!   message-volume accounting.
//! * [`equalize`]: cluster preprocessing, adder-tree fusion of Gram/MRC
//!   statistics, and the MRC, ZF, L-MMSE and LAMA equalizers that run on the
//!   fused statistics (partially decentralized architecture). The
//!   [`equalize::centralized`] module holds the reference equalizers that work
//!   on the full `(y, H)` pair.
//! * [`fusion`]: per-cluster equalization and inverse-variance fusion of local
//!   estimates (fully decentralized architecture).
//! * [`asymptotics`]: large-system SINR analysis: MSE functions, fixed points,
//!   closed forms, state evolution, mutual information and antenna-ratio
//!   searches.
//! * [`montecarlo`]: finite-dimensional symbol-error-rate experiments.
//! * [`validation`]: the invariant suite behind `dbp validate`.

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod equalize;
pub mod error;
pub mod fusion;
pub mod model;
pub mod montecarlo;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix (`H`, `G`).
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector (`y`, `z`, `s`).
pub type CVector = nalgebra::DVector<Complex64>;

/// Equalization algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqualizerKind {
    Mrc,
    Zf,
    Lmmse,
    Lama,
}

impl EqualizerKind {
    pub const ALL: [EqualizerKind; 4] = [Self::Mrc, Self::Zf, Self::Lmmse, Self::Lama];
    pub const LINEAR: [EqualizerKind; 3] = [Self::Mrc, Self::Zf, Self::Lmmse];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mrc => "mrc",
            Self::Zf => "zf",
            Self::Lmmse => "lmmse",
            Self::Lama => "lama",
        }
    }

    pub fn is_linear(self) -> bool {
        self != Self::Lama
    }
}

impl std::fmt::Display for EqualizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EqualizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mrc" => Ok(Self::Mrc),
            "zf" => Ok(Self::Zf),
            "lmmse" | "l-mmse" | "mmse" => Ok(Self::Lmmse),
            "lama" => Ok(Self::Lama),
            other => Err(Error::InvalidParameter(format!("unknown equalizer '{other}'"))),
        }
    }
}

/// Where equalization happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    /// Single unit with access to the full `(y, H)`.
    Centralized,
    /// Clusters forward Gram matrices and MRC vectors; equalization is central.
    Partial,
    /// Clusters equalize locally; the center fuses the estimates.
    Full,
}

impl Architecture {
    pub fn name(self) -> &'static str {
        match self {
            Self::Centralized => "centralized",
            Self::Partial => "pd",
            Self::Full => "fd",
        }
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "centralized" | "central" | "cen" => Ok(Self::Centralized),
            "pd" | "partial" => Ok(Self::Partial),
            "fd" | "full" => Ok(Self::Full),
            other => Err(Error::InvalidParameter(format!("unknown architecture '{other}'"))),
        }
    }
}

/// `10·log10(x)`.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Inverse of [`to_db`].
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
