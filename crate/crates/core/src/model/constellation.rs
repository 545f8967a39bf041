use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstellationKind {
    Qpsk,
    Qam16,
    Qam64,
}

impl ConstellationKind {
    pub fn order(self) -> usize {
        match self {
            Self::Qpsk => 4,
            Self::Qam16 => 16,
            Self::Qam64 => 64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Qpsk => "qpsk",
            Self::Qam16 => "16qam",
            Self::Qam64 => "64qam",
        }
    }
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstellationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "qpsk" | "4qam" | "qam4" => Ok(Self::Qpsk),
            "16qam" | "qam16" => Ok(Self::Qam16),
            "64qam" | "qam64" => Ok(Self::Qam64),
            other => Err(Error::InvalidParameter(format!("unknown constellation '{other}'"))),
        }
    }
}

/// Square QAM alphabet with a uniform prior, scaled to unit average energy.
///
/// Symbols are ordered row by row: index `i * m + q` carries in-phase level
/// `i` and quadrature level `q`, levels ascending, with `m = sqrt(|O|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    symbols: Vec<Complex64>,
    es: f64,
}

impl Constellation {
    pub fn new(kind: ConstellationKind) -> Self {
        let order = kind.order();
        let m = (order as f64).sqrt().round() as usize;
        // mean energy of the odd-integer grid is 2(M-1)/3
        let scale = (2.0 * (order as f64 - 1.0) / 3.0).sqrt().recip();
        let level = |k: usize| (2.0 * k as f64 - (m as f64 - 1.0)) * scale;
        let symbols: Vec<Complex64> = (0..m)
            .flat_map(|i| (0..m).map(move |q| Complex64::new(level(i), level(q))))
            .collect();
        let es = symbols.iter().map(|a| a.norm_sqr()).sum::<f64>() / order as f64;
        Self { kind, symbols, es }
    }

    pub fn qpsk() -> Self {
        Self::new(ConstellationKind::Qpsk)
    }

    pub fn qam16() -> Self {
        Self::new(ConstellationKind::Qam16)
    }

    pub fn qam64() -> Self {
        Self::new(ConstellationKind::Qam64)
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Average symbol energy `E[|S|^2]`.
    pub fn es(&self) -> f64 {
        self.es
    }

    /// Prior mean `E[S]`.
    pub fn mean(&self) -> Complex64 {
        self.symbols.iter().sum::<Complex64>() / self.symbols.len() as f64
    }

    /// Prior variance `Var[S] = Es - |E[S]|^2`.
    pub fn variance(&self) -> f64 {
        self.es - self.mean().norm_sqr()
    }

    /// Per-dimension amplitude levels, ascending; the alphabet is their
    /// Cartesian product.
    pub fn levels(&self) -> Vec<f64> {
        let m = (self.symbols.len() as f64).sqrt().round() as usize;
        self.symbols.iter().step_by(m).map(|a| a.re).collect()
    }

    /// Bits per symbol, `log2 |O|`.
    pub fn bits(&self) -> f64 {
        (self.symbols.len() as f64).log2()
    }

    /// Index of the nearest symbol in Euclidean distance, lowest index on ties.
    pub fn nearest(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, a) in self.symbols.iter().enumerate() {
            let d = (z - a).norm_sqr();
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        best
    }

    pub fn index_of(&self, s: Complex64) -> Option<usize> {
        self.symbols.iter().position(|a| (a - s).norm() < 1e-12)
    }
}
