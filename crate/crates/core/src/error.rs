use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("Gram matrix is singular or not positive definite")]
    SingularGram,
    #[error("negative error variance {value:e} for user {index}")]
    NegativeVariance { index: usize, value: f64 },
    #[error("non-finite value at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("fixed-point iteration did not converge after {iterations} iterations (sigma2 = {sigma2:e})")]
    NonConvergence { iterations: usize, sigma2: f64 },
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("trial {trial} at {snr_db} dB: {source}")]
    Trial {
        snr_db: f64,
        trial: usize,
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by the numerics or the operating point rather
    /// than by malformed input.
    pub fn is_numerical(&self) -> bool {
        if let Error::Trial { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::SingularGram
                | Error::NegativeVariance { .. }
                | Error::NonFinite { .. }
                | Error::NonConvergence { .. }
                | Error::InvalidRegime(_)
                | Error::Infeasible(_)
                | Error::Inconsistent(_)
        )
    }
}
