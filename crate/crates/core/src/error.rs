use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("quadrature did not converge: estimated error {achieved:e} above tolerance {tolerance:e}")]
    NonConvergence { achieved: f64, tolerance: f64 },

    #[error("grid too coarse: {samples_per_period:.1} samples per trap period, at least {required} required")]
    GridTooCoarse { samples_per_period: f64, required: f64 },

    #[error("energy denominator between levels `{state}` and `{other}` is {gap_cm1:e} cm^-1, below the floor")]
    DegenerateDenominator { state: String, other: String, gap_cm1: f64 },

    #[error("Fock basis of dimension {dim} cannot hold the predicted motion; need dim >= {required_dim}")]
    DimensionTooSmall { dim: usize, required_dim: usize },

    #[error("truncation leakage {leakage:e} above {limit:e}; refusing to certify, need dim >= {required_dim}")]
    Truncation { leakage: f64, limit: f64, required_dim: usize },
}

impl Error {
    /// True for failures of a numerical method on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Truncation { .. })
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
