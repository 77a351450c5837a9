use thiserror::Error;

/// Errors shared across the estimation, simulation, and benchmark modules.
#[derive(Debug, Error)]
pub enum EvtError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("fewer than 2 positive values remain after filtering ({kept} of {raw} kept)")]
    EmptyAfterFiltering { kept: usize, raw: usize },

    #[error("subset enumeration infeasible: n = {n} exceeds the brute-force limit {limit}")]
    TooLargeToEnumerate { n: usize, limit: usize },

    #[error("estimator path needs at least 2 points, got {0}")]
    PathTooShort(usize),

    #[error("unknown distribution spec `{0}`")]
    UnknownDistribution(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("covariance factorization failed after jitter escalation (max diagonal {max_diag:e})")]
    FactorizationFailure { max_diag: f64 },

    #[error("line {line}: cannot parse `{content}` as a decimal number")]
    Parse { line: usize, content: String },
}

impl EvtError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        EvtError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, EvtError>;
