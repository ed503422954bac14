use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("likelihood ratio undefined at index {0} (p and q both zero)")]
    UndefinedRatio(usize),

    #[error("channel is not deterministic (column {0} is not a point mass)")]
    NotDeterministic(usize),

    #[error("channel is a threshold channel; no non-extremality witness exists")]
    IsThreshold,

    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    #[error("vertex enumeration cap exceeded: l*k = {0} > {1}")]
    DimensionCap(usize, usize),

    #[error("unsupported family for this operation: {0}")]
    Unsupported(String),

    #[error("channel collapses the pair (zero output divergence)")]
    ZeroDivergence,

    #[error("no valid witness pattern: {0}")]
    WitnessFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
