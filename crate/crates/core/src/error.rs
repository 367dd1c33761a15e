use thiserror::Error;

/// Errors raised by the clustering library.
///
/// Variant messages start with a short kebab-case tag naming the violated
/// condition so that front ends can surface it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid-region: {0}")]
    InvalidRegion(String),

    #[error("forest-violation: {first} and {second} are neither nested nor separated")]
    ForestViolation { first: String, second: String },

    #[error("duplicate-node: {0}")]
    DuplicateNode(String),

    #[error("node-not-found: {0}")]
    NodeNotFound(String),

    #[error("not-isomorphic: {0}")]
    NotIsomorphic(String),

    #[error("not-contained: {0}")]
    NotContained(String),

    #[error("monotonicity-violation at index {index}: {detail}")]
    MonotonicityViolation { index: usize, detail: String },

    #[error("adaptedness-violation at index {index}: {detail}")]
    AdaptednessViolation { index: usize, detail: String },

    #[error("dimension-mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid-weight: {0}")]
    InvalidWeight(String),

    #[error("not-a-base-set: {0}")]
    NotABaseSet(String),

    #[error("q-not-below-p: {0}")]
    NotBelow(String),

    #[error("closure-separation-violation at level {level}: {detail}")]
    ClosureSeparation { level: String, detail: String },

    #[error("invalid-density: {0}")]
    InvalidDensity(String),

    #[error("mixture-condition-failure: {0}")]
    MixtureCondition(String),

    #[error("unsupported-dimension: {0}")]
    UnsupportedDimension(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse-error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
