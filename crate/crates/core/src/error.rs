use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("duplicate factor id `{0}`")]
    DuplicateFactor(String),

    #[error("unknown factor id `{0}`")]
    UnknownFactor(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSelection(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("conditioning on factor `{factor}` has zero overlap (weight {weight:.3e})")]
    ZeroOverlap { factor: String, weight: f64 },

    #[error("positivity violation: eigenvalue {0:.3e} below -1e-9")]
    Positivity(f64),

    #[error("Renyi order must be positive, got {0}")]
    InvalidAlpha(f64),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("frame `{0}` has no coherent-state seed")]
    MissingSeed(String),

    #[error("state annihilated by projection onto the physical subspace (weight {0:.3e})")]
    Annihilated(f64),

    #[error("no physical states found after {0} attempts")]
    NoPhysicalStates(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
