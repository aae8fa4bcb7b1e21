use thiserror::Error;

/// Errors raised by the library. CLI usage errors map onto exit code 2.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator symbol `{0}`")]
    UnknownGenerator(String),
    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),
    #[error("malformed word `{0}`")]
    MalformedWord(String),
    #[error("malformed group spec `{0}`")]
    MalformedGroup(String),
    #[error("malformed ring spec `{0}`")]
    MalformedRing(String),
    #[error("malformed scalar `{0}`")]
    MalformedScalar(String),
    #[error("radius cap {cap} exceeded (needed {needed})")]
    RadiusCapExceeded { cap: u32, needed: u32 },
    #[error("group specs do not match")]
    GroupMismatch,
    #[error("ring specs do not match")]
    RingMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("window of radius {radius} too small: {detail}")]
    WindowTooSmall { radius: u32, detail: String },
    #[error("empty generating set")]
    EmptyGeneratingSet,
    #[error("matrix is not idempotent")]
    NotIdempotent,
    #[error("morphism is not group-ring linear")]
    NotGroupRingLinear,
    #[error("equivariant structure has no passing cocycle certificate")]
    UncertifiedStructure,
    #[error("unsupported tier: {0}")]
    UnsupportedTier(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("preimage exceeds window: {0}")]
    PreimageExceedsWindow(String),
    #[error("invalid witness function: {0}")]
    InvalidWitness(String),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
