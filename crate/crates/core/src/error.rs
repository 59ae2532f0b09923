use thiserror::Error;

use crate::measures::Measure;

pub type Result<T> = std::result::Result<T, RankError>;

#[derive(Debug, Error)]
pub enum RankError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("relevance level {level} exceeds maximum level {max}")]
    LevelOutOfRange { level: u32, max: u32 },

    #[error("{measure} is defined for binary relevance only")]
    NonBinary { measure: Measure },

    #[error("k = {k} outside 1..={m}")]
    KOutOfRange { k: usize, m: usize },

    #[error("{what} = {value} outside supported range {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{measure} has no f(σ)·g(r) decomposition")]
    NotDecomposable { measure: Measure },

    #[error("value is not representable in the chosen scalar type: {0}")]
    NotRepresentable(String),

    #[error(
        "refused: {measure} admits no sublinear-regret algorithm under top-1 feedback \
         (global observability fails for normalized measures, minimax regret is Θ(T))"
    )]
    Refused { measure: Measure },

    #[error("inconclusive span residual {residual:e} for action pair ({i}, {j})")]
    Inconclusive { i: usize, j: usize, residual: f64 },

    #[error("action {action} is not strictly optimal under its witness: ties or loses to action {rival}")]
    NotStrictlyOptimal { action: usize, rival: usize },

    #[error("actions {0} and {1} are not neighbors")]
    NotNeighbors(usize, usize),

    #[error("neighbor structure of {measure} is not characterised; refusing local analysis")]
    NeighborsUnknown { measure: Measure },

    #[error(
        "horizon {horizon} is shorter than the object count {m}; exploration cannot be scheduled"
    )]
    HorizonTooShort { horizon: usize, m: usize },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("duplicate feedback for object {0}")]
    DuplicateFeedback(usize),

    #[error("block incomplete: {missing} probe(s) unanswered")]
    IncompleteBlock { missing: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("malformed stream: {0}")]
    MalformedStream(String),

    #[error("slope fit failed: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl RankError {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            RankError::Refused { .. } => 3,
            RankError::Inconclusive { .. } => 4,
            RankError::Io(_) | RankError::Csv(_) => 1,
            _ => 2,
        }
    }
}
