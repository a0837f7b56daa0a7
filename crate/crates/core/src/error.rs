use std::io;

use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {n} exceeds the supported maximum of {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("input index {index} out of range for a table of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("coordinate {k} out of range 1..={n}")]
    CoordinateOutOfRange { k: usize, n: usize },
    #[error("table has {found} words, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("assignment must cover exactly the fixed coordinates: {0}")]
    AssignmentMismatch(String),
    #[error("invalid truth-table hex: {0}")]
    InvalidHex(String),
    #[error("truth-table hex has {found} digits, expected {expected} for n={n}")]
    HexLength { n: usize, expected: usize, found: usize },
    #[error("invalid family spec: {0}")]
    InvalidFamily(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("epsilon {eps} outside the allowed range {range}")]
    EpsilonOutOfRange { eps: f64, range: &'static str },
    #[error("delta {0} outside (0, 1)")]
    DeltaOutOfRange(f64),
    #[error("derivative step {0} outside (0, 1e-3]")]
    StepOutOfRange(f64),
    #[error("chain order is not a permutation of 1..={n}")]
    NotAPermutation { n: usize },
    #[error("full moment chains are capped at n={cap} (got n={n}); raise the cap to override")]
    ChainTooLarge { n: usize, cap: usize },
    #[error("exhaustive search over {tables} tables exceeds the budget of {budget}")]
    BudgetExceeded { tables: u128, budget: u64 },
    #[error("checkpoint job hash {found} does not match job hash {expected}")]
    CheckpointMismatch { expected: String, found: String },
    #[error("corrupt checkpoint: {0}")]
    CheckpointCorrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
