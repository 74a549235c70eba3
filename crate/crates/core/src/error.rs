use thiserror::Error;

/// Errors raised by the coreset and bound pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid loss value {value} at row {row}, column {col}")]
    InvalidLoss { row: usize, col: usize, value: f64 },

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Every loss row has zero norm, so no Frank-Wolfe vertex exists.
    #[error("degenerate instance: all loss rows have zero norm")]
    DegenerateInstance,

    #[error("invalid probability vector: {0}")]
    Probability(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch} (loss = {loss})")]
    Divergence { epoch: usize, loss: f64 },

    #[error("non-finite value at parameter coordinate {coordinate}")]
    Numerical { coordinate: usize },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed input at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
