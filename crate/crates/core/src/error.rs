use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("linear solve failed: system matrix is not positive definite or contains non-finite entries")]
    LinearSolve,

    #[error("iterate became non-finite at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("cannot split {m} samples into {k} folds")]
    TooFewSamples { m: usize, k: usize },

    #[error("flip ratio {0} outside [0, 0.5)")]
    InvalidFlipRatio(f64),

    #[error("both classes must be present")]
    MissingClass,

    #[error("model file line {line}: {msg}")]
    ModelFormat { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
