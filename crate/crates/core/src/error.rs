use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("column {column} has norm {norm}, expected 1")]
    NotNormalized { column: usize, norm: f64 },
    #[error("negative entry {value} at row {row}, column {column}")]
    NegativeEntry { row: usize, column: usize, value: f64 },
    #[error("dictionary is not overcomplete: {signal_dim} rows, {num_atoms} atoms")]
    NotOvercomplete { signal_dim: usize, num_atoms: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("negative coefficient {value} at atom {index}")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("atom index {index} out of range for {num_atoms} atoms")]
    IndexOutOfRange { index: usize, num_atoms: usize },
    #[error("step budget must be at least 1")]
    ZeroBudget,
    #[error("active-set NNLS did not converge within {0} iterations")]
    MaxIterationsExceeded(usize),
    #[error("sample sparsity {found} does not match model depth {expected}")]
    SparsityMismatch { expected: usize, found: usize },
    #[error("empty training batch")]
    EmptyBatch,
    #[error("gradient contains non-finite entries")]
    NonFiniteGradient,
    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("column {column} stayed zero after {attempts} redraws")]
    DegenerateColumn { column: usize, attempts: usize },
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },
    #[error("library contains no spectra")]
    EmptyLibrary,
    #[error("sparsity must be at least 1")]
    ZeroSparsity,
    #[error("sample {index} has a zero signal")]
    ZeroSignal { index: usize },
    #[error("column {column} is zero")]
    ZeroColumn { column: usize },
    #[error("coherence needs at least two columns")]
    TooFewColumns,
    #[error("no trained model for sparsity {0}")]
    MissingModel(usize),
    #[error("invalid model file: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
