use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box specification: {0}")]
    InvalidSpec(String),

    #[error("index ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("matrix for {system} is singular to working precision")]
    SingularMatrix { system: String },

    #[error("constraint block of {system} is rank deficient")]
    RankDeficient { system: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("point lies outside cell {cell}")]
    PointOutsideCell { cell: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("fixed-point iteration did not converge after {iterations} sweeps (last increment {increment:e})")]
    StepFailure { iterations: usize, increment: f64 },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
