use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum AtmError {
    #[error("point {x} lies outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("curves are defined on different grids")]
    GridMismatch,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("index range error: {0}")]
    Range(String),

    #[error("covariance estimate is singular or indefinite: {0}")]
    SingularCovariance(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = AtmError> = std::result::Result<T, E>;

impl AtmError {
    /// True for failures caused by the numerics rather than the input data.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            AtmError::DegenerateSeries(_) | AtmError::SingularCovariance(_)
        )
    }

    /// Process exit status for command-line use: 2 for bad arguments,
    /// 3 for bad input data, 4 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AtmError::Param(_) | AtmError::Range(_) => 2,
            e if e.is_numerical() => 4,
            _ => 3,
        }
    }
}
