use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric: max asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible graph parameters: {0}")]
    Infeasible(String),

    #[error("node {0} is isolated; the normalized Laplacian needs positive degrees")]
    IsolatedNode(usize),

    #[error("all feature vectors are identical (mean pairwise distance is zero)")]
    DegenerateFeatures,

    #[error("kernel is not positive semi-definite: curvature {curvature:e} along coordinate {coordinate}")]
    NotPsd { coordinate: usize, curvature: f64 },

    #[error("SVM dual is unbounded: {0}")]
    UnboundedDual(String),

    #[error("pair kernel too large to materialize: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("empty subset: {0}")]
    EmptySubset(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
