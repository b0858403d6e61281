use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not planar")]
    NonPlanar,
    #[error("edge {{{0}, {1}}} is not present")]
    MissingEdge(usize, usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("model has non-zero node fields; extend it to a zero-field model first")]
    NonZeroField,
    #[error("embedding does not match the model graph")]
    EmbeddingMismatch,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("brute-force enumeration limited to {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("moments ({0}, {1}, {2}) are not realizable by a pairwise distribution")]
    NotRealizable(f64, f64, f64),
    #[error("divergence is infinite: target has mass where the model has none")]
    InfiniteDivergence,
    #[error("bad value {value} at sample {row}, variable {col}; expected -1 or +1")]
    BadValue { row: usize, col: usize, value: f64 },
    #[error("invalid targets: {0}")]
    InvalidTargets(String),
    #[error("bad dimensions: {0}")]
    BadDims(String),
    #[error("Newton iteration did not converge after {iterations} iterations (grad norm {grad_norm:e})")]
    NotConverged { iterations: usize, grad_norm: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
