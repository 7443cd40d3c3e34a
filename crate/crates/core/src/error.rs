use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("point is off the Stiefel manifold: residual {residual:e} exceeds {tol:e}")]
    Infeasible { residual: f64, tol: f64 },

    #[error("degenerate input to {op}: {detail}")]
    Degenerate { op: &'static str, detail: String },

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("graph is not connected: {0}")]
    Disconnected(String),

    #[error("non-finite value at round {round} ({what})")]
    Diverged { round: usize, what: &'static str },

    #[error("{path}: row {row}, column {col}: {detail}")]
    Parse {
        path: PathBuf,
        row: usize,
        col: usize,
        detail: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Shape {
        op,
        detail: detail.into(),
    }
}
