use std::path::PathBuf;

/// Errors produced by mesh generation, assembly, solvers and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate element: triangle {index} has non-positive area")]
    DegenerateElement { index: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("linear solver failed at step {step}: {detail}")]
    Solver { step: usize, detail: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("mesh file error: {0}")]
    MeshFormat(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
