use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("leakage: term {0} escapes the codomain span")]
    Leakage(String),
    #[error("empty block for gamma {0:?}")]
    EmptyBlock(Vec<i32>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("compressed matrix is not Hermitian (deviation {0:e})")]
    NonHermitian(f64),
    #[error("algebra is not H-type: {0}")]
    NotHType(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("certificate failed: {0}")]
    Certificate(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable tag used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "index",
            Error::DimensionMismatch(_) => "dimension",
            Error::Leakage(_) => "leakage",
            Error::EmptyBlock(_) => "empty_block",
            Error::Precondition(_) => "precondition",
            Error::NonHermitian(_) => "non_hermitian",
            Error::NotHType(_) => "not_htype",
            Error::Quadrature(_) => "quadrature",
            Error::Fit(_) => "fit",
            Error::Certificate(_) => "certificate",
            Error::Input(_) => "input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
