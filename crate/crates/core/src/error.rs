use thiserror::Error;

/// Errors produced by the corrocert library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid geometry or solver configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Mesh generation failed or a mesh invariant is violated.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// Finite element assembly failed.
    #[error("assembly error: {0}")]
    Assembly(String),

    /// A matrix expected to be positive definite is not. `pivot` is the
    /// zero-based index of the first non-positive pivot; callers use this
    /// error as a definiteness test.
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric routine failed to converge or produced non-finite values.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error marks a definiteness test failure rather than a
    /// hard fault.
    pub fn is_not_positive_definite(&self) -> bool {
        matches!(self, Error::NotPositiveDefinite { .. })
    }
}
