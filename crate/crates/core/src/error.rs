//! Error taxonomy shared by all modules.
//!
//! The variants map onto the process exit codes used by the CLI: usage errors
//! are handled by the argument parser, resolution errors exit 3, resource
//! errors exit 4, and inconsistency reports exit 5.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on domain or parameter ranges was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A geometric construction could not be realized (e.g. a chord placement
    /// has no solution for the requested generator curve).
    #[error("construction error: {0}")]
    Construction(String),

    /// The requested scale is below what the current discretization resolves.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A configured budget (vertices, cells, memory) would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),

    /// A statistical estimate could not be formed from the given data.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// The query point is inside the boundary cutoff band of a quadrature.
    #[error("cutoff error: {0}")]
    Cutoff(String),

    /// Two boundary samples coincide and a pairwise kernel is undefined.
    #[error("degenerate pair: {0}")]
    DegeneratePair(String),

    /// Two routes that must agree disagree beyond their error budgets.
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code class for CLI surfacing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resolution(_) => 3,
            Error::Resource(_) => 4,
            Error::Inconsistency(_) => 5,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
