//! Exact and numerical toolkit for right-angled tiling links `[m,n,m,n]`.

pub mod classify;
pub mod coxeter;
pub mod exact;
pub mod exec;
pub mod lorentz;
pub mod report;
pub mod trace_field;
pub mod vinberg;

pub use exact::AlgebraError;

/// Errors surfaced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("algebra: {0}")]
    Algebra(#[from] AlgebraError),
    #[error("domain: {0}")]
    Domain(String),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("structure: {0}")]
    Structure(String),
    #[error("verification: {0}")]
    Verification(String),
}

impl Error {
    /// Process exit code: 2 for invalid input, 3 for failed internal checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) | Error::Structure(_) => 3,
            Error::Algebra(AlgebraError::UnresolvedSquare { .. }) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
