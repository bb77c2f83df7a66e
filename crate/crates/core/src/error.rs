use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("d must be an odd prime (got {0})")]
    NotOddPrime(u64),

    #[error("no inverse of 0")]
    NoInverse,

    #[error("mismatched moduli: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid line family: r must be nonzero")]
    InvalidFamily,

    #[error("FPP has no pencils")]
    NoPencils,

    #[error("geometry fails its axioms: {0}")]
    AxiomFailure(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("table is not real: imaginary residue {0:e}")]
    NotReal(f64),

    #[error("no negativity witness found in {0} draws")]
    SearchExhausted(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
