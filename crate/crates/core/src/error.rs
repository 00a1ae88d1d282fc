//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by matrix primitives, solvers, streams and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("entry ({0},{1}) is not finite")]
    NonFinite(usize, usize),

    #[error("eigendecomposition did not converge within {0} sweeps")]
    EigNoConvergence(usize),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("shifted matrix is singular: min eigenvalue {0:.3e} <= -epsilon ({1:.3e})")]
    SingularShift(f64, f64),

    #[error("negative entry {0:.3e} at index {1}")]
    NegativeEntry(f64, usize),

    #[error("solver did not converge within {0} iterations (residual {1:.3e})")]
    SolverNoConvergence(usize, f64),

    #[error("projection did not converge within {0} cycles (residual {1:.3e})")]
    ProjectionNoConvergence(usize, f64),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("loss matrix outside the declared loss space at round {0}")]
    LossOutOfSpace(usize),

    #[error("index pair ({0},{1}) out of range")]
    IndexOutOfRange(usize, usize),

    #[error("subgradient magnitude {0:.3e} exceeds the Lipschitz bound {1:.3e}")]
    SubgradientTooLarge(f64, f64),

    #[error("problem size {0} exceeds the exhaustive-comparator cap {1}")]
    ComparatorSizeCap(usize, usize),

    #[error("comparator decomposition exceeds declared caps: {0}")]
    DecompositionCapViolation(String),

    #[error("ratings file, line {line}: {msg}")]
    RatingsParse { line: usize, msg: String },

    #[error("unknown validation suite `{0}`")]
    UnknownSuite(String),

    #[error("unknown bound variant `{0}`")]
    UnknownVariant(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
