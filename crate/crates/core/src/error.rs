use thiserror::Error;

/// Errors raised across the library.
///
/// Numeric payloads are reported as `f64` regardless of the scalar type used
/// for the computation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive {
        min_eigenvalue: f64,
        /// Unit vector `x` with `<x|a x> < 0`, as (re, im) pairs.
        witness: Vec<(f64, f64)>,
    },

    #[error("trace {trace} exceeds 1")]
    TraceExceedsOne { trace: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("scalar {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("trace has imaginary part {imag:e}")]
    ImaginaryTrace { imag: f64 },

    #[error("spectral and trace routes disagree by {deviation:e}")]
    CrossCheck { deviation: f64 },

    #[error("chain is not increasing at index {index} (min eigenvalue of difference {min_eigenvalue:e})")]
    NotIncreasing {
        index: usize,
        min_eigenvalue: f64,
        witness: Vec<(f64, f64)>,
    },

    #[error("interval chain is not nested at index {index}")]
    NotNested { index: usize },

    #[error("chain is empty")]
    EmptyChain,

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("bad gate targets: {0}")]
    BadTargets(String),

    #[error("{line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed matrix JSON: {0}")]
    Json(String),

    #[error("non-finite entry in input")]
    NonFinite,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
