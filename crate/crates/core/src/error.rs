//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by sampling, reconstruction, and diagnostics routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Ambient dimension too small for the requested operation.
    #[error("invalid dimension: n = {n}, need n >= {min}")]
    InvalidDimension { n: usize, min: usize },

    /// A vector that must be nonzero (e.g. a point on the sphere) was zero.
    #[error("invalid input: zero vector")]
    ZeroVector,

    /// An eigenvalue that must be nonnegative was negative.
    #[error("invalid input: negative eigenvalue {value:e} at index {index}")]
    NegativeEigenvalue { index: usize, value: f64 },

    /// Eigenvalues do not sum to one within tolerance.
    #[error("invalid input: eigenvalues sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    /// Truncation removed every eigenvalue.
    #[error("empty spectrum: all eigenvalues below threshold {threshold:e}")]
    EmptySpectrum { threshold: f64 },

    /// Bipartition with |A| > |B| where |A| <= |B| is required.
    #[error("invalid bipartition: |A| = {subsys} > |B| = {complement}")]
    InvalidBipartition { subsys: usize, complement: usize },

    /// 1-based index outside its valid range.
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// Dense statevector would exceed the memory guard.
    #[error("capacity exceeded: L = {sites} sites, dense limit is {max}")]
    CapacityExceeded { sites: usize, max: usize },

    /// Bond index outside 1..=L-1.
    #[error("bond {bond} out of range 1..={max}")]
    BondOutOfRange { bond: usize, max: usize },

    /// A state with zero norm cannot be canonicalized.
    #[error("degenerate state: zero norm")]
    DegenerateState,

    /// Isometries require at least as many rows as columns.
    #[error("isometry requires rows >= cols, got {rows} x {cols}")]
    RowsLessThanCols { rows: usize, cols: usize },

    /// The environment at a bond lost rank needed by the target spectrum.
    #[error(
        "rank-deficient environment at bond {bond}: {available} singular values \
         above cutoff, target needs {required}"
    )]
    RankDeficientBond {
        bond: usize,
        available: usize,
        required: usize,
    },

    /// Mismatched tensor or spectrum dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Regression input must be strictly positive before taking logs.
    #[error("invalid input: nonpositive entry {value:e} at index {index}")]
    NonPositiveEntry { index: usize, value: f64 },

    /// Invalid ensemble specification field.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A dense decomposition failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed checkpoint or report data.
    #[error("malformed data: {0}")]
    MalformedData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
