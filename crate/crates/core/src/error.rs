use thiserror::Error;

/// Errors raised while constructing or combining states, channels and matrices.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("entries: expected {expected} values, found {found}")]
    EntryCount { expected: usize, found: usize },

    #[error("entries: non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace must be 1, found {re:.12} + {im:.3e}i")]
    Trace { re: f64, im: f64 },

    #[error("amplitudes: norm must be 1, found {norm:.12}")]
    NotNormalized { norm: f64 },

    #[error("kraus: completeness violated, max |sum A_i^dag A_i - I| = {residual:.3e}")]
    NotTracePreserving { residual: f64 },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("kraus: channel needs at least one Kraus operator")]
    EmptyKraus,

    #[error("channel must be square (dim_in = {dim_in}, dim_out = {dim_out})")]
    NonSquareChannel { dim_in: usize, dim_out: usize },

    #[error("invalid subsystem shape: {0}")]
    Shape(String),

    #[error("parameter `{name}` out of range: {value}")]
    Parameter { name: &'static str, value: f64 },

    #[error("rank {rank} out of range 1..={dim}")]
    Rank { rank: usize, dim: usize },

    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
