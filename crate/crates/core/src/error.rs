use thiserror::Error;

/// A pair `(n, n')` whose 2×2 principal minor of the coefficient matrix is negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairViolation {
    pub row: usize,
    pub col: usize,
    /// `|a_{nn'}|² − a_{nn}·a_{n'n'}`, positive when violated.
    pub excess: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M_ij - conj(M_ji)| = {deviation:e}")]
    NonHermitian { deviation: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-positive eigenvalue {0:e} in divided difference")]
    NonPositiveEigenvalue(f64),

    #[error("support violation: weight {overlap:e} on a null eigenvector of the base operator")]
    SupportViolation { overlap: f64 },

    #[error("local dimension {dim} is smaller than the number of correlated terms {n}")]
    DimensionTooSmall { dim: usize, n: usize },

    #[error("dimension {dim} exceeds the desk-scale limit {limit} (use force to override)")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("basis is not orthonormal: max |<e_i|e_j> - delta_ij| = {deviation:e}")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("coefficient matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}{}",
        pairwise.map(|p| format!(", pairwise bound violated at ({}, {}) by {:e}", p.row, p.col, p.excess)).unwrap_or_default())]
    NotPsd {
        min_eigenvalue: f64,
        pairwise: Option<PairViolation>,
    },

    #[error("trace is {trace} (must be 1 within 1e-10)")]
    TraceNotOne { trace: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("index out of range: ({row}, {col}) for n = {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("sandwich violation: closed form {claim}, numerical minimum {value}, gap {gap:e}")]
    SandwichViolation { claim: f64, value: f64, gap: f64 },

    #[error("no restart converged out of {restarts}")]
    NonConvergence { restarts: usize },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
