//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: left operand is {left}x{left}, right operand is {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix storage holds {got} entries, expected {expected} for a {dim}x{dim} matrix")]
    BadStorage {
        dim: usize,
        expected: usize,
        got: usize,
    },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: |a[{row}][{col}] - conj(a[{col}][{row}])| = {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("density matrix trace is {trace:e}, expected 1")]
    TraceNotUnity { trace: f64 },

    #[error("density matrix has negative eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(
        "truncation insufficient at q = {q}: top two basis states carry weight {weight:e} \
         (limit 1e-8) with dim = {dim}; increase dim"
    )]
    TruncationInsufficient { q: f64, dim: usize, weight: f64 },

    #[error("no density matrix n(q) stored for q = {0}")]
    MissingMomentum(f64),

    #[error("negative time t = {0}: the dephasing semigroup only runs forward")]
    NegativeTime(f64),

    #[error("superoperator oracle is limited to dim <= {limit}, got dim = {dim}")]
    OracleTooLarge { dim: usize, limit: usize },

    #[error("{name} must be {requirement}, got {value}")]
    OutOfDomain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("imaginary residue {residue:e} exceeds the 1e-9 relative bound for {quantity}")]
    ComplexResidue {
        quantity: &'static str,
        residue: f64,
    },

    #[error("time grid is not uniform: {0}")]
    NonUniformGrid(String),

    #[error("invalid K grid: {0}")]
    InvalidKGrid(String),

    #[error("config error in section [{section}]: {message}")]
    Config { section: String, message: String },

    #[error("config is missing required sections: {}", .0.join(", "))]
    MissingSections(Vec<String>),

    #[error("config error: missing key `{key}` in section [{section}]")]
    MissingKey { section: String, key: String },

    #[error("config error in section [{section}]: key `{key}` carries no unit, expected `{expected}` ({unit})")]
    UnitViolation {
        section: String,
        key: String,
        expected: String,
        unit: String,
    },

    #[error("config syntax error: {0}")]
    Syntax(String),

    #[error(
        "grid point q = {q_inv_a} 1/A, tau_sc = {tau_sc_as} as, K = {k_ev} eV failed: {source}"
    )]
    GridPoint {
        q_inv_a: f64,
        tau_sc_as: f64,
        k_ev: f64,
        source: Box<Error>,
    },

    #[error("{} grid point(s) failed:\n{}", .0.len(), .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    SweepFailed(Vec<Error>),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
