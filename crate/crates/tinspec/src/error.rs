//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TinError {
    #[error("covariance sequence must contain at least one lag")]
    EmptySequence,
    #[error("c_0 must be strictly positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("covariance sequence is not admissible: order-{order} Toeplitz matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    Inadmissible { order: usize, min_eig: f64 },
    #[error("order {requested} out of range (1..={available})")]
    OrderOutOfRange { requested: usize, available: usize },
    #[error("matrix is not positive semidefinite")]
    NotPositiveSemidefinite,
    #[error("matrix is singular within tolerance")]
    Singular,
    #[error("index {index} out of bounds for dimension {bound}")]
    IndexOutOfBounds { index: usize, bound: usize },
    #[error("degenerate input: observation set is linearly dependent and does not determine the target sample")]
    DegenerateInput,
    #[error("AR model is unstable: root modulus {modulus} outside the stability margin")]
    UnstableModel { modulus: f64 },
    #[error("AR coefficients must start with a_0 = 1, got {0}")]
    BadLeadingCoefficient(f64),
    #[error("excitation variance must be strictly positive, got {0}")]
    NonPositiveExcitationVariance(f64),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("split index {split} invalid for a {order}x{order} matrix")]
    BadSplit { split: usize, order: usize },
    #[error("numerical degeneracy in MinTin step: |alpha| = {alpha} < 1")]
    MintinDegeneracy { alpha: f64 },
    #[error("solver did not converge: best residual {residual:e} after {starts} starts")]
    NonConvergence { residual: f64, starts: usize },
    #[error("no admissible MA support found up to the cap k <= {cap}")]
    MaSupportNotFound { cap: usize },
    #[error("subset size {k} out of range 1..={n}")]
    BadSubsetSize { k: usize, n: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, TinError>;
