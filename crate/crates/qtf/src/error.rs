use thiserror::Error;

/// Errors surfaced by the library. Every fallible operation reports one of
/// these; exact arithmetic means there are no tolerance-dependent failures
/// outside the floating-point smoothness estimator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("dilation matrix is not expansive (an eigenvalue has modulus <= 1)")]
    NotExpansive,

    #[error("dilation matrix is singular")]
    Singular,

    #[error("schema error at {path}: {msg}")]
    SchemaError { path: String, msg: String },

    #[error("non-rational value at {path}: {text:?}")]
    NonRational { path: String, text: String },

    #[error("low-pass filter does not satisfy the basic sum rule")]
    NoBasicSumRule,

    #[error("internal residue is nonzero after elimination: {0}")]
    InternalResidue(String),

    #[error("matrix is not Hermitian")]
    NotHermitian,

    #[error("input has fewer vanishing moments than required (need {need}, found {found})")]
    InsufficientVM { need: usize, found: usize },

    #[error("coset phase e^(i 2 pi gamma.beta) is irrational")]
    IrrationalPhase,

    #[error("linear system is infeasible: {0}")]
    Infeasible(String),

    #[error("requested vanishing moments m = {m} exceed the ceiling {ceiling}")]
    CeilingExceeded { m: usize, ceiling: usize },

    #[error("filter is not normalized (coefficients must sum to 1)")]
    NotNormalized,

    #[error("smoothness estimate did not converge (eigen {eigen}, ratio {ratio})")]
    NoConvergence { eigen: f64, ratio: f64 },

    #[error("sample grid depth mismatch: {0}")]
    DepthMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
