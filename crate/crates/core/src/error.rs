use thiserror::Error;

/// Errors raised by the library. The leading token of every message is a
/// stable identifier that the CLI surfaces verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension-mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not-symmetric: max |M - M^T| = {0:e}")]
    NotSymmetric(f64),

    #[error("not-pure: det(2V) = {0}")]
    NotPure(f64),

    #[error("gamma-not-invertible: reciprocal condition number {0:e}")]
    GammaNotInvertible(f64),

    #[error("kernel-not-convergent: eigenvalues of Re(M) span [{min:e}, {max:e}]")]
    KernelNotConvergent { min: f64, max: f64 },

    #[error("odd-dimension: {0}")]
    OddDimension(usize),

    #[error("degree-cap-exceeded: total monomial degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },

    #[error("invalid-transmissivity: {0} is outside (0, 1]")]
    InvalidTransmissivity(f64),

    #[error("not-unitary: max |U U^dag - I| = {0:e}")]
    NotUnitary(f64),

    #[error("normalize-first: the state's success probability has not been computed")]
    NormalizeFirst,

    #[error("zero-norm: the conditional state vanishes identically")]
    ZeroNorm,

    #[error("not-normalized: target superposition has norm {0}")]
    TargetNotNormalized(f64),

    #[error("unsupported-displacement: only zero-mean states are supported here")]
    UnsupportedDisplacement,

    #[error("invalid-pattern: {0}")]
    InvalidPattern(String),

    #[error("all-modes-measured: use pattern_probability for a full pattern on {0} modes")]
    AllModesMeasured(usize),

    #[error("non-real-result: {re} + {im}i")]
    NonReal { re: f64, im: f64 },

    #[error("invalid-parameter: {0}")]
    InvalidParameter(String),

    #[error("cutoff-exceeded: {0}")]
    Cutoff(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
