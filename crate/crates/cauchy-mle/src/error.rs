use num_complex::Complex64;

/// Errors produced by sample validation and the solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("sample needs at least {min} observations, got {got}")]
    TooFewObservations { min: usize, got: usize },

    #[error("sample needs at least 3 distinct values")]
    TooFewDistinct,

    #[error("observation at index {index} is not finite")]
    NonFiniteObservation { index: usize },

    #[error("cannot parse {text:?} as a decimal or p/q rational")]
    ParseValue { text: String },

    #[error("angle at index {index} is outside [0, 2*pi)")]
    AngleOutOfRange { index: usize },

    #[error("sigma must be strictly positive, got {sigma}")]
    NonPositiveSigma { sigma: f64 },

    #[error("q is undefined at z = {z} (pole of the map)")]
    Pole { z: Complex64 },

    #[error("iteration hit a pole {retries} times; giving up")]
    PoleRetriesExhausted { retries: usize },

    #[error("fixed-point iteration did not converge within {max_iter} steps")]
    DidNotConverge { max_iter: usize },

    #[error("root finder did not converge within {max_iter} sweeps")]
    RootFinderStalled { max_iter: usize },

    #[error("{op} requires a sample of size {expected}, got {got}")]
    WrongSampleSize {
        op: &'static str,
        expected: &'static str,
        got: usize,
    },

    #[error("{op} requires all sample values distinct")]
    DuplicateValues { op: &'static str },

    #[error("no root in the upper half-plane passes the likelihood-equation residual test (best residual {best_residual:e})")]
    NoAcceptableRoot { best_residual: f64 },

    #[error("exact division left a nonzero remainder while building R_n; this is a bug")]
    InexactDivision,

    #[error("division by the zero polynomial")]
    ZeroPolyDivision,

    #[error("relative position must satisfy Im(xi) > 0 and |xi| < 1, got {xi}")]
    PositionOutsideHalfDisc { xi: Complex64 },

    #[error("constructive sample requires an even n >= 4, got {n}")]
    OddSampleSize { n: usize },

    #[error("constructed sample failed self-verification: |xi_fit - xi| = {error:e}")]
    ConstructionDrift { error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
