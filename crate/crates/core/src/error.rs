use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("q-product truncation exceeded {max_terms} terms before tolerance was met")]
    TruncationExceeded { max_terms: usize },

    #[error("degenerate generator: a must be nonzero")]
    DegenerateGenerator,

    #[error("evaluation point {x} coincides with a pole")]
    PoleHit { x: Complex64 },

    #[error("branch point x = ±1 could not be resolved")]
    BranchDegenerate,

    #[error("symbolic/numeric self-check failed (residual {residual:e})")]
    SelfCheckFailed { residual: f64 },

    #[error("zero or pole of modulus {modulus} lies too close to the contour |x| = {r}")]
    ContourTooClose { r: f64, modulus: f64 },

    #[error("phase unwrapping failed on |x| = {r}: refinement exhausted")]
    PhaseJumpTooLarge { r: f64 },

    #[error("radius grid too small: {0}")]
    GridTooSmall(String),

    #[error("vanishing order at {x} is ambiguous (estimate {estimate:.3})")]
    AmbiguousOrder { x: Complex64, estimate: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("root localisation failed: {0}")]
    RootNotFound(String),

    #[error("verification failed (residual {residual:e} above tolerance)")]
    VerificationFailed { residual: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature did not converge (difference {difference:e})")]
    QuadratureNonconvergent { difference: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("semantic error at byte {offset}: {message}")]
    Semantic { offset: usize, message: String },

    #[error("unsupported expression shape: {0}")]
    UnsupportedShape(String),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::Semantic { .. } | Error::UnsupportedShape(_) => 2,
            Error::TruncationExceeded { .. }
            | Error::SelfCheckFailed { .. }
            | Error::PhaseJumpTooLarge { .. }
            | Error::AmbiguousOrder { .. }
            | Error::RootNotFound(_)
            | Error::VerificationFailed { .. }
            | Error::QuadratureNonconvergent { .. } => 3,
            Error::DegenerateGenerator
            | Error::PoleHit { .. }
            | Error::BranchDegenerate
            | Error::ContourTooClose { .. }
            | Error::GridTooSmall(_)
            | Error::OutOfRange(_)
            | Error::InvalidParams(_)
            | Error::Precondition(_) => 4,
        }
    }
}
