use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point height must be positive, got {0}")]
    NonpositiveHeight(f64),
    #[error("matrix is not unimodular: |det - 1| = {0:.3e}")]
    NotUnimodular(f64),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("slope ({0}, {1}) is neither trivial nor primitive")]
    NonPrimitiveSlope(i64, i64),
    #[error("tuple length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("denominator must be >= 1, got {0}")]
    BadDenominator(i64),
    #[error("invalid cusp index {0} (group has {1} cusps)")]
    BadCuspIndex(usize, usize),
    #[error("word uses undeclared generator index {0}")]
    UndeclaredGenerator(i32),
    #[error("slope-tuple is neither congruent to nor dominated by the extension data")]
    NotCongruent,
    #[error("normal form inconclusive: {0}")]
    Inconclusive(String),
    #[error("Newton iteration did not converge: last residual {0:.3e}")]
    NoConvergence(f64),
    #[error("exceptional slope ({0}, {1}): {2}")]
    ExceptionalSlope(i64, i64, String),
    #[error("validation: {0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
