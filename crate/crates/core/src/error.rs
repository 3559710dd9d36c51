use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("singular operator: {0}")]
    SingularOperator(String),

    /// A Gram matrix lost positive definiteness, which signals a rank-deficient basis.
    #[error("indefinite Gram matrix (pivot {pivot:.3e} at column {column})")]
    IndefiniteGram { column: usize, pivot: f64 },

    #[error("singular matrix in dense solve (column {0})")]
    SingularDense(usize),

    #[error("harmonic Ritz breakdown: {0}")]
    HarmonicBreakdown(String),

    #[error("operator is not Hermitian positive definite: p^H A p = {0:.3e}")]
    NotHpd(f64),

    #[error("harvest needs at least {needed} basis vectors, cycle only has {available}")]
    HarvestTooSmall { needed: usize, available: usize },

    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    #[error("non-finite values produced by {0}")]
    NonFinite(&'static str),

    #[error("dense diagnostic refused: n = {n} exceeds cap {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
