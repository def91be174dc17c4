use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("window too small: {what} needs at least {needed} points, got {got}")]
    WindowTooSmall {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("input windows do not overlap for {0}")]
    EmptyOverlap(&'static str),
    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: i64, hi: i64 },
    #[error("index {index} outside window [{lo}, {hi}]")]
    OutOfWindow { index: i64, lo: i64, hi: i64 },

    #[error("parse error at byte {offset}: expected one of {}", .expected.join(", "))]
    Parse {
        offset: usize,
        expected: Vec<&'static str>,
    },
    #[error("invalid scalar literal `{0}`")]
    InvalidLiteral(String),
    #[error("division by zero at n = {0}")]
    DivByZero(i64),
    #[error("factorial of a negative number at n = {0}")]
    NegativeFactorial(i64),
    #[error("factorial of a non-integer at n = {0}")]
    NonIntegerFactorial(i64),

    #[error("eps = -1 is not allowed here")]
    EpsIsMinusOne,
    #[error("seed vanishes at n = {0}")]
    SeedVanishes(i64),
    #[error("sequence does not solve the shifted eigenproblem (worst n = {worst_index}, |residual| = {max_abs})")]
    NotASeed { worst_index: i64, max_abs: String },
    #[error("eps {0} already used in this chain")]
    DuplicateEps(String),
    #[error("transformed state of step {step} vanishes at n = {index}")]
    TransformedStateVanishes { step: usize, index: i64 },
    #[error("Casoratian vanishes at n = {0}")]
    ZeroCasoratian(i64),
    #[error("closed forms disagree at n = {0}")]
    ClosedFormMismatch(i64),
    #[error("u(n) vanishes at n = {0}")]
    UZero(i64),
    #[error("eps = {0} has no exact square root in this backend")]
    IrrationalRoot(String),
    #[error("operation requires the {0} backend")]
    BackendMismatch(&'static str),
    #[error("{ordering} ordering: {source}")]
    Ordering {
        ordering: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl Error {
    /// Process exit status: 2 for bad input or configuration, 1 when the
    /// mathematics fails (vanishing seeds, failed identities).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Ordering { source, .. } => source.exit_code(),
            Error::SeedVanishes(_)
            | Error::NotASeed { .. }
            | Error::TransformedStateVanishes { .. }
            | Error::ZeroCasoratian(_)
            | Error::ClosedFormMismatch(_)
            | Error::UZero(_)
            | Error::DivByZero(_)
            | Error::NegativeFactorial(_)
            | Error::NonIntegerFactorial(_) => 1,
            _ => 2,
        }
    }
}
