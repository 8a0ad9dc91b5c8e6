use thiserror::Error;

/// Error type shared by every module in this crate.
///
/// The CLI maps these onto exit codes, so the split matters:
/// anything here is a "validation / precondition" class failure (exit 2),
/// while verification verdicts (a ladder or certificate that checks out as
/// invalid) are reported through report types, not through `Error`.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text; the message names the offending token.
    #[error("parse error: {0}")]
    Parse(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Structurally invalid data (duplicates, length mismatches, bad ranges).
    #[error("invalid input: {0}")]
    Validation(String),

    /// A lookup outside the domain of a finite map or coded set.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact computation hit a pole (for the index map: f(d) = level).
    #[error("singularity: {0}")]
    Singularity(String),

    /// Ladder construction ran out of usable points before the requested depth.
    #[error("insufficient density: ladder reached depth {reached} of {requested}")]
    InsufficientDensity { reached: usize, requested: usize },

    /// The two generators are multiplicatively dependent within the bound.
    #[error("multiplicative dependence: {0}")]
    Dependence(String),

    /// Formula text that does not lex or parse.
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },

    /// Formula evaluation failure; the message shows the offending subterm.
    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
