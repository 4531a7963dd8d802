use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by how the CLI maps them to exit codes: input
/// validation problems exit with 1, computation refusals (failed certificate,
/// non-equivariant boundary map, unsupported query) with 2, and numerical
/// failures with 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("{what} is too ill-conditioned (condition number {cond:.3e} exceeds {limit:.3e})")]
    IllConditioned { what: String, cond: f64, limit: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),

    #[error("relator '{relator}' does not evaluate to the identity{} (residual {residual:.3e})",
            .point.as_deref().map(|p| format!(" at point '{p}'")).unwrap_or_default())]
    RelatorViolation {
        relator: String,
        residual: f64,
        point: Option<String>,
    },

    #[error("refused: {0}")]
    Refused(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Degenerate(_)
            | Error::IllConditioned { .. }
            | Error::DimensionMismatch(_)
            | Error::UnknownGenerator(_)
            | Error::RelatorViolation { .. } => 1,
            Error::Refused(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
