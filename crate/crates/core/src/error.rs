use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario file or product definition is invalid. `field` names the offending entry.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// Inputs that must describe the same paths or grid do not.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    /// A positive adjustment cannot be balanced by a spread leg worth nothing.
    #[error("infeasible spread: adjustment {adjustment} against a zero annuity")]
    InfeasibleSpread { adjustment: f64 },

    #[error("margin ledger identity violated on path {path_id}: residual {residual:e} exceeds {tolerance:e}")]
    IdentityViolation {
        path_id: u64,
        residual: f64,
        tolerance: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Domain(_) | Error::Io(_) | Error::Json(_) => 1,
            Error::IdentityViolation { .. } => 2,
            Error::Contract(_) | Error::Numerical(_) | Error::InfeasibleSpread { .. } => 3,
        }
    }
}
