use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource limit exceeded: {what} needs {needed}, cap is {cap}")]
    Resource { what: String, needed: f64, cap: f64 },

    #[error("{what} did not converge (best estimate {best})")]
    NonConvergence { what: String, best: f64 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("division by a vanishing window maximum: {0}")]
    DivisionDomain(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("overflow guard tripped at power {power}: norm {norm}")]
    Overflow { power: usize, norm: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
