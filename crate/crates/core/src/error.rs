use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdlcError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("norm violation: {0}")]
    NormViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("invalid circuit: {0}")]
    Validation(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no feasible plan:\n{0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, QdlcError>;
