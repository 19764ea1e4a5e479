use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Syntax error with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: {message} (expected one of: {})", expected.join(", "))]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("jet order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("non-finite value in component {component}")]
    NonFinite { component: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unbound identifier `{0}`")]
    Unbound(String),

    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("vectors are not in relation (residual {residual:e})")]
    NotInRelation { residual: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid problem: {0}")]
    Schema(String),

    #[error("oracle family `{family}` is not applicable: {reason}")]
    Inapplicable { family: String, reason: String },

    #[error("numeric failure: {0}")]
    Numeric(String),
}
