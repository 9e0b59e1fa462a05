use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PflError {
    #[error("chart mismatch: expected dimension {expected}, found {found}")]
    ChartMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for chart of dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("point has {found} coordinates, chart has {expected}")]
    PointDimension { expected: usize, found: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("base point is not regular: {0}")]
    NonRegularPoint(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("pushforward pair is not mutually inverse (component {component})")]
    NotInverse { component: usize },

    #[error("input is not in iterated Weber form at level {level}: {reason}")]
    NotWeberForm { level: usize, reason: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, PflError>;
