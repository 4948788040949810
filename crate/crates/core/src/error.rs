use std::fmt;

use thiserror::Error;

/// Location of a token in parsed source text. Lines and columns are 1-based,
/// `col_end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl SourceSpan {
    pub fn new(line: usize, col_start: usize, col_end: usize) -> Self {
        Self {
            line,
            col_start,
            col_end: col_end.max(col_start + 1),
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}", self.line, self.col_start, self.col_end)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index:?} out of range for order {order}, dim {dim} (indices are 1-based)")]
    IndexOutOfRange {
        index: Vec<usize>,
        order: usize,
        dim: usize,
    },
    #[error("duplicate entry at index {0:?}")]
    DuplicateEntry(Vec<usize>),
    #[error("tensor of order {order} and dim {dim} exceeds the cap of {cap} entries")]
    MemoryCapExceeded {
        order: usize,
        dim: usize,
        cap: usize,
    },
    #[error("non-finite value {value} at index {index:?}")]
    NonFiniteValue { index: Vec<usize>, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("permutation of size {found} applied to a tensor of order {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),
    #[error("operation needs order >= {min}, found {found}")]
    OrderTooSmall { min: usize, found: usize },
    #[error("tensor order {order} exceeds the cap of {cap}")]
    OrderCapExceeded { order: usize, cap: usize },
    #[error("odd state dimension {0}: no canonical symplectic structure")]
    OddDimension(usize),
    #[error("odd tensor order {0}: definiteness is undefined")]
    OddOrder(usize),
    #[error("tensor is not supersymmetric (max deviation {deviation:e})")]
    NotSupersymmetric { deviation: f64 },
    #[error("matrix is not symmetric (max deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },
    #[error("order-{order} tensor is not a Hamiltonian cubical tensor")]
    NotHamiltonian { order: usize },
    #[error("point {point:?} is not an equilibrium (residual {residual:e})")]
    NotAnEquilibrium { point: Vec<f64>, residual: f64 },
    #[error("Newton iteration did not converge{}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    NoConvergence { step: Option<usize> },
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: constant terms are not allowed")]
    ConstantTermNotAllowed { span: SourceSpan },
    #[error("{span}: right-hand side has degree zero")]
    DegreeZeroRhs { span: SourceSpan },
    #[error("{span}: unknown variable `{name}`")]
    UnknownVariable { span: SourceSpan, name: String },
    #[error("{span}: Hamiltonian terms must have degree >= 2, found {degree}")]
    DegreeTooLow { span: SourceSpan, degree: u32 },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("input is {size} bytes, above the {max} byte limit")]
    TooLarge { size: usize, max: usize },
}

impl ParseError {
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::ConstantTermNotAllowed { span }
            | ParseError::DegreeZeroRhs { span }
            | ParseError::UnknownVariable { span, .. }
            | ParseError::DegreeTooLow { span, .. } => Some(*span),
            ParseError::DimMismatch(_) | ParseError::TooLarge { .. } => None,
        }
    }
}
