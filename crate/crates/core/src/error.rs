use thiserror::Error;

use crate::moments::Subset;

pub type Result<T> = std::result::Result<T, BoundError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point coordinate {value} lies outside [-1, 1]")]
    OutsideBox { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "matrix is not positive definite: pivot {pivot} has value {value:e}{}",
        subset_suffix(.subset)
    )]
    NotPositiveDefinite {
        pivot: usize,
        value: f64,
        subset: Option<Subset>,
    },

    #[error("unknown test function `{name}` with n = {n} (valid: {valid})")]
    NotFound { name: String, n: usize, valid: String },
}

impl BoundError {
    /// Attach the subset whose pencil failed to a definiteness error.
    pub fn with_subset(self, subset: Subset) -> Self {
        match self {
            BoundError::NotPositiveDefinite { pivot, value, .. } => BoundError::NotPositiveDefinite {
                pivot,
                value,
                subset: Some(subset),
            },
            other => other,
        }
    }

    /// True for failures of the numerical linear algebra, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, BoundError::NotPositiveDefinite { .. })
    }
}

fn subset_suffix(subset: &Option<Subset>) -> String {
    match subset {
        Some(s) => format!(" (subset I = {s})"),
        None => String::new(),
    }
}
