use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GbeError {
    #[error("context mismatch: {0} points vs {1} points")]
    ContextMismatch(usize, usize),

    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A denominator left the class `c * prod y_i^a * prod (x_i - x_j)^b`.
    #[error("denominator outside the supported class: {0}")]
    DenFormViolation(String),

    /// A coinciding-point limit produced a surviving negative order.
    #[error("function is not regular at x{i} = x{j}: epsilon^{order} coefficient survives")]
    NonRegular { i: usize, j: usize, order: i64 },

    #[error("not of conjectured shape: {0}")]
    NotConjectureShape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error("io error: {0}")]
    Io(String),
}

impl GbeError {
    /// Internal invariant violations, as opposed to user or data errors.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            GbeError::DenFormViolation(_) | GbeError::NonRegular { .. }
        )
    }
}

impl From<std::io::Error> for GbeError {
    fn from(e: std::io::Error) -> Self {
        GbeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GbeError>;
