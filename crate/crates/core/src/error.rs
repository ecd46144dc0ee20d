use crate::constants::ConstantError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("term budget exhausted")]
    BudgetExhausted,
    #[error("budget must allow at least one term")]
    InvalidBudget,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot decide the dominant term of the divisor within budget")]
    IndeterminatePivot,
    #[error("cannot decide the sign within budget")]
    IndeterminateSign,
    #[error("argument is not bounded (it has a nonzero infinite part)")]
    ArgumentNotBounded,
    #[error("constant term {0}")]
    ConstantOutsideDomain(String),
    #[error("{0}")]
    ConstantExpUnsupported(String),
    #[error("{0}")]
    ConstantLogUnsupported(String),
    #[error("{0}")]
    ConstantCapabilityMissing(String),
    #[error("argument is not a positive unit (positive with dominant monomial 1)")]
    NotPositiveUnit,
    #[error("argument is not positive")]
    NotPositive,
    #[error("cannot decide membership of the argument in [-1, 1] within budget")]
    IndeterminateCubeMembership,
    #[error("invalid monomial split: {0}")]
    InvalidSplit(String),
    #[error("operation not supported for {0} series")]
    TierUnsupported(&'static str),
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("stream emitted terms out of order")]
    UnorderedStream,
}

impl From<ConstantError> for KernelError {
    fn from(err: ConstantError) -> Self {
        match err {
            ConstantError::ExpUnsupported(..) => KernelError::ConstantExpUnsupported(err.to_string()),
            ConstantError::LogUnsupported(..) => KernelError::ConstantLogUnsupported(err.to_string()),
            ConstantError::PowerUnsupported(..) => {
                KernelError::ConstantCapabilityMissing(err.to_string())
            }
            ConstantError::DivisionByZero => KernelError::DivisionByZero,
        }
    }
}

pub type Result<T, E = KernelError> = std::result::Result<T, E>;
