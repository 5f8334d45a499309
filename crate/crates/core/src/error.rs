use thiserror::Error;

/// Failure modes shared by every module.
///
/// Each variant maps onto one process exit code of the `qdisp` binary, see
/// [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unphysical input: {0}")]
    UnphysicalInput(String),

    #[error("truncation error: {what} (tail mass {tail:.3e} at dim {dim}; try dim >= {suggested_dim})")]
    Truncation {
        what: String,
        tail: f64,
        dim: usize,
        suggested_dim: usize,
    },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn truncation(what: impl Into<String>, tail: f64, dim: usize) -> Self {
        Error::Truncation {
            what: what.into(),
            tail,
            dim,
            suggested_dim: (2 * dim).next_power_of_two(),
        }
    }

    /// 0 success, 1 validation failure, 2 invalid input, 3 physicality
    /// violation, 4 truncation diagnostic failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::DegenerateInput(_) => 2,
            Error::UnphysicalInput(_) => 3,
            Error::Truncation { .. } => 4,
            Error::InternalInconsistency(_) => 1,
        }
    }
}
