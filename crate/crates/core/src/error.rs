use thiserror::Error;

#[derive(Debug, Error)]
pub enum TtError {
    #[error("index {index} out of range on axis {axis} (extent {extent})")]
    Index {
        axis: usize,
        index: usize,
        extent: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The numerical input carries no usable information (all singular
    /// values below the cutoff, zero snapshot data, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl TtError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        TtError::Argument(msg.into())
    }

    pub(crate) fn format(offset: u64, msg: impl Into<String>) -> Self {
        TtError::Format {
            offset,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, TtError>;
