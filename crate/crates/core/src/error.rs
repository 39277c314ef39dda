use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{routine} did not converge after {iterations} sweeps")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("neighbor graph is disconnected: no path from sample {from} to sample {to}")]
    DisconnectedGraph { from: usize, to: usize },

    #[error("training diverged at epoch {epoch}, step {step}")]
    Divergence { epoch: usize, step: usize },

    /// Malformed binary payload (IDX file, serialized model).
    #[error("format error at byte offset {offset}: {message}")]
    Format { offset: usize, message: String },

    /// Malformed text table; `row` is the 1-based line number.
    #[error("format error at row {row}: {message}")]
    Table { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn format(offset: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: msg.into(),
        }
    }

    /// True for errors caused by the caller's data or arguments rather than
    /// by a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Argument(_)
                | Error::Format { .. }
                | Error::Table { .. }
                | Error::Io(_)
        )
    }
}
