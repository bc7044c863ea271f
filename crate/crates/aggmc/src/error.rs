//! Crate-wide error taxonomy.

use std::time::Duration;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input text; `offset` is a byte offset into the input.
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },

    /// API misuse: mixed managers, incompatible method/formula, bad arguments.
    #[error("usage error: {0}")]
    Usage(String),

    /// A configured resource limit (node ceiling, attempt budget) was hit.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The model violates one of its own declared constraints.
    #[error("model error: {0}")]
    Model(String),

    /// Wall-clock budget exhausted; carries the configured budget.
    #[error("timed out after {0:?}")]
    Timeout(Duration),

    /// Malformed model/automaton/config file contents.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// In-process wall-clock budget, threaded through every expansion step and
/// fixpoint iteration so long runs fail with [`Error::Timeout`] instead of
/// hanging.
#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    at: Option<std::time::Instant>,
    budget: Duration,
}

impl Deadline {
    pub fn none() -> Deadline {
        Deadline {
            at: None,
            budget: Duration::ZERO,
        }
    }

    pub fn after(budget: Duration) -> Deadline {
        Deadline {
            at: Some(std::time::Instant::now() + budget),
            budget,
        }
    }

    pub fn check(&self) -> Result<()> {
        match self.at {
            Some(at) if std::time::Instant::now() >= at => Err(Error::Timeout(self.budget)),
            _ => Ok(()),
        }
    }
}
