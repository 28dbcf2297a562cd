//! Crate-wide error type.

/// Errors produced by corpus parsing, graph construction, and analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input text (corpus, config, or graph file).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A precondition or configuration contract was violated.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A random walk could not be carried out on the given graph.
    #[error("walk failed: {0}")]
    Walk(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Process exit code for the CLI: 1 for contract violations, 2 for
    /// file/parse problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) => 2,
            Error::Invalid(_) | Error::Walk(_) => 1,
        }
    }

    /// True when the failure is the consumer closing our output pipe.
    pub fn is_broken_pipe(&self) -> bool {
        matches!(self, Error::Io(e) if e.kind() == std::io::ErrorKind::BrokenPipe)
    }
}

/// Attaches the file path to an I/O error so messages name their source.
pub(crate) fn io_at(path: &std::path::Path, err: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        err.kind(),
        format!("{}: {err}", path.display()),
    ))
}

pub type Result<T> = std::result::Result<T, Error>;
