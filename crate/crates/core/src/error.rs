use thiserror::Error;

/// Errors produced by the solver, the search engines and the file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} has length {found}, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Raised when an input that should be optimal provably is not, or when a
    /// construction breaks one of its own invariants.
    #[error("internal contradiction: {0}")]
    Internal(String),

    #[error("search budget of {budget} nodes exhausted (best found {best}, upper bound {bound})")]
    Budget {
        budget: u64,
        best: usize,
        bound: usize,
    },

    #[error("instance too large for brute force: {size} vertices (cap {cap})")]
    TooLarge { size: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension {
            what,
            expected,
            found,
        });
    }
    Ok(())
}
