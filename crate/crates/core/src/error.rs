//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on operation parameters was violated.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An input violated a structural contract (e.g. asymmetry, negativity).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The requested moment order is not finite for the distribution family.
    #[error("moment of order {p} is infinite for this family (tail index {tail_index})")]
    InfiniteMoment { p: f64, tail_index: f64 },

    /// An iterative solver did not converge; carries the best estimate seen.
    #[error("no convergence after {iterations} iterations (best estimate {best:e})")]
    NoConvergence { iterations: usize, best: f64 },

    /// The randomized sparsifier exhausted its retry budget; diagnostic only.
    #[error(
        "sparsify search failed after {draws} draws \
         (best draw had {best_survivors} survivors, needed {needed})"
    )]
    SearchFailure {
        draws: usize,
        best_survivors: usize,
        needed: usize,
    },

    /// Degenerate inputs for which the requested quantity is undefined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Malformed experiment data (e.g. nonpositive values in a log-log fit).
    #[error("data error: {0}")]
    Data(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: parameter/data problems are 2,
    /// everything else (assertion-style failures) is 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_)
            | Error::Contract(_)
            | Error::InfiniteMoment { .. }
            | Error::Degenerate(_)
            | Error::Data(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 1,
        }
    }
}
