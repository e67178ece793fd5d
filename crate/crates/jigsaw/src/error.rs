use thiserror::Error;

/// Errors raised by puzzle construction, analysis and search.
#[derive(Debug, Error)]
pub enum Error {
    #[error("jig type {jig} out of range 1..={q}")]
    JigOutOfRange { jig: u32, q: u32 },

    #[error("iota is not an involution: iota(iota({jig})) = {round_trip} != {jig}")]
    NotAnInvolution { jig: u32, round_trip: u32 },

    #[error("an involution on {q} types with {fixed} fixed points requires {q} - {fixed} to be even")]
    InvolutionParity { q: u32, fixed: u32 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("grid sides differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("assembly is not complete")]
    IncompleteAssembly,

    #[error("assembly is not feasible for the given carving")]
    InfeasibleAssembly,

    #[error("box holds {total} pieces but an {n}x{n} puzzle needs {expected}")]
    BoxSizeMismatch { total: u64, n: usize, expected: u64 },

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
