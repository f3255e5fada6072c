use thiserror::Error;

/// Errors raised by sequence evaluation and the analyses built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A read went past the end of a finite source.
    #[error("position {index} is not readable (source valid up to {valid_up_to})")]
    OutOfRange { index: usize, valid_up_to: usize },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A Toeplitz position with no filling level up to `level`.
    #[error("position {position} is unfilled through level {level} (hole residues {trace:?})")]
    Unfilled {
        position: usize,
        level: usize,
        trace: Vec<u64>,
    },

    /// An odometer orbit landed on a boundary point without an assigned bit.
    #[error("orbit hits boundary point {boundary_index} at n = {n} with no assigned bit")]
    BoundaryHit { n: usize, boundary_index: usize },

    #[error("exact arithmetic overflowed the scalar type")]
    Overflow,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
