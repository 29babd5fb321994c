use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("bad cycle notation: {0}")]
    CycleSyntax(String),

    #[error("starting permutation is not an n-cycle")]
    NotATour,

    #[error("instance too small: n = {n}, need at least {min}")]
    TooSmall { n: usize, min: usize },

    #[error("{oracle} refuses n = {n} (limit {limit})")]
    OracleGate {
        oracle: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("path table expansion for ({from}, {to}) exceeds {limit} arcs")]
    CorruptPathTable {
        from: usize,
        to: usize,
        limit: usize,
    },

    #[error("line {line}, column {column}: {message}")]
    MatrixParse {
        line: usize,
        column: usize,
        message: String,
    },
}
