//! Crate-wide error type.

use std::fmt;

/// Errors surfaced by sketches, stream processing, and the experiment lab.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A constructor argument is outside its documented domain.
    InvalidParameter(String),
    /// Two sketches cannot be combined (parameter or seed mismatch).
    Incompatible(&'static str),
    /// A vector index is outside the sketch universe.
    IndexOutOfRange { index: u64, universe: u64 },
    /// An edge endpoint is outside `[0, n)`.
    VertexOutOfRange { vertex: u64, n: u64 },
    /// Self-loops are not representable in the edge universe.
    SelfLoop(u64),
    /// Insert of a present edge, or delete of an absent edge.
    Multiplicity { insert: bool, u: u64, v: u64 },
    /// A stream-file or graph-file line failed to parse.
    Parse { line: usize, msg: String },
    /// The insert-only baseline saw a delete.
    UnsupportedOp(&'static str),
    /// A byte payload does not decode to a valid object.
    Format(String),
    /// Hard-distribution parameters fall outside the valid regime.
    Regime(String),
    /// A size schedule is non-increasing somewhere.
    Schedule(String),
    /// A graph family constraint on `n` is violated.
    Size(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Incompatible(msg) => write!(f, "incompatible sketches: {msg}"),
            Error::IndexOutOfRange { index, universe } => {
                write!(f, "index {index} outside universe of size {universe}")
            }
            Error::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} outside [0, {n})")
            }
            Error::SelfLoop(u) => write!(f, "self-loop at vertex {u}"),
            Error::Multiplicity { insert, u, v } => {
                if *insert {
                    write!(f, "insert of already-present edge ({u}, {v})")
                } else {
                    write!(f, "delete of absent edge ({u}, {v})")
                }
            }
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::UnsupportedOp(msg) => write!(f, "unsupported operation: {msg}"),
            Error::Format(msg) => write!(f, "malformed payload: {msg}"),
            Error::Regime(msg) => write!(f, "parameter regime error: {msg}"),
            Error::Schedule(msg) => write!(f, "schedule error: {msg}"),
            Error::Size(msg) => write!(f, "size error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
