//! Error type shared across the crate.

use core::fmt;

use crate::graphs::EdgeIndex;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Vertex labels do not name an edge: requires `1 <= i < j <= n`.
    InvalidEdge { i: u32, j: u32, n: u32 },
    /// Two graphs (or a graph and a model) disagree on the vertex count.
    VertexCountMismatch { left: u32, right: u32 },
    /// Exhaustive graph-space work was requested above the configured cap.
    EnumerationCapExceeded { n: u32, cap: u32 },
    /// A model or mechanism parameter is outside its documented domain.
    InvalidParameter { what: &'static str },
    /// A probability table is unusable (wrong length, negative entry, zero mass).
    InvalidDistribution { what: &'static str },
    /// Conditioning event has probability zero under the distribution.
    ZeroProbabilityEvent,
    /// An edge secret is degenerate: the edge is present with probability 0 or 1.
    DegenerateSecret { edge: EdgeIndex },
    /// Two output laws live on alphabets of different sizes.
    AlphabetMismatch { left: usize, right: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidEdge { i, j, n } => {
                write!(f, "invalid edge ({i}, {j}) on {n} vertices: need 1 <= i < j <= n")
            }
            Error::VertexCountMismatch { left, right } => {
                write!(f, "vertex count mismatch: {left} vs {right}")
            }
            Error::EnumerationCapExceeded { n, cap } => {
                write!(f, "graph enumeration on n = {n} vertices exceeds the cap n <= {cap}")
            }
            Error::InvalidParameter { what } => write!(f, "invalid parameter: {what}"),
            Error::InvalidDistribution { what } => write!(f, "invalid distribution: {what}"),
            Error::ZeroProbabilityEvent => write!(f, "conditioning event has probability zero"),
            Error::DegenerateSecret { edge } => {
                write!(f, "degenerate secret: edge {edge} present with probability 0 or 1")
            }
            Error::AlphabetMismatch { left, right } => {
                write!(f, "output alphabet mismatch: {left} vs {right} symbols")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
