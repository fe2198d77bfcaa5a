use thiserror::Error;

/// Errors raised by graph validation, the strata algebra and the pairing code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is not connected")]
    NotConnected,
    #[error("vertex {0} violates 2g - 2 + n > 0")]
    UnstableVertex(usize),
    #[error("involution is not self-inverse at half-edge {0}")]
    InvolutionNotSelfInverse(usize),
    #[error("leg label {0} is used more than once")]
    LegLabelCollision(u32),
    #[error("fixed point {0} of the involution carries no leg label")]
    UnlabeledLeg(usize),
    #[error("half-edge {0} is labeled as a leg but is not a fixed point")]
    LegNotFixed(usize),
    #[error("leg labels must be exactly 1..={0}")]
    LegLabelsNotContiguous(usize),
    #[error("half-edge {0} refers to a missing vertex")]
    DanglingHalfEdge(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown half-edge {0}")]
    UnknownHalfEdge(usize),
    #[error("kappa index must be at least 1")]
    KappaZero,
    #[error("decoration vector has the wrong length")]
    DecorationShape,
    #[error("leg label sets differ")]
    LabelMismatch,
    #[error("total genera differ ({0} vs {1})")]
    GenusMismatch(u32, u32),
    #[error("operands live on different moduli spaces: (g, n) = {0:?} vs {1:?}")]
    SpaceMismatch((u32, u32), (u32, u32)),
    #[error("codimension {found} does not match top degree {expected}")]
    DimensionMismatch { expected: i64, found: i64 },
    #[error("relation is not homogeneous of codimension {0}")]
    DegreeMismatch(usize),
    #[error("gluing produced an unstable vertex")]
    UnstableResult,
    #[error("leg relabeling collides or is incomplete: {0}")]
    LabelCollision(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, StrataError>;
