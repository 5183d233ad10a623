//! Exponential sums twisted by arithmetic functions, the bound envelopes they
//! are measured against, the zeta-zero explicit formula for the squarefree
//! partition generating function, and exact and asymptotic partition counts.
//!
//! Modules are layered bottom-up: [`arith`] sieves weights, [`expsum`] sums
//! them against additive characters, [`diophantine`] supplies rational
//! approximations and the arc dissection, [`bounds`] evaluates the envelopes,
//! [`zeta`] holds the special functions and the explicit formula, and
//! [`partitions`] counts partitions and runs the saddle point.

pub mod arith;
pub mod bounds;
pub mod diophantine;
pub mod expsum;
pub mod partitions;
pub mod summation;
pub mod zeta;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported arithmetic function `{0}`")]
    UnsupportedKind(String),
    #[error("table limit must be at least 1")]
    EmptyRange,
    #[error("table limits differ: {0} vs {1}")]
    LimitMismatch(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("alpha = {alpha} lies on {} overlapping major arcs, first {:?}", .arcs.len(), &.arcs[..arcs.len().min(4)])]
    ArcOverlap { alpha: f64, arcs: Vec<(i64, u64)> },
    #[error("root not bracketed in [{lo:e}, {hi:e}]")]
    NotBracketed { lo: f64, hi: f64 },
    #[error("tolerance not reached after {0} steps")]
    NoConvergence(usize),
    #[error("pole at s = {0}")]
    Pole(String),
    #[error("zeros table: {0}")]
    ZeroTable(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
