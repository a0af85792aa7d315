//! Shared error type.
//!
//! Every fallible operation in the crate returns [`enum@Error`]; the variants
//! mirror the failure modes of the individual modules (non-regular inputs,
//! size mismatches, enumeration and degree caps, parse failures, …).

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An edge/loop list does not describe a regular multigraph.
    #[error("vertex {vertex} has degree {found}, expected {expected}")]
    NonRegular {
        vertex: usize,
        found: usize,
        expected: usize,
    },

    /// A rotation map is not a fixed-point-free-on-loops involution.
    #[error("rotation map is not an involution at vertex {vertex}, port {port}")]
    NotInvolutive { vertex: usize, port: usize },

    /// Two graphs cannot be combined (e.g. zigzag needs |V₂| = deg G₁).
    #[error("incompatible sizes: {0}")]
    IncompatibleSizes(String),

    /// A product would allocate more ports than the configured cap.
    #[error("operation needs {needed} ports, exceeding the cap of {cap}")]
    DegreeCapExceeded { needed: u128, cap: u64 },

    /// Edge completion asked to *lower* the degree.
    #[error("target degree {target} is below the current degree {current}")]
    DegreeTooSmall { target: usize, current: usize },

    /// A claimed metric fails the triangle inequality.
    #[error("triangle inequality fails on points ({i},{j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },

    /// Exact enumeration would visit more assignment pairs than allowed.
    #[error("exact enumeration needs {needed} assignment pairs, above the cap of {cap}")]
    EnumerationTooLarge { needed: u128, cap: u128 },

    /// An operation requiring a connected graph got a disconnected one.
    #[error("graph is disconnected")]
    Disconnected,

    /// Quotient edge counts were not divisible by the subgroup order.
    #[error("not a Cayley quotient: {0}")]
    NotCayley(String),

    /// Rejection sampling exhausted its retry budget.
    #[error("no code with the requested parameters found within {attempts} attempts")]
    NoCodeFound { attempts: usize },

    /// An exhaustive pass over 2^k items is out of the supported range.
    #[error("exhaustive enumeration over 2^{k} items exceeds the supported range")]
    TooLarge { k: usize },

    /// A construction plan cannot be executed as stated.
    #[error("construction plan is infeasible: {0}")]
    PlanInfeasible(String),

    /// Truncation removed every generator.
    #[error("truncation removed every generator (weight cutoff {cutoff})")]
    EmptyTruncation { cutoff: usize },

    /// A text format failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Catch-all for malformed arguments.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Filesystem failure while reading or writing artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
