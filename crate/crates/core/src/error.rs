use thiserror::Error;

/// Errors surfaced by the toolkit.  The CLI maps every variant to exit code 1
/// with the variant name in the output.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Parameter in a band around a degenerate member of the family
    /// (k = 1 splits the cubic, k = 0 has no Hessian parameter).
    #[error("DegenerateParameter: k = {0} is inside the degenerate band")]
    DegenerateParameter(f64),

    /// Input outside the regime an operation is defined for.
    #[error("DomainError: {0}")]
    DomainError(String),

    /// A conic did not have the rank the operation requires.
    #[error("RankError: expected rank 2, got rank {0}")]
    RankError(usize),

    /// Point not on the Hessian curve to tolerance.
    #[error("NotOnHessian: |H| = {0:.3e} after normalization")]
    NotOnHessian(f64),

    /// Point not on the curve of a group-law context.
    #[error("NotOnCurve: |form| = {0:.3e} after normalization")]
    NotOnCurve(f64),

    /// Point not on the boundary of the queried cone component.
    #[error("NotOnBoundary")]
    NotOnBoundary,

    /// Branch label not valid for the regime of k.
    #[error("UnknownBranch: {0}")]
    UnknownBranch(String),

    /// Two input points span no line.
    #[error("IdenticalPoints")]
    IdenticalPoints,

    /// A sign certificate the operation relies on failed on samples.
    #[error("HypothesisFailed: {0}")]
    HypothesisFailed(String),

    /// Iterative solver did not reach the requested residual.
    #[error("NoConvergence: residual {0:.3e}")]
    NoConvergence(f64),

    /// Affine classification asked for a point on the line at infinity.
    #[error("AtInfinity")]
    AtInfinity,

    /// Malformed input (bad coefficient count, zero vector, unknown name).
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}
