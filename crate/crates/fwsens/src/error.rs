//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the geometry, oracle and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector or matrix had a different length/shape than the context requires.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// Matrix construction received ragged rows or no data at all.
    #[error("invalid matrix shape: {0}")]
    InvalidShape(String),

    /// An input contained NaN or an infinity.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The constraint system `Az <= b` has no feasible point.
    #[error("the polytope is empty (no point satisfies all constraints)")]
    Infeasible,

    /// The linear program has no finite minimum (or the feasible set has no
    /// vertex, which violates the compactness assumption).
    #[error("the linear program is unbounded over the feasible set")]
    Unbounded,

    /// A pivot or linear solve fell below the numerical tolerance.
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(&'static str),

    /// Exhaustive enumeration was requested for an instance above the guard.
    #[error("instance too large for exhaustive enumeration: requires dimension <= {max_dim} and rows <= {max_rows}, got {dim}x{rows}")]
    SizeGuard {
        dim: usize,
        rows: usize,
        max_dim: usize,
        max_rows: usize,
    },

    /// A point that must lie in the polytope does not.
    #[error("point violates the constraints by more than the tolerance (worst row {row}, violation {violation})")]
    InfeasiblePoint { row: usize, violation: f64 },

    /// The objective is not positive semidefinite within tolerance.
    #[error("quadratic term is not positive semidefinite (smallest eigenvalue {min_eigenvalue})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// Solver configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    /// The requested step rule needs an exact line search the objective does
    /// not provide.
    #[error("objective does not support exact line search; configure the open-loop step rule instead")]
    LineSearchUnavailable,
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
