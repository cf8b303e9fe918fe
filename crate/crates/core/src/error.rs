//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by algebra, module and kernel operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands belong to algebras with different block structures.
    #[error("algebra mismatch: left has blocks {left:?}, right has blocks {right:?}")]
    AlgebraMismatch { left: Vec<usize>, right: Vec<usize> },

    /// A vector or matrix has the wrong dimensions for the requested operation.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An element expected to be self-adjoint is not, beyond the tolerance.
    #[error("symmetry violation: ||b - b*|| = {residual:e} exceeds tolerance {tol:e}")]
    NotSelfAdjoint { residual: f64, tol: f64 },

    /// A superoperator fails the hermiticity-preservation test T(b*) = T(b)*.
    #[error("superoperator is not hermiticity-preserving: residual {residual:e}")]
    NotHermiticityPreserving { residual: f64 },

    /// A kernel fails the hermitian symmetry K^{s,s'}(b)* = K^{s',s}(b*).
    #[error("kernel is not hermitian symmetric: residual {residual:e}")]
    KernelNotSymmetric { residual: f64 },

    /// Kolmogorov decomposition requested for a kernel that is not
    /// completely positive definite.
    #[error("kernel is not completely positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotCpd { min_eigenvalue: f64 },

    /// A Gram matrix expected to be positive semidefinite has a genuinely
    /// negative eigenvalue.
    #[error("gram matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    GramNotPositive { eigenvalue: f64 },

    /// The reference label passed to a CE-split does not behave as a central
    /// unital row of the kernel.
    #[error("reference label not central: row residual {residual:e} for label '{label}'")]
    ReferenceNotCentral { label: String, residual: f64 },

    /// The CE-split produced a kernel part that is not completely positive
    /// definite. Whether such a kernel can still arise from a genuine product
    /// system is not decidable here; the kernel is reported, not repaired.
    #[error("not a CE-generator: split part fails complete positive definiteness (min eigenvalue {min_eigenvalue:e})")]
    NotCeGenerator { min_eigenvalue: f64 },

    /// A label was not found in a kernel's index set.
    #[error("unknown label '{0}'")]
    UnknownLabel(String),

    /// Duplicate label in a kernel's index set.
    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),

    /// Weights of a unit combination do not sum to one.
    #[error("weights sum to {sum} instead of 1 (residual {residual:e})")]
    WeightSum { sum: String, residual: f64 },

    /// A time tuple is empty, contains nonpositive entries, or is not
    /// strictly decreasing where required.
    #[error("invalid time tuple: {0}")]
    InvalidTimeTuple(String),

    /// A time parameter is negative or not finite.
    #[error("invalid time parameter {0}")]
    InvalidTime(f64),

    /// A stated precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A descriptor could not be converted into a value of the crate.
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
