//! Numerical laboratory for spatial product systems of Hilbert bimodules
//! over finite-dimensional C*-algebras.
//!
//! The crate implements, at desk scale and with certified tolerances:
//!
//! * arithmetic and positivity in algebras B = ⊕_k M_{d_k}(ℂ) and the
//!   superoperator calculus on them ([`algebra`], [`superop`]);
//! * Hilbert B-B-modules with B-valued inner products, interior tensor
//!   products with null-space quotient, direct sums and centers
//!   ([`bimodule`]);
//! * completely positive definite kernels, their Kolmogorov decompositions,
//!   entrywise semigroups and Christensen-Evans splits ([`kernel`]);
//! * units of time-ordered Fock modules: closed-form and simplex-quadrature
//!   inner products, morphism matrices and automorphisms ([`units`]);
//! * the arithmetic mean and Trotter product of units with numerical
//!   convergence verification ([`trotter`]);
//! * the spatial product with additive index, projection morphisms and unit
//!   decomposition ([`product`]);
//! * the product system of a free flow: tuple decompositions, free-flow
//!   exponential units and the index computation ([`free_flow`]).
//!
//! Everything is immutable after construction; all operations are pure.
//!
//! # Example
//!
//! Inner products of units of the time-ordered system over F = M₂ come from
//! exponentiating the generator; the vacuum is unital at every horizon:
//!
//! ```
//! use prodsys::units::TimeOrderedSystem;
//! use prodsys::{Algebra, Bimodule};
//!
//! let algebra = Algebra::full_matrix(2);
//! let system = TimeOrderedSystem::new(Bimodule::free(&algebra, 1));
//! let vacuum = system.vacuum();
//! let b = algebra.basis_element(1);
//! let value = system.unit_inner(&vacuum, &vacuum, 1.5, &b)?;
//! assert!(value.distance(&b) < 1e-12);
//! # Ok::<(), prodsys::Error>(())
//! ```

// time guards are written `!(t >= 0.0)` so NaN inputs are rejected too;
// index loops over parallel matrix structures stay as plain ranges
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod bimodule;
pub mod error;
pub mod free_flow;
pub mod io;
pub mod kernel;
pub mod product;
pub mod sampling;
pub mod superop;
pub mod trotter;
pub mod units;

pub use algebra::{Algebra, AlgebraElement};
pub use bimodule::{BMatrix, Bimodule, DirectSum, ModuleVector, TensorPowers, TensorProduct};
pub use error::{Error, Result};
pub use kernel::{CeSplit, CpdKernel, KolmogorovDecomposition};
pub use superop::SuperOperator;
