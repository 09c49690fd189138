//! Numerical verification of interpolating Jensen-type operator inequalities
//! for log-convex and superquadratic functions under positive unital maps.
//!
//! The crate is layered bottom-up:
//!
//! * [`hermitian`]: dense Hermitian matrices, a Jacobi eigensolver,
//!   functional calculus and Loewner-order comparison.
//! * [`functions`]: scalar functions with declared classes and the scalar
//!   interpolation constants and checkers.
//! * [`maps`]: positive unital maps and unital families.
//! * [`forge`]: random instances satisfying each inequality's hypotheses.
//! * [`engine`]: chain compilation and evaluation, plus counterexample search.
//! * [`campaign`]: configuration-driven randomized campaigns and reports.

// `!(a < b)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod engine;
pub mod error;
pub mod forge;
pub mod functions;
pub mod hermitian;
pub mod maps;
pub mod matrix;
pub mod rng;

pub use error::{Error, Result};
pub use hermitian::HermitianMatrix;
