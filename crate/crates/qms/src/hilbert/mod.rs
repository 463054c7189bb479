//! Sparse linear algebra on ℓ²(FG(2)).
//!
//! Vectors and finite-rank operators are stored as ordered maps keyed by
//! words, so every reduction over a support runs in a deterministic order.
//! Infinite unitaries (translations, reflection, multipliers, convolutions)
//! are kept symbolic as [`LinOp`] expressions and applied lazily.

mod density;
mod linop;
mod operator;
mod vector;

pub use density::{DensityError, DensityOperator};
pub use linop::LinOp;
pub use operator::SparseOperator;
pub use vector::{Complex64, StateVector, PRUNE_EPS};
