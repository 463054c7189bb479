//! Quantum message space over the free group FG(2).
//!
//! The Hilbert space carries an orthonormal basis indexed by reduced words
//! over the alphabet {0,1,2,3}, where 2 and 3 are the inverses of the bit
//! letters 0 and 1. Appending a bit is the unitary right translation `V_a`,
//! which is what makes serial bit generation possible in this model.
//!
//! Modules:
//! - [`freegroup`]: exact word arithmetic, sphere enumeration, orbits.
//! - [`hilbert`]: sparse vectors and operators on ℓ²(FG(2)).
//! - [`predicate`]: decidable word sets backing spectral projectors.
//! - [`observables`]: the message/length/bit observables, measurements,
//!   entropies, and the maximum-entropy source.
//! - [`quantum_ops`]: quantum operations and operator-sum channels.
//! - [`protocols`]: memory cell, shift register, and the Alice/Bob pipeline.
//! - [`harmonic`]: the radial algebra, orthogonal polynomials, and the
//!   spectral calculus of the averaging operator A.
//! - [`boundary`]: the Poisson boundary, principal series, and the Fourier
//!   transform with its Plancherel identity.
//! - [`io`]: JSON/TSV wire formats shared with the CLI.

pub mod boundary;
pub mod freegroup;
pub mod harmonic;
pub mod hilbert;
pub mod io;
pub mod observables;
pub mod predicate;
pub mod protocols;
pub mod quantum_ops;

pub use freegroup::{Letter, Word};
pub use hilbert::{DensityOperator, LinOp, SparseOperator, StateVector};
pub use predicate::WordPredicate;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum QmsError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("protocol error: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, QmsError>;
