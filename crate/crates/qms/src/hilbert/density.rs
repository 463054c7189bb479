use super::operator::SparseOperator;
use super::vector::StateVector;
use crate::freegroup::Word;
use nalgebra::SymmetricEigen;
use thiserror::Error;

/// Hermiticity tolerance for density validation.
const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of the support-restricted matrix.
const PSD_TOL: f64 = -1e-10;
/// Eigenvalues below this are treated as exactly zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DensityError {
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("operator has a negative eigenvalue ({0:.3e})")]
    NegativeEigenvalue(f64),
    #[error("operator trace is not strictly positive ({0:.3e})")]
    NonPositiveTrace(f64),
}

/// A validated quantum state: Hermitian, positive semi-definite, with finite
/// positive trace. The trace is *not* normalized to 1; several operations
/// treat trace loss as information.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: SparseOperator,
    trace: f64,
}

impl DensityOperator {
    /// Checks the state axioms on the support-restricted matrix.
    pub fn validate(op: SparseOperator) -> Result<DensityOperator, DensityError> {
        let herm_dev = op.max_abs_diff(&op.adjoint());
        if herm_dev > HERMITIAN_TOL {
            return Err(DensityError::NonHermitian(herm_dev));
        }
        let basis = op.support_words();
        if !basis.is_empty() {
            let eigen = SymmetricEigen::new(op.to_matrix(&basis));
            let min = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < PSD_TOL {
                return Err(DensityError::NegativeEigenvalue(min));
            }
        }
        let trace = op.trace().re;
        if trace <= 0.0 {
            return Err(DensityError::NonPositiveTrace(trace));
        }
        Ok(DensityOperator { op, trace })
    }

    /// The pure state ψ⊗ψ* (unnormalized; trace = ‖ψ‖²).
    pub fn pure(psi: &StateVector) -> Result<DensityOperator, DensityError> {
        DensityOperator::validate(SparseOperator::outer(psi, psi))
    }

    pub fn basis_state(x: &Word) -> DensityOperator {
        DensityOperator::pure(&StateVector::basis(x.clone())).expect("basis states are valid")
    }

    pub fn op(&self) -> &SparseOperator {
        &self.op
    }

    pub fn into_op(self) -> SparseOperator {
        self.op
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// Diagonal matrix element ⟨δ_x|ϱ δ_x⟩, the unnormalized weight of x.
    pub fn weight(&self, x: &Word) -> f64 {
        self.op.entry(x, x).re
    }

    pub fn support_words(&self) -> Vec<Word> {
        self.op.support_words()
    }

    /// Eigenvalues (floored at zero) with orthonormal eigenvectors over the
    /// support basis, sorted descending by eigenvalue.
    pub fn eigen(&self) -> Vec<(f64, StateVector)> {
        let basis = self.op.support_words();
        if basis.is_empty() {
            return Vec::new();
        }
        let eigen = SymmetricEigen::new(self.op.to_matrix(&basis));
        let mut pairs: Vec<(f64, StateVector)> = eigen
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &val)| {
                let col = eigen.eigenvectors.column(k);
                let vec = StateVector::from_terms(
                    basis.iter().cloned().zip(col.iter().copied()),
                );
                (if val.abs() < EIGENVALUE_FLOOR { 0.0 } else { val }, vec)
            })
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs
    }
}
