use super::vector::{Complex64, StateVector, PRUNE_EPS};
use crate::freegroup::Word;
use nalgebra::DMatrix;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Sub};

/// A finitely supported operator Σ entries[x,y] · δ_x⊗δ_y*.
///
/// `entries[x,y]` is the matrix element ⟨δ_x|T δ_y⟩; applying the operator to
/// δ_y reads off column y.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseOperator {
    entries: BTreeMap<(Word, Word), Complex64>,
}

impl SparseOperator {
    pub fn zero() -> SparseOperator {
        SparseOperator::default()
    }

    pub fn identity_on<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> SparseOperator {
        SparseOperator {
            entries: words
                .into_iter()
                .map(|x| ((x.clone(), x.clone()), Complex64::new(1.0, 0.0)))
                .collect(),
        }
    }

    /// The rank-one operator α⊗β*: φ ↦ ⟨β|φ⟩ α.
    pub fn outer(alpha: &StateVector, beta: &StateVector) -> SparseOperator {
        let mut out = SparseOperator::zero();
        for (x, a) in alpha.iter() {
            for (y, b) in beta.iter() {
                out.add_assign_entry(x, y, a * b.conj());
            }
        }
        out.prune();
        out
    }

    pub fn from_entries<I: IntoIterator<Item = (Word, Word, Complex64)>>(
        entries: I,
    ) -> SparseOperator {
        let mut out = SparseOperator::zero();
        for (x, y, c) in entries {
            out.add_assign_entry(&x, &y, c);
        }
        out.prune();
        out
    }

    fn add_assign_entry(&mut self, x: &Word, y: &Word, c: Complex64) {
        let e = self
            .entries
            .entry((x.clone(), y.clone()))
            .or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    fn prune(&mut self) {
        self.entries.retain(|_, c| c.norm() > PRUNE_EPS);
    }

    pub fn entry(&self, x: &Word, y: &Word) -> Complex64 {
        self.entries
            .get(&(x.clone(), y.clone()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Word, Word), &Complex64)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> SparseOperator {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    pub fn adjoint(&self) -> SparseOperator {
        SparseOperator {
            entries: self
                .entries
                .iter()
                .map(|((x, y), c)| ((y.clone(), x.clone()), c.conj()))
                .collect(),
        }
    }

    pub fn apply(&self, f: &StateVector) -> StateVector {
        StateVector::from_terms(
            self.entries
                .iter()
                .map(|((x, y), c)| (x.clone(), c * f.amplitude(y))),
        )
    }

    pub fn compose(&self, other: &SparseOperator) -> SparseOperator {
        // group other's entries by row so the join stays near-linear
        let mut by_row: BTreeMap<&Word, Vec<(&Word, Complex64)>> = BTreeMap::new();
        for ((x, y), c) in &other.entries {
            by_row.entry(x).or_default().push((y, *c));
        }
        let mut out = SparseOperator::zero();
        for ((x, y), a) in &self.entries {
            if let Some(cols) = by_row.get(y) {
                for (z, b) in cols {
                    out.add_assign_entry(x, z, a * b);
                }
            }
        }
        out.prune();
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.entries
            .iter()
            .filter(|((x, y), _)| x == y)
            .map(|(_, c)| c)
            .sum()
    }

    /// Hilbert-Schmidt inner product Trace(A* B).
    pub fn hs_inner(&self, other: &SparseOperator) -> Complex64 {
        self.entries
            .iter()
            .map(|(k, a)| a.conj() * other.entries.get(k).copied().unwrap_or_default())
            .sum()
    }

    pub fn hs_norm_sq(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum()
    }

    /// All words appearing as a row or column index, in order.
    pub fn support_words(&self) -> Vec<Word> {
        let mut set = BTreeSet::new();
        for (x, y) in self.entries.keys() {
            set.insert(x.clone());
            set.insert(y.clone());
        }
        set.into_iter().collect()
    }

    /// Dense matrix in the given basis order.
    pub fn to_matrix(&self, basis: &[Word]) -> DMatrix<Complex64> {
        let index: BTreeMap<&Word, usize> = basis.iter().zip(0..).collect();
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for ((x, y), c) in &self.entries {
            if let (Some(&i), Some(&j)) = (index.get(x), index.get(y)) {
                m[(i, j)] = *c;
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &SparseOperator) -> f64 {
        let mut worst: f64 = 0.0;
        for k in self.entries.keys().chain(other.entries.keys()) {
            let a = self.entries.get(k).copied().unwrap_or_default();
            let b = other.entries.get(k).copied().unwrap_or_default();
            worst = worst.max((a - b).norm());
        }
        worst
    }
}

impl Add for &SparseOperator {
    type Output = SparseOperator;
    fn add(self, other: &SparseOperator) -> SparseOperator {
        let mut out = self.clone();
        for ((x, y), c) in &other.entries {
            out.add_assign_entry(x, y, *c);
        }
        out.prune();
        out
    }
}

impl Sub for &SparseOperator {
    type Output = SparseOperator;
    fn sub(self, other: &SparseOperator) -> SparseOperator {
        let mut out = self.clone();
        for ((x, y), c) in &other.entries {
            out.add_assign_entry(x, y, -c);
        }
        out.prune();
        out
    }
}
