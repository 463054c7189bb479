use super::operator::SparseOperator;
use super::vector::{Complex64, StateVector};
use crate::freegroup::{Letter, Word};
use crate::predicate::WordPredicate;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// A symbolic operator on ℓ²(FG(2)).
///
/// Translations, reflection, multipliers, and convolutions act on the whole
/// (infinite) basis and are never materialized; finite-rank pieces live in a
/// [`SparseOperator`] block. Compositions apply right-to-left, matching
/// operator notation: `Compose([A, B])` is A∘B.
#[derive(Debug, Clone)]
pub enum LinOp {
    Identity,
    /// L_q: δ_x ↦ δ_{q·x}.
    LeftTranslate(Word),
    /// R_q: δ_x ↦ δ_{x·q⁻¹}.
    RightTranslate(Word),
    /// V(f)(x) = f(x⁻¹).
    Reflect,
    /// The spectral projector M(A): zeroes amplitudes outside the predicate.
    Project(WordPredicate),
    /// Unit-modulus multiplier e^{−2πi·n·cycles} on the length-n component.
    LengthPhase(f64),
    /// Left convolution f ↦ h⋆f.
    Convolve(StateVector),
    /// A finite-rank block.
    Finite(SparseOperator),
    Scale(Complex64, Box<LinOp>),
    Compose(Vec<LinOp>),
    Sum(Vec<LinOp>),
}

impl LinOp {
    /// The bit creation/annihilation unitary V_a = R_{a⁻¹}.
    pub fn append(a: Letter) -> LinOp {
        LinOp::RightTranslate(Word::from_letters([a.inv()]))
    }

    /// V_{a0}∘…∘V_{a_{n−1}} for a word: δ_Λ ↦ δ_x when x is positive.
    pub fn append_word(x: &Word) -> LinOp {
        let mut ops: Vec<LinOp> = x.letters().iter().map(|&l| LinOp::append(l)).collect();
        ops.reverse(); // rightmost factor acts first, so first letter appends first
        LinOp::Compose(ops)
    }

    pub fn scaled(self, c: Complex64) -> LinOp {
        LinOp::Scale(c, Box::new(self))
    }

    pub fn apply(&self, f: &StateVector) -> StateVector {
        match self {
            LinOp::Identity => f.clone(),
            LinOp::LeftTranslate(q) => f.translate_left(q),
            LinOp::RightTranslate(q) => f.translate_right(q),
            LinOp::Reflect => f.reflect(),
            LinOp::Project(pred) => StateVector::from_terms(
                f.iter()
                    .filter(|(x, _)| pred.contains(x))
                    .map(|(x, c)| (x.clone(), *c)),
            ),
            LinOp::LengthPhase(cycles) => StateVector::from_terms(f.iter().map(|(x, c)| {
                let phase = Complex64::from_polar(1.0, -TAU * (x.len() as f64) * cycles);
                (x.clone(), c * phase)
            })),
            LinOp::Convolve(h) => h.convolve(f),
            LinOp::Finite(op) => op.apply(f),
            LinOp::Scale(c, op) => op.apply(f).scale(*c),
            LinOp::Compose(ops) => ops
                .iter()
                .rev()
                .fold(f.clone(), |acc, op| op.apply(&acc)),
            LinOp::Sum(ops) => ops
                .iter()
                .fold(StateVector::zero(), |acc, op| &acc + &op.apply(f)),
        }
    }

    pub fn adjoint(&self) -> LinOp {
        match self {
            LinOp::Identity => LinOp::Identity,
            LinOp::LeftTranslate(q) => LinOp::LeftTranslate(q.inv()),
            LinOp::RightTranslate(q) => LinOp::RightTranslate(q.inv()),
            LinOp::Reflect => LinOp::Reflect,
            LinOp::Project(p) => LinOp::Project(p.clone()),
            LinOp::LengthPhase(c) => LinOp::LengthPhase(-c),
            LinOp::Convolve(h) => LinOp::Convolve(h.star()),
            LinOp::Finite(op) => LinOp::Finite(op.adjoint()),
            LinOp::Scale(c, op) => LinOp::Scale(c.conj(), Box::new(op.adjoint())),
            LinOp::Compose(ops) => {
                LinOp::Compose(ops.iter().rev().map(|op| op.adjoint()).collect())
            }
            LinOp::Sum(ops) => LinOp::Sum(ops.iter().map(|op| op.adjoint()).collect()),
        }
    }

    /// Conjugation ϱ ↦ A ϱ A* in one pass, via A(δ_x)⊗A(δ_y)* on entries.
    pub fn conjugate(&self, rho: &SparseOperator) -> SparseOperator {
        let mut image: BTreeMap<Word, StateVector> = BTreeMap::new();
        let mut out = SparseOperator::zero();
        for ((x, y), c) in rho.iter() {
            for k in [x, y] {
                image
                    .entry(k.clone())
                    .or_insert_with(|| self.apply(&StateVector::basis(k.clone())));
            }
            let term = SparseOperator::outer(&image[x], &image[y]).scale(*c);
            out = &out + &term;
        }
        out
    }

    /// Checks ⟨Aδ_x|Aδ_y⟩ = ⟨δ_x|δ_y⟩ for every pair in `words`.
    pub fn is_isometry_on(&self, words: &[Word], tol: f64) -> bool {
        let images: Vec<StateVector> = words
            .iter()
            .map(|x| self.apply(&StateVector::basis(x.clone())))
            .collect();
        for (i, fi) in images.iter().enumerate() {
            for (j, fj) in images.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (fi.inner(fj) - Complex64::new(expected, 0.0)).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}
