use crate::freegroup::{Letter, Word};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

pub use num_complex::Complex64;

/// Amplitudes with modulus at or below this are dropped after arithmetic.
pub const PRUNE_EPS: f64 = 1e-14;

/// A finitely supported complex function on FG(2); an element of ℓ²(FG(2)).
///
/// Absent words carry amplitude 0. Stored amplitudes are nonzero above
/// [`PRUNE_EPS`], so supports stay finite and equality checks stay honest.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateVector {
    amplitudes: BTreeMap<Word, Complex64>,
}

impl StateVector {
    pub fn zero() -> StateVector {
        StateVector::default()
    }

    /// The basis vector δ_x.
    pub fn basis(x: Word) -> StateVector {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(x, Complex64::new(1.0, 0.0));
        StateVector { amplitudes }
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Complex64)>>(terms: I) -> StateVector {
        let mut out = StateVector::zero();
        for (x, c) in terms {
            out.add_assign_term(&x, c);
        }
        out.prune();
        out
    }

    pub fn amplitude(&self, x: &Word) -> Complex64 {
        self.amplitudes
            .get(x)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Word> {
        self.amplitudes.keys()
    }

    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Longest word in the support.
    pub fn max_word_len(&self) -> usize {
        self.amplitudes.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    fn add_assign_term(&mut self, x: &Word, c: Complex64) {
        let entry = self
            .amplitudes
            .entry(x.clone())
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, c| c.norm() > PRUNE_EPS);
    }

    pub fn scale(&self, c: Complex64) -> StateVector {
        let mut out = self.clone();
        for v in out.amplitudes.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    /// Bilinear pairing ⟨f,g⟩ = Σ f(x)g(x), no conjugation.
    pub fn pairing(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .map(|(x, c)| c * other.amplitude(x))
            .sum()
    }

    /// Hilbert inner product ⟨f|g⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .map(|(x, c)| c.conj() * other.amplitude(x))
            .sum()
    }

    pub fn norm_l1(&self) -> f64 {
        self.amplitudes.values().map(|c| c.norm()).sum()
    }

    pub fn norm_l2_sq(&self) -> f64 {
        self.amplitudes.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_l2_sq().sqrt()
    }

    pub fn norm_linf(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// The star involution f^⋆(x) = conj(f(x⁻¹)).
    pub fn star(&self) -> StateVector {
        StateVector::from_terms(self.amplitudes.iter().map(|(x, c)| (x.inv(), c.conj())))
    }

    /// Convolution (f⋆g)(x) = Σ_{y·z=x} f(y)g(z), by the double support loop.
    pub fn convolve(&self, other: &StateVector) -> StateVector {
        let mut out = StateVector::zero();
        for (y, a) in &self.amplitudes {
            for (z, b) in &other.amplitudes {
                out.add_assign_term(&y.mul(z), a * b);
            }
        }
        out.prune();
        out
    }

    /// Left translation (L_q f)(x) = f(q⁻¹x); moves δ_x to δ_{q·x}.
    pub fn translate_left(&self, q: &Word) -> StateVector {
        StateVector::from_terms(self.amplitudes.iter().map(|(x, c)| (q.mul(x), *c)))
    }

    /// Right translation (R_q f)(x) = f(xq); moves δ_x to δ_{x·q⁻¹}.
    pub fn translate_right(&self, q: &Word) -> StateVector {
        let qi = q.inv();
        StateVector::from_terms(self.amplitudes.iter().map(|(x, c)| (x.mul(&qi), *c)))
    }

    /// The bit-appending unitary V_a = R_{a⁻¹}: maps δ_x to δ_{x·a}.
    pub fn append(&self, a: Letter) -> StateVector {
        let a = Word::from_letters([a]);
        StateVector::from_terms(self.amplitudes.iter().map(|(x, c)| (x.mul(&a), *c)))
    }

    /// The reflection V(f)(x) = f(x⁻¹).
    pub fn reflect(&self) -> StateVector {
        StateVector::from_terms(self.amplitudes.iter().map(|(x, c)| (x.inv(), *c)))
    }

    /// Maximum absolute difference of amplitudes over the joint support.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        let mut worst: f64 = 0.0;
        for x in self.support().chain(other.support()) {
            worst = worst.max((self.amplitude(x) - other.amplitude(x)).norm());
        }
        worst
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, other: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (x, c) in &other.amplitudes {
            out.add_assign_term(x, *c);
        }
        out.prune();
        out
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, other: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (x, c) in &other.amplitudes {
            out.add_assign_term(x, -c);
        }
        out.prune();
        out
    }
}

impl Neg for &StateVector {
    type Output = StateVector;
    fn neg(self) -> StateVector {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &StateVector {
    type Output = StateVector;
    fn mul(self, c: Complex64) -> StateVector {
        self.scale(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::ball;
    use approx::assert_abs_diff_eq;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn delta(s: &str) -> StateVector {
        StateVector::basis(w(s))
    }

    /// Deterministic pseudo-random vector supported in the given ball.
    fn random_vector(radius: usize, seed: u64) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        StateVector::from_terms(ball(radius).unwrap().into_iter().map(|x| {
            (
                x,
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        }))
    }

    #[test]
    fn inner_products_and_norms() {
        assert_eq!(delta("01").inner(&delta("01")), c(1.0, 0.0));
        assert_eq!(delta("01").inner(&delta("10")), c(0.0, 0.0));
        let f = &delta("e") + &delta("0").scale(c(0.0, 1.0));
        assert_abs_diff_eq!(f.norm_l2_sq(), 2.0);
        assert_abs_diff_eq!(f.norm_l1(), 2.0);
        assert_abs_diff_eq!(f.norm_linf(), 1.0);
    }

    #[test]
    fn pairing_is_translation_invariant() {
        let f = random_vector(2, 1);
        let g = random_vector(2, 2);
        let base = f.pairing(&g);
        for q in ["0", "13", "201"] {
            let q = w(q);
            let moved = f.translate_left(&q).pairing(&g.translate_left(&q));
            assert_abs_diff_eq!(moved.re, base.re, epsilon = 1e-12);
            assert_abs_diff_eq!(moved.im, base.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn star_is_involutive() {
        let f = random_vector(2, 3);
        assert!(f.star().star().max_abs_diff(&f) < 1e-15);
        let s = delta("013").scale(c(2.0, -1.0)).star();
        assert_eq!(s.amplitude(&w("013").inv()), c(2.0, 1.0));
    }

    #[test]
    fn star_convolve_at_identity_is_norm() {
        let f = random_vector(2, 4);
        let v = f.star().convolve(&f);
        let at_id = v.amplitude(&Word::identity());
        assert_abs_diff_eq!(at_id.re, f.norm_l2_sq(), epsilon = 1e-12);
        assert_abs_diff_eq!(at_id.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn convolution_sample_from_positive_messages() {
        // (−1|0⟩ + 3|00⟩ − i|10⟩) ⋆ (|Λ⟩ + |1⟩ + |01⟩)
        let f = StateVector::from_terms([
            (w("0"), c(-1.0, 0.0)),
            (w("00"), c(3.0, 0.0)),
            (w("10"), c(0.0, -1.0)),
        ]);
        let g = StateVector::from_terms([
            (w("e"), c(1.0, 0.0)),
            (w("1"), c(1.0, 0.0)),
            (w("01"), c(1.0, 0.0)),
        ]);
        let expected = StateVector::from_terms([
            (w("0"), c(-1.0, 0.0)),
            (w("00"), c(3.0, 0.0)),
            (w("10"), c(0.0, -1.0)),
            (w("01"), c(-1.0, 0.0)),
            (w("001"), c(2.0, 0.0)),
            (w("101"), c(0.0, -1.0)),
            (w("0001"), c(3.0, 0.0)),
            (w("1001"), c(0.0, -1.0)),
        ]);
        assert!(f.convolve(&g).max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn convolution_identities() {
        let f = random_vector(2, 5);
        assert!(delta("e").convolve(&f).max_abs_diff(&f) < 1e-15);
        assert_eq!(delta("01").convolve(&delta("12")), delta("0112"));
        // δ_x ⋆ δ_y = δ_{x·y} with cancellation
        assert_eq!(delta("01").convolve(&delta("32")), delta("e"));
    }

    #[test]
    fn convolution_associativity_random() {
        let f = random_vector(2, 6);
        let g = random_vector(2, 7);
        let h = random_vector(2, 8);
        let lhs = f.convolve(&g).convolve(&h);
        let rhs = f.convolve(&g.convolve(&h));
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn star_antihomomorphism() {
        let f = random_vector(2, 9);
        let g = random_vector(2, 10);
        let lhs = f.convolve(&g).star();
        let rhs = g.star().convolve(&f.star());
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn translations_are_unitary_and_commute() {
        let f = random_vector(2, 11);
        let p = w("013");
        let q = w("20");
        assert_abs_diff_eq!(f.translate_left(&q).norm_l2(), f.norm_l2(), epsilon = 1e-12);
        assert_abs_diff_eq!(f.translate_right(&q).norm_l2(), f.norm_l2(), epsilon = 1e-12);
        let lr = f.translate_right(&q).translate_left(&p);
        let rl = f.translate_left(&p).translate_right(&q);
        assert!(lr.max_abs_diff(&rl) < 1e-15);
    }

    #[test]
    fn append_and_translate_on_basis_states() {
        // V_0(δ_001) = δ_0010
        assert_eq!(delta("001").append(Letter::new(0).unwrap()), delta("0010"));
        // L_q δ_x = δ_{q·x}
        assert_eq!(delta("12").translate_left(&w("0")), delta("012"));
    }

    #[test]
    fn append_then_erase_is_identity() {
        let f = random_vector(3, 12);
        for a in 0..4u8 {
            let a = Letter::new(a).unwrap();
            let back = f.append(a).append(a.inv());
            assert!(back.max_abs_diff(&f) < 1e-15);
        }
    }

    #[test]
    fn reflection_conjugates_translations() {
        let f = random_vector(2, 13);
        assert_eq!(delta("013").reflect(), delta(&w("013").inv().to_string()));
        assert!(f.reflect().reflect().max_abs_diff(&f) < 1e-15);
        for a in ["0", "31"] {
            let a = w(a);
            let lhs = f.reflect().translate_left(&a).reflect();
            let rhs = f.translate_right(&a);
            assert!(lhs.max_abs_diff(&rhs) < 1e-15, "V L_a V = R_a for a={a}");
        }
    }

    #[test]
    fn left_convolution_commutes_with_right_translation() {
        let h = random_vector(2, 14);
        let f = random_vector(2, 15);
        for q in ["1", "03", "220"] {
            let q = w(q);
            let lhs = h.convolve(&f.translate_right(&q));
            let rhs = h.convolve(&f).translate_right(&q);
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }
}
