//! Quantum operations and operator-sum channels.
//!
//! An operation F is strictly positive and non-trace-increasing; the trace it
//! discards is information lost by the system. The four constructors are
//! 𝒦(U)ϱ = UϱU*, 𝒬(P)ϱ = PϱP, the dephasing 𝒯(P) = 𝒬(P) + 𝒬(I−P), and the
//! measured switch 𝒯(U,P)ϱ = Σ_j U_j P_j ϱ P_j U_j*. A [`Channel`] is an
//! operator sum ℰ(τ) = Σ_j O_j τ O_j* whose completeness Σ O_j*O_j = I is
//! verified on the basis of a declared validation ball.

use crate::freegroup::{ball, Word};
use crate::hilbert::{DensityOperator, LinOp, SparseOperator, StateVector};
use crate::predicate::WordPredicate;
use crate::{QmsError, Result};
use rand::Rng;

/// Tolerance for channel completeness and trace preservation.
const CHANNEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum QuantumOperation {
    /// 𝒦(U): conjugation by a unitary.
    Conjugate(LinOp),
    /// 𝒬(P): both-sided projection by M(A).
    Project(WordPredicate),
    /// 𝒯(P) = 𝒬(P) + 𝒬(I−P): trace-preserving dephasing.
    Dephase(WordPredicate),
    /// 𝒯(U,P) = Σ_j U_j P_j ϱ P_j U_j*; the P_j should resolve the identity.
    Switch(Vec<(LinOp, WordPredicate)>),
}

impl QuantumOperation {
    /// The Kraus decomposition of the operation.
    pub fn kraus_ops(&self) -> Vec<LinOp> {
        match self {
            QuantumOperation::Conjugate(u) => vec![u.clone()],
            QuantumOperation::Project(p) => vec![LinOp::Project(p.clone())],
            QuantumOperation::Dephase(p) => vec![
                LinOp::Project(p.clone()),
                LinOp::Project(p.clone().complement()),
            ],
            QuantumOperation::Switch(pairs) => pairs
                .iter()
                .map(|(u, p)| LinOp::Compose(vec![u.clone(), LinOp::Project(p.clone())]))
                .collect(),
        }
    }

    pub fn apply_op(&self, rho: &SparseOperator) -> SparseOperator {
        self.kraus_ops()
            .iter()
            .fold(SparseOperator::zero(), |acc, k| &acc + &k.conjugate(rho))
    }
}

/// The outcome of a quantum operation. A zero-trace result is not an error:
/// 𝒬 legitimately annihilates states, so impossibility is a flag.
#[derive(Debug, Clone)]
pub struct OperationResult {
    pub state: Option<DensityOperator>,
    pub trace_before: f64,
    pub trace_after: f64,
}

impl OperationResult {
    pub fn is_impossible(&self) -> bool {
        self.state.is_none()
    }

    /// −log₂ of the trace ratio; nonnegative for every operation.
    pub fn information_loss(&self) -> f64 {
        if self.trace_after <= 0.0 {
            f64::INFINITY
        } else {
            -(self.trace_after / self.trace_before).log2()
        }
    }
}

pub fn apply_quantum_operation(
    op: &QuantumOperation,
    rho: &DensityOperator,
) -> Result<OperationResult> {
    let out = op.apply_op(rho.op());
    let trace_after = out.trace().re;
    let state = if out.is_zero() || trace_after <= 0.0 {
        None
    } else {
        Some(DensityOperator::validate(out).map_err(|e| {
            QmsError::Validation(format!("operation output failed validation: {e}"))
        })?)
    };
    Ok(OperationResult {
        state,
        trace_before: rho.trace(),
        trace_after: trace_after.max(0.0),
    })
}

/// An operator-sum channel validated on a declared ball.
#[derive(Debug, Clone)]
pub struct Channel {
    kraus: Vec<LinOp>,
    validation_radius: usize,
}

impl Channel {
    /// Builds a channel, checking Σ ⟨O_jδ_x|O_jδ_y⟩ = ⟨δ_x|δ_y⟩ for every
    /// pair of basis words in the validation ball.
    pub fn new(kraus: Vec<LinOp>, validation_radius: usize) -> Result<Channel> {
        if kraus.is_empty() {
            return Err(QmsError::Validation("channel needs a Kraus term".into()));
        }
        let words = ball(validation_radius)?;
        let images: Vec<Vec<StateVector>> = kraus
            .iter()
            .map(|k| {
                words
                    .iter()
                    .map(|x| k.apply(&StateVector::basis(x.clone())))
                    .collect()
            })
            .collect();
        for (i, x) in words.iter().enumerate() {
            for (j, y) in words.iter().enumerate() {
                let gram: num_complex::Complex64 =
                    images.iter().map(|im| im[i].inner(&im[j])).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (gram - expected).norm() > CHANNEL_TOL {
                    return Err(QmsError::Validation(format!(
                        "Kraus completeness fails at ({x}, {y}): Σ⟨O δ_x|O δ_y⟩ = {gram}"
                    )));
                }
            }
        }
        Ok(Channel {
            kraus,
            validation_radius,
        })
    }

    pub fn kraus(&self) -> &[LinOp] {
        &self.kraus
    }

    pub fn validation_radius(&self) -> usize {
        self.validation_radius
    }

    fn check_support(&self, words: &[Word]) -> Result<()> {
        if let Some(x) = words.iter().find(|x| x.len() > self.validation_radius) {
            return Err(QmsError::Budget(format!(
                "state support {x} escapes the validation ball of radius {}",
                self.validation_radius
            )));
        }
        Ok(())
    }

    pub fn apply_op(&self, tau: &SparseOperator) -> SparseOperator {
        self.kraus
            .iter()
            .fold(SparseOperator::zero(), |acc, k| &acc + &k.conjugate(tau))
    }

    /// ℰ(ϱ) = Σ_j O_j ϱ O_j*; preserves the trace within tolerance.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_support(&rho.support_words())?;
        let out = self.apply_op(rho.op());
        let drift = (out.trace().re - rho.trace()).abs();
        if drift > CHANNEL_TOL * rho.trace() {
            return Err(QmsError::Validation(format!(
                "channel failed to preserve trace (drift {drift:.3e})"
            )));
        }
        DensityOperator::validate(out)
            .map_err(|e| QmsError::Validation(format!("channel output failed validation: {e}")))
    }
}

/// Eq 10: the probability that the sent message survives encoding by G,
/// transmission through ℰ, and decoding, when the message is drawn from the
/// diagonal of ϱ.
///
/// Σ_z Pr(z|ϱ) ⟨Gδ_z| ℰ(Gδ_z⊗(Gδ_z)*) |Gδ_z⟩ with Pr(z|ϱ) = ⟨δ_z|ϱδ_z⟩/tr ϱ.
pub fn success_probability(
    g: &LinOp,
    channel: &Channel,
    rho: &DensityOperator,
    ball_radius: usize,
) -> Result<f64> {
    let support = rho.support_words();
    if let Some(x) = support.iter().find(|x| x.len() > ball_radius) {
        return Err(QmsError::Precondition(format!(
            "state support {x} escapes the declared ball of radius {ball_radius}"
        )));
    }
    let trace = rho.trace();
    let mut total = 0.0;
    for z in support {
        let pr = rho.weight(&z) / trace;
        if pr <= 0.0 {
            continue;
        }
        let encoded = g.apply(&StateVector::basis(z));
        let sent = SparseOperator::outer(&encoded, &encoded);
        let received = channel.apply_op(&sent);
        total += pr * encoded.inner(&received.apply(&encoded)).re;
    }
    Ok(total)
}

/// Monte-Carlo estimate of [`success_probability`]: draws a message from the
/// diagonal of ϱ, pushes the pure encoded state through the channel, and
/// scores a Bernoulli success with the fidelity as its parameter.
pub fn success_probability_monte_carlo<R: Rng>(
    g: &LinOp,
    channel: &Channel,
    rho: &DensityOperator,
    trials: usize,
    rng: &mut R,
) -> f64 {
    let support = rho.support_words();
    let trace = rho.trace();
    let weights: Vec<(Word, f64)> = support
        .iter()
        .map(|x| (x.clone(), rho.weight(x) / trace))
        .collect();
    let mut successes = 0usize;
    for _ in 0..trials {
        let mut u = rng.gen_range(0.0..1.0);
        let mut chosen = weights.last().expect("nonempty support").0.clone();
        for (x, p) in &weights {
            u -= p;
            if u <= 0.0 {
                chosen = x.clone();
                break;
            }
        }
        let encoded = g.apply(&StateVector::basis(chosen));
        let received = channel.apply_op(&SparseOperator::outer(&encoded, &encoded));
        let fidelity = encoded.inner(&received.apply(&encoded)).re.clamp(0.0, 1.0);
        if rng.gen_range(0.0..1.0) < fidelity {
            successes += 1;
        }
    }
    successes as f64 / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::Letter;
    use crate::hilbert::Complex64;
    use crate::observables::{length_blocks, length_dephase};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn delta(s: &str) -> StateVector {
        StateVector::basis(w(s))
    }

    fn letter(v: u8) -> Letter {
        Letter::new(v).unwrap()
    }

    fn random_density(radius: usize, seed: u64) -> DensityOperator {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let words = ball(radius).unwrap();
        let mut op = SparseOperator::zero();
        for _ in 0..3 {
            let v = StateVector::from_terms(words.iter().map(|x| {
                (
                    x.clone(),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            }));
            op = &op + &SparseOperator::outer(&v, &v);
        }
        DensityOperator::validate(op).unwrap()
    }

    #[test]
    fn conjugation_moves_basis_states() {
        // 𝒦(V_a)(δ_x⊗δ_x*) = δ_{x·a}⊗δ_{x·a}*
        let op = QuantumOperation::Conjugate(LinOp::append(letter(0)));
        let out = apply_quantum_operation(&op, &DensityOperator::basis_state(&w("1"))).unwrap();
        let moved = out.state.as_ref().unwrap();
        assert_eq!(moved.op(), DensityOperator::basis_state(&w("10")).op());
        assert_abs_diff_eq!(out.information_loss(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_can_annihilate() {
        // 𝒬(δ_Λ⊗δ_Λ*) kills δ_03⊗δ_03*: 03 ≠ Λ
        let op = QuantumOperation::Project(WordPredicate::Identity);
        let out = apply_quantum_operation(&op, &DensityOperator::basis_state(&w("03"))).unwrap();
        assert!(out.is_impossible());
        assert_abs_diff_eq!(out.trace_after, 0.0);
        assert!(out.information_loss().is_infinite());
    }

    #[test]
    fn dephasing_preserves_trace() {
        for seed in 0..5u64 {
            let rho = random_density(2, 300 + seed);
            let op = QuantumOperation::Dephase(WordPredicate::Positive);
            let out = apply_quantum_operation(&op, &rho).unwrap();
            assert_abs_diff_eq!(out.trace_after, out.trace_before, epsilon = 1e-10);
            assert!(out.information_loss().abs() < 1e-9);
        }
    }

    #[test]
    fn operations_never_gain_information() {
        let rho = random_density(2, 310);
        for op in [
            QuantumOperation::Project(WordPredicate::Positive),
            QuantumOperation::Project(WordPredicate::LengthLe { n: 1 }),
            QuantumOperation::Dephase(WordPredicate::LengthEq { n: 1 }),
            QuantumOperation::Conjugate(LinOp::Reflect),
        ] {
            let out = apply_quantum_operation(&op, &rho).unwrap();
            assert!(out.information_loss() >= -1e-9, "loss for {op:?}");
            assert!(out.trace_after <= out.trace_before + 1e-10);
        }
    }

    #[test]
    fn switch_factorizes_when_parts_commute() {
        // with U_j = phase multipliers, U_j commutes with the length projectors,
        // and 𝒯(U,P) = 𝒦(W)∘𝒯(I,P) for W = Σ U_j P_j
        let pairs: Vec<(LinOp, WordPredicate)> = (0..=2usize)
            .map(|n| {
                (
                    LinOp::LengthPhase(0.1 * (n as f64 + 1.0)),
                    WordPredicate::LengthEq { n },
                )
            })
            .collect();
        let rho = random_density(2, 320);
        let switch = QuantumOperation::Switch(pairs.clone()).apply_op(rho.op());
        let w_op = LinOp::Sum(
            pairs
                .iter()
                .map(|(u, p)| LinOp::Compose(vec![u.clone(), LinOp::Project(p.clone())]))
                .collect(),
        );
        let identity_switch = QuantumOperation::Switch(
            pairs
                .iter()
                .map(|(_, p)| (LinOp::Identity, p.clone()))
                .collect(),
        );
        let factored = w_op.conjugate(&identity_switch.apply_op(rho.op()));
        assert!(switch.max_abs_diff(&factored) < 1e-10);
    }

    #[test]
    fn radial_convolution_commutes_with_right_translation() {
        // 𝒬(p⋆) built from the radial element μ_1 commutes with 𝒦(R_a)
        let mu1 = StateVector::from_terms(
            crate::freegroup::sphere(1)
                .unwrap()
                .into_iter()
                .map(|x| (x, Complex64::new(0.25, 0.0))),
        );
        let conv = LinOp::Convolve(mu1);
        let rho = random_density(2, 330);
        for a in 0..4u8 {
            let ra = LinOp::RightTranslate(Word::from_letters([letter(a)]));
            let first = ra.conjugate(&conv.conjugate(rho.op()));
            let second = conv.conjugate(&ra.conjugate(rho.op()));
            assert!(first.max_abs_diff(&second) < 1e-10, "letter {a}");
        }
    }

    #[test]
    fn identity_channel() {
        let e = Channel::new(vec![LinOp::Identity], 2).unwrap();
        let rho = random_density(2, 340);
        let out = e.apply(&rho).unwrap();
        assert!(out.op().max_abs_diff(rho.op()) < 1e-12);
    }

    #[test]
    fn length_dephasing_channel_matches_blocks() {
        // Kraus family {M(FG(2)_n)}_{n≤L} implements full dephasing in length
        let kraus: Vec<LinOp> = (0..=2usize)
            .map(|n| LinOp::Project(WordPredicate::LengthEq { n }))
            .collect();
        let e = Channel::new(kraus, 2).unwrap();
        let rho = random_density(2, 350);
        let out = e.apply(&rho).unwrap();
        assert!(out.op().max_abs_diff(length_dephase(&rho).op()) < 1e-10);
        let diag: SparseOperator = length_blocks(&rho)
            .into_iter()
            .filter(|((m, n), _)| m == n)
            .fold(SparseOperator::zero(), |acc, (_, b)| &acc + &b);
        assert!(out.op().max_abs_diff(&diag) < 1e-10);
    }

    #[test]
    fn bit_flip_channel_is_complete() {
        // {√(1−q) I, √q V_0}: completeness from unitarity of V_0
        let q: f64 = 0.3;
        let kraus = vec![
            LinOp::Identity.scaled(Complex64::new((1.0 - q).sqrt(), 0.0)),
            LinOp::append(letter(0)).scaled(Complex64::new(q.sqrt(), 0.0)),
        ];
        let e = Channel::new(kraus, 2).unwrap();
        let rho = random_density(1, 360);
        let out = e.apply(&rho).unwrap();
        assert_abs_diff_eq!(out.trace(), rho.trace(), epsilon = 1e-10);
    }

    #[test]
    fn incomplete_kraus_family_is_rejected() {
        assert!(Channel::new(vec![LinOp::Project(WordPredicate::Positive)], 2).is_err());
        let overweight = vec![LinOp::Identity, LinOp::Identity];
        assert!(Channel::new(overweight, 1).is_err());
    }

    #[test]
    fn support_escaping_ball_is_a_resource_error() {
        let e = Channel::new(vec![LinOp::Identity], 1).unwrap();
        let rho = DensityOperator::basis_state(&w("010"));
        assert!(matches!(e.apply(&rho), Err(QmsError::Budget(_))));
    }

    #[test]
    fn success_probability_identity_channel_is_one() {
        let e = Channel::new(vec![LinOp::Identity], 2).unwrap();
        let rho = random_density(2, 370);
        for g in [LinOp::Identity, LinOp::Reflect, LinOp::append(letter(1))] {
            let p = success_probability(&g, &e, &rho, 2).unwrap();
            assert_abs_diff_eq!(p, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn success_probability_dephasing_fixes_basis_states() {
        let kraus: Vec<LinOp> = (0..=2usize)
            .map(|n| LinOp::Project(WordPredicate::LengthEq { n }))
            .collect();
        let e = Channel::new(kraus, 2).unwrap();
        let sigma = crate::observables::max_entropy_source(1.0, 2)
            .unwrap()
            .mixed_state();
        let p = success_probability(&LinOp::Identity, &e, &sigma, 2).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn success_probability_matches_kraus_form() {
        // Σ_{z,j} Pr(z)|⟨Gδ_z|O_j Gδ_z⟩|² for the bit-flip channel
        let q: f64 = 0.25;
        let kraus = vec![
            LinOp::Identity.scaled(Complex64::new((1.0 - q).sqrt(), 0.0)),
            LinOp::append(letter(0)).scaled(Complex64::new(q.sqrt(), 0.0)),
        ];
        let e = Channel::new(kraus.clone(), 3).unwrap();
        let rho = crate::observables::max_entropy_source(1.0, 2)
            .unwrap()
            .mixed_state();
        let direct = success_probability(&LinOp::Identity, &e, &rho, 2).unwrap();
        let trace = rho.trace();
        let mut kraus_form = 0.0;
        for z in rho.support_words() {
            let pr = rho.weight(&z) / trace;
            let d = delta(&z.to_string());
            for k in &kraus {
                kraus_form += pr * d.inner(&k.apply(&d)).norm_sqr();
            }
        }
        assert_abs_diff_eq!(direct, kraus_form, epsilon = 1e-12);
        // flipping never preserves a basis state, so the answer is 1−q exactly
        assert_abs_diff_eq!(direct, 1.0 - q, epsilon = 1e-12);
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form() {
        let q: f64 = 0.3;
        let kraus = vec![
            LinOp::Identity.scaled(Complex64::new((1.0 - q).sqrt(), 0.0)),
            LinOp::append(letter(0)).scaled(Complex64::new(q.sqrt(), 0.0)),
        ];
        let e = Channel::new(kraus, 3).unwrap();
        let rho = crate::observables::max_entropy_source(1.0, 2)
            .unwrap()
            .mixed_state();
        let exact = success_probability(&LinOp::Identity, &e, &rho, 2).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4242);
        let trials = 10_000;
        let mc = success_probability_monte_carlo(&LinOp::Identity, &e, &rho, trials, &mut rng);
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (mc - exact).abs() <= 3.0 * sigma,
            "mc {mc} vs exact {exact} (σ = {sigma})"
        );
    }
}
