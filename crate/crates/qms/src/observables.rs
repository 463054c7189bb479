//! The message observable and its relatives.
//!
//! The basis (δ_x) induces the atomic spectral measure M(A) = Σ_{a∈A} δ_a⊗δ_a*.
//! Everything here is built from it: the length observable N, length-block
//! decompositions, dynamics under H = hνN, the extended-bit observables X_j
//! and Q_j, sampling measurements with the Born rule, and the entropies.

use crate::freegroup::{sphere_size, Word};
use crate::hilbert::{Complex64, DensityOperator, LinOp, SparseOperator, StateVector};
use crate::predicate::WordPredicate;
use crate::{QmsError, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Projects a vector onto the span of basis vectors satisfying the predicate.
pub fn spectral_project(pred: &WordPredicate, f: &StateVector) -> StateVector {
    LinOp::Project(pred.clone()).apply(f)
}

/// M(A) ϱ M(A) on a density operator; may be zero when A misses the support.
pub fn spectral_project_density(pred: &WordPredicate, rho: &DensityOperator) -> SparseOperator {
    SparseOperator::from_entries(
        rho.op()
            .iter()
            .filter(|((x, y), _)| pred.contains(x) && pred.contains(y))
            .map(|((x, y), c)| (x.clone(), y.clone(), *c)),
    )
}

/// The blocks ϱ_mn = M(FG(2)_m) ϱ M(FG(2)_n), keyed by (m, n).
pub fn length_blocks(rho: &DensityOperator) -> BTreeMap<(usize, usize), SparseOperator> {
    let mut blocks: BTreeMap<(usize, usize), SparseOperator> = BTreeMap::new();
    for ((x, y), c) in rho.op().iter() {
        let block = blocks.entry((x.len(), y.len())).or_default();
        *block = &*block + &SparseOperator::from_entries([(x.clone(), y.clone(), *c)]);
    }
    blocks
}

/// The diagonal sum ϱ_N = Σ_n ϱ_nn, the component co-measurable with N.
pub fn length_dephase(rho: &DensityOperator) -> DensityOperator {
    let op = SparseOperator::from_entries(
        rho.op()
            .iter()
            .filter(|((x, y), _)| x.len() == y.len())
            .map(|((x, y), c)| (x.clone(), y.clone(), *c)),
    );
    DensityOperator::validate(op).expect("length dephasing preserves the state axioms")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthStats {
    /// Trace(Nϱ)/Trace(ϱ).
    pub average_length: f64,
    /// Σ_n Trace(ϱ_nn²) / Trace(ϱ²), in (0, 1].
    pub index: f64,
}

pub fn length_statistics(rho: &DensityOperator) -> LengthStats {
    let average_length = rho
        .support_words()
        .iter()
        .map(|x| x.len() as f64 * rho.weight(x))
        .sum::<f64>()
        / rho.trace();
    let purity = rho.op().hs_norm_sq();
    let diagonal_purity: f64 = length_blocks(rho)
        .iter()
        .filter(|((m, n), _)| m == n)
        .map(|(_, b)| b.hs_norm_sq())
        .sum();
    LengthStats {
        average_length,
        index: diagonal_purity / purity,
    }
}

/// Time evolution U_t = exp(−2πi N ν t) on a vector.
pub fn evolve(psi: &StateVector, nu: f64, t: f64) -> StateVector {
    LinOp::LengthPhase(nu * t).apply(psi)
}

/// U_t ϱ U_t* on a density operator.
pub fn evolve_density(rho: &DensityOperator, nu: f64, t: f64) -> DensityOperator {
    let u = LinOp::LengthPhase(nu * t);
    DensityOperator::validate(u.conjugate(rho.op()))
        .expect("unitary evolution preserves the state axioms")
}

/// Discrete observables measurable by sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementKind {
    /// The message observable with atomic measure M.
    Message,
    /// The message length N.
    Length,
    /// The positive message observable M⁺, valued in 2* ∪ {(−)}.
    Positive,
    /// The jth extended bit X_j, valued in {−1,0,1,2,3}.
    X { j: usize },
    /// The jth qubit Q_j, valued in {−1,0,1}.
    Q { j: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum OutcomeValue {
    Word(String),
    Length(usize),
    PositiveWord(String),
    /// The (−) outcome of M⁺: the message is not a positive word.
    NotPositive,
    /// An X_j or Q_j value.
    Bit(i8),
    /// An eigenvalue of a state measured as an observable.
    Spectral(f64),
}

/// One sampled measurement: the value, its Born probability, and the
/// unnormalized a-posteriori state.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub value: OutcomeValue,
    pub probability: f64,
    pub posterior: DensityOperator,
}

/// The full outcome distribution of a discrete measurement kind, restricted
/// to outcomes of nonzero probability on the support of ϱ.
pub fn outcome_distribution(
    kind: MeasurementKind,
    rho: &DensityOperator,
) -> Vec<(OutcomeValue, f64, SparseOperator)> {
    let trace = rho.trace();
    let mut out = Vec::new();
    match kind {
        MeasurementKind::Message => {
            for x in rho.support_words() {
                let w = rho.weight(&x);
                if w > 0.0 {
                    let d = StateVector::basis(x.clone());
                    // a-posteriori rule: ⟨δ_x|ϱδ_x⟩ δ_x⊗δ_x*
                    let post = SparseOperator::outer(&d, &d).scale(Complex64::new(w, 0.0));
                    out.push((OutcomeValue::Word(x.to_string()), w / trace, post));
                }
            }
        }
        MeasurementKind::Length => {
            let mut by_len: BTreeMap<usize, f64> = BTreeMap::new();
            for x in rho.support_words() {
                *by_len.entry(x.len()).or_default() += rho.weight(&x);
            }
            for (n, w) in by_len {
                if w > 0.0 {
                    let pred = WordPredicate::LengthEq { n };
                    let post = spectral_project_density(&pred, rho);
                    out.push((OutcomeValue::Length(n), w / trace, post));
                }
            }
        }
        MeasurementKind::Positive => {
            let mut minus_mass = 0.0;
            for x in rho.support_words() {
                let w = rho.weight(&x);
                if x.is_positive() {
                    if w > 0.0 {
                        let d = StateVector::basis(x.clone());
                        let post = SparseOperator::outer(&d, &d).scale(Complex64::new(w, 0.0));
                        out.push((OutcomeValue::PositiveWord(x.to_string()), w / trace, post));
                    }
                } else {
                    minus_mass += w;
                }
            }
            if minus_mass > 0.0 {
                let pred = WordPredicate::Positive.complement();
                let post = spectral_project_density(&pred, rho);
                out.push((OutcomeValue::NotPositive, minus_mass / trace, post));
            }
        }
        MeasurementKind::X { j } => {
            for value in [-1i8, 0, 1, 2, 3] {
                let pred = x_value_predicate(j, value);
                push_projective_outcome(rho, &pred, OutcomeValue::Bit(value), trace, &mut out);
            }
        }
        MeasurementKind::Q { j } => {
            for value in [-1i8, 0, 1] {
                let pred = q_value_predicate(j, value);
                push_projective_outcome(rho, &pred, OutcomeValue::Bit(value), trace, &mut out);
            }
        }
    }
    out
}

/// The eigenspace index set of X_j for a given value.
pub fn x_value_predicate(j: usize, value: i8) -> WordPredicate {
    if value < 0 {
        // (−1)·M(∪_{k≤j} FG(2)_k): the message is too short
        WordPredicate::LengthLe { n: j }
    } else {
        WordPredicate::LetterAt {
            j,
            letter: value as u8,
        }
    }
}

/// The eigenspace index set of Q_j for a given value.
pub fn q_value_predicate(j: usize, value: i8) -> WordPredicate {
    match value {
        0 | 1 => WordPredicate::LetterAt {
            j,
            letter: value as u8,
        },
        _ => WordPredicate::Or(vec![
            WordPredicate::LengthLe { n: j },
            WordPredicate::LetterAt { j, letter: 2 },
            WordPredicate::LetterAt { j, letter: 3 },
        ]),
    }
}

fn push_projective_outcome(
    rho: &DensityOperator,
    pred: &WordPredicate,
    value: OutcomeValue,
    trace: f64,
    out: &mut Vec<(OutcomeValue, f64, SparseOperator)>,
) {
    let mass: f64 = rho
        .support_words()
        .iter()
        .filter(|x| pred.contains(x))
        .map(|x| rho.weight(x))
        .sum();
    if mass > 0.0 {
        out.push((value, mass / trace, spectral_project_density(pred, rho)));
    }
}

/// Samples one outcome of a discrete measurement with the Born probabilities.
pub fn measure<R: Rng>(
    kind: MeasurementKind,
    rho: &DensityOperator,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    let dist = outcome_distribution(kind, rho);
    sample_from(dist, rng)
}

/// Measures a state ϱ as the observable ϱ = Σ r E_r.
///
/// Outcome r occurs with probability m_r·r/Trace(ϱ); the a-posteriori state
/// is r·E_r. Eigenvalues are grouped at relative gap 1e−9.
pub fn measure_state_as_observable<R: Rng>(
    rho: &DensityOperator,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    const GROUP_TOL: f64 = 1e-9;
    let eigen = rho.eigen();
    let scale = eigen.first().map(|(r, _)| r.abs()).unwrap_or(1.0).max(1.0);
    let mut dist: Vec<(OutcomeValue, f64, SparseOperator)> = Vec::new();
    let mut i = 0;
    while i < eigen.len() {
        let r = eigen[i].0;
        let mut projector = SparseOperator::zero();
        let mut multiplicity = 0usize;
        while i < eigen.len() && (eigen[i].0 - r).abs() <= GROUP_TOL * scale {
            projector = &projector + &SparseOperator::outer(&eigen[i].1, &eigen[i].1);
            multiplicity += 1;
            i += 1;
        }
        if r > 0.0 {
            let prob = multiplicity as f64 * r / rho.trace();
            let posterior = projector.scale(Complex64::new(r, 0.0));
            dist.push((OutcomeValue::Spectral(r), prob, posterior));
        }
    }
    sample_from(dist, rng)
}

fn sample_from<R: Rng>(
    dist: Vec<(OutcomeValue, f64, SparseOperator)>,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    if dist.is_empty() {
        return Err(QmsError::Validation(
            "measurement has no outcome of positive probability".into(),
        ));
    }
    let total: f64 = dist.iter().map(|(_, p, _)| p).sum();
    let mut u = rng.gen_range(0.0..total);
    let last = dist.len() - 1;
    for (k, (value, probability, post)) in dist.into_iter().enumerate() {
        u -= probability;
        if u <= 0.0 || k == last {
            let posterior = DensityOperator::validate(post).map_err(|e| {
                QmsError::Validation(format!("posterior failed validation: {e}"))
            })?;
            return Ok(MeasurementOutcome {
                value,
                probability,
                posterior,
            });
        }
    }
    unreachable!("loop returns on the last element")
}

/// Source entropy and von Neumann entropy, in nats, of the normalized state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entropies {
    pub source: f64,
    pub von_neumann: f64,
}

/// η(p) = −p ln p, with η(0) = 0.
pub fn eta(p: f64) -> f64 {
    if p <= 1e-12 {
        0.0
    } else {
        -p * p.ln()
    }
}

pub fn entropies(rho: &DensityOperator) -> Entropies {
    let trace = rho.trace();
    let source = rho
        .support_words()
        .iter()
        .map(|x| eta(rho.weight(x) / trace))
        .sum();
    let von_neumann = rho.eigen().iter().map(|(r, _)| eta(r / trace)).sum();
    Entropies {
        source,
        von_neumann,
    }
}

/// The maximum-entropy message source with average length μ, truncated.
#[derive(Debug, Clone)]
pub struct MaxEntropySource {
    /// w(x) = (1−p)pⁿ/#FG(2)_n for #x = n ≤ truncation depth.
    pub weights: BTreeMap<Word, f64>,
    /// ln(3/p)·p/(1−p) + ln(4/3) − ln(1−p), in nats.
    pub closed_form_entropy: f64,
    /// Probability mass beyond the truncation depth.
    pub tail_mass: f64,
    pub p: f64,
}

/// Truncated series for the source entropy of the max-entropy weights,
/// summed analytically sphere by sphere and returned with the tail mass
/// beyond the depth. Uses the sphere-size formula 4·3^{n−1} uniformly in n
/// (the convention under which the series converges to the closed form);
/// the literal Σ η(w(x)) over emitted weights differs by exactly
/// (1−p)·ln(4/3) from the n = 0 sphere.
pub fn truncated_source_entropy(mu: f64, depth: usize) -> Result<(f64, f64)> {
    if mu <= 0.0 {
        return Err(QmsError::Precondition(format!(
            "average length must be positive, got {mu}"
        )));
    }
    let p = mu / (1.0 + mu);
    let mut entropy = 0.0;
    for n in 0..=depth {
        // sphere mass (1−p)pⁿ split over 4·3^{n−1} equal weights
        let mass = (1.0 - p) * p.powi(n as i32);
        let ln_count = 4f64.ln() + (n as f64 - 1.0) * 3f64.ln();
        let ln_w = (1.0 - p).ln() + n as f64 * p.ln() - ln_count;
        entropy -= mass * ln_w;
    }
    Ok((entropy, p.powi(depth as i32 + 1)))
}

pub fn max_entropy_source(mu: f64, truncation_depth: usize) -> Result<MaxEntropySource> {
    if mu <= 0.0 {
        return Err(QmsError::Precondition(format!(
            "average length must be positive, got {mu}"
        )));
    }
    let p = mu / (1.0 + mu);
    let mut weights = BTreeMap::new();
    for n in 0..=truncation_depth {
        let per_word = (1.0 - p) * p.powi(n as i32) / sphere_size(n) as f64;
        for x in crate::freegroup::sphere(n)? {
            weights.insert(x, per_word);
        }
    }
    let closed_form_entropy = (3.0 / p).ln() * p / (1.0 - p) + (4.0f64 / 3.0).ln() - (1.0 - p).ln();
    let tail_mass = p.powi(truncation_depth as i32 + 1);
    Ok(MaxEntropySource {
        weights,
        closed_form_entropy,
        tail_mass,
        p,
    })
}

impl MaxEntropySource {
    /// The mixed state σ = Σ w(x) δ_x⊗δ_x* over the truncation.
    pub fn mixed_state(&self) -> DensityOperator {
        let op = SparseOperator::from_entries(
            self.weights
                .iter()
                .map(|(x, &w)| (x.clone(), x.clone(), Complex64::new(w, 0.0))),
        );
        DensityOperator::validate(op).expect("max-entropy weights are a valid diagonal state")
    }

    /// The pure state ψ = Σ √w(x) δ_x over the truncation.
    pub fn pure_state(&self) -> StateVector {
        StateVector::from_terms(
            self.weights
                .iter()
                .map(|(x, &w)| (x.clone(), Complex64::new(w.sqrt(), 0.0))),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::ball;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn delta(s: &str) -> StateVector {
        StateVector::basis(w(s))
    }

    fn random_density(radius: usize, seed: u64) -> DensityOperator {
        // Gram matrix of random vectors is Hermitian PSD
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
    fn projection_examples() {
        let f = &delta("01") + &delta("23");
        assert_eq!(spectral_project(&WordPredicate::Positive, &f), delta("01"));
        assert_eq!(
            spectral_project(&WordPredicate::LengthEq { n: 2 }, &delta("01")),
            delta("01")
        );
        assert!(spectral_project(&WordPredicate::None, &f).is_zero());
    }

    #[test]
    fn length_blocks_of_superposition() {
        let psi = (&delta("e") + &delta("0")).scale(Complex64::new(1.0 / 2f64.sqrt(), 0.0));
        let rho = DensityOperator::pure(&psi).unwrap();
        let blocks = length_blocks(&rho);
        assert_eq!(blocks.len(), 4);
        for key in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let b = &blocks[&key];
            assert_eq!(b.iter().count(), 1);
            let (_, c) = b.iter().next().unwrap();
            assert_abs_diff_eq!(c.re, 0.5, epsilon = 1e-12);
        }
        // trace is carried by the diagonal blocks alone
        let diag_trace: f64 = blocks
            .iter()
            .filter(|((m, n), _)| m == n)
            .map(|(_, b)| b.trace().re)
            .sum();
        assert_abs_diff_eq!(diag_trace, rho.trace(), epsilon = 1e-12);
    }

    #[test]
    fn definite_length_state_has_single_block() {
        let psi = (&delta("01") + &delta("10")).scale(Complex64::new(0.5, 0.0));
        let rho = DensityOperator::pure(&psi).unwrap();
        let blocks = length_blocks(&rho);
        assert_eq!(blocks.len(), 1);
        assert!(blocks.contains_key(&(2, 2)));
        let stats = length_statistics(&rho);
        assert_abs_diff_eq!(stats.index, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.average_length, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn index_of_superposition_is_half() {
        let psi = (&delta("e") + &delta("0")).scale(Complex64::new(1.0 / 2f64.sqrt(), 0.0));
        let rho = DensityOperator::pure(&psi).unwrap();
        assert_abs_diff_eq!(length_statistics(&rho).index, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn purity_splits_over_blocks() {
        let rho = random_density(2, 40);
        let total: f64 = length_blocks(&rho).values().map(|b| b.hs_norm_sq()).sum();
        assert_abs_diff_eq!(total, rho.op().hs_norm_sq(), epsilon = 1e-8);
    }

    #[test]
    fn evolution_has_period_one_over_nu() {
        let psi = &delta("e") + &(&delta("0") + &delta("011"));
        let nu = 3.0;
        assert!(evolve(&psi, nu, 1.0 / nu).max_abs_diff(&psi) < 1e-12);
        assert_eq!(evolve(&delta("e"), nu, 0.123), delta("e"));
        // a length eigenstate only picks up a global phase
        let ev = evolve(&delta("01"), nu, 0.1);
        assert_abs_diff_eq!(ev.norm_l2(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dephased_state_is_stationary() {
        let rho = random_density(2, 41);
        let rho_n = length_dephase(&rho);
        let evolved = evolve_density(&rho_n, 2.0, 0.37);
        assert!(evolved.op().max_abs_diff(rho_n.op()) < 1e-10);
    }

    #[test]
    fn message_measurement_on_uniform_pair() {
        let psi = (&delta("0") + &delta("1")).scale(Complex64::new(1.0 / 2f64.sqrt(), 0.0));
        let rho = DensityOperator::pure(&psi).unwrap();
        let dist = outcome_distribution(MeasurementKind::Message, &rho);
        assert_eq!(dist.len(), 2);
        for (_, p, _) in &dist {
            assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn x_observable_on_eigenvector() {
        // δ_{y·a·z} with #y = j is an eigenvector of X_j with eigenvalue a
        let rho = DensityOperator::basis_state(&w("103"));
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let m = measure(MeasurementKind::X { j: 1 }, &rho, &mut rng).unwrap();
        assert_eq!(m.value, OutcomeValue::Bit(0));
        assert_abs_diff_eq!(m.probability, 1.0, epsilon = 1e-12);
        // message shorter than j yields −1
        let m = measure(MeasurementKind::X { j: 5 }, &rho, &mut rng).unwrap();
        assert_eq!(m.value, OutcomeValue::Bit(-1));
        // Q sees the anti-bit 3 at position 2 as −1
        let m = measure(MeasurementKind::Q { j: 2 }, &rho, &mut rng).unwrap();
        assert_eq!(m.value, OutcomeValue::Bit(-1));
    }

    #[test]
    fn length_measurement_fixes_eigenstates() {
        let rho = DensityOperator::basis_state(&w("0110"));
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let m = measure(MeasurementKind::Length, &rho, &mut rng).unwrap();
        assert_eq!(m.value, OutcomeValue::Length(4));
        assert!(m.posterior.op().max_abs_diff(rho.op()) < 1e-12);
    }

    #[test]
    fn measurement_probabilities_sum_to_one() {
        for seed in 0..6u64 {
            let rho = random_density(2, 100 + seed);
            for kind in [
                MeasurementKind::Message,
                MeasurementKind::Length,
                MeasurementKind::Positive,
                MeasurementKind::X { j: 0 },
                MeasurementKind::X { j: 1 },
                MeasurementKind::Q { j: 0 },
            ] {
                let total: f64 = outcome_distribution(kind, &rho)
                    .iter()
                    .map(|(_, p, _)| p)
                    .sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn measurement_is_repeatable() {
        let rho = random_density(2, 55);
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for kind in [
            MeasurementKind::Message,
            MeasurementKind::Length,
            MeasurementKind::Positive,
            MeasurementKind::X { j: 0 },
        ] {
            let first = measure(kind, &rho, &mut rng).unwrap();
            let second = measure(kind, &first.posterior, &mut rng).unwrap();
            assert_eq!(first.value, second.value);
            assert_abs_diff_eq!(second.probability, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn length_then_bits_reconstructs_the_message() {
        // X_j together with N determine the atomic measure completely
        let rho = random_density(3, 77);
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let len = measure(MeasurementKind::Length, &rho, &mut rng).unwrap();
        let n = match len.value {
            OutcomeValue::Length(n) => n,
            _ => unreachable!(),
        };
        let mut state = len.posterior;
        let mut letters = Vec::new();
        for j in 0..n {
            let m = measure(MeasurementKind::X { j }, &state, &mut rng).unwrap();
            match m.value {
                OutcomeValue::Bit(b) if b >= 0 => letters.push(b as u8),
                other => panic!("unexpected bit outcome {other:?}"),
            }
            state = m.posterior;
        }
        let reconstructed = Word::parse(
            &letters
                .iter()
                .map(|b| b.to_string())
                .collect::<String>(),
        )
        .unwrap_or_else(|_| Word::identity());
        let msg = measure(MeasurementKind::Message, &state, &mut rng).unwrap();
        assert_eq!(msg.value, OutcomeValue::Word(reconstructed.to_string()));
        assert_abs_diff_eq!(msg.probability, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn state_as_observable_pure_case() {
        let psi = &delta("0") + &delta("1");
        let rho = DensityOperator::pure(&psi).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let m = measure_state_as_observable(&rho, &mut rng).unwrap();
        match m.value {
            OutcomeValue::Spectral(r) => assert_abs_diff_eq!(r, psi.norm_l2_sq(), epsilon = 1e-10),
            other => panic!("unexpected {other:?}"),
        }
        assert_abs_diff_eq!(m.probability, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn state_as_observable_degenerate_mixture() {
        let op = &SparseOperator::outer(&delta("e"), &delta("e")).scale(Complex64::new(0.5, 0.0))
            + &SparseOperator::outer(&delta("0"), &delta("0")).scale(Complex64::new(0.5, 0.0));
        let rho = DensityOperator::validate(op).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let m = measure_state_as_observable(&rho, &mut rng).unwrap();
        assert_eq!(m.value, OutcomeValue::Spectral(0.5));
        assert_abs_diff_eq!(m.probability, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn state_as_observable_index_connection() {
        // measuring ψ⊗ψ* while in state ϱ_N succeeds with probability index(N, ψ⊗ψ*)
        let psi = (&delta("e") + &delta("0")).scale(Complex64::new(1.0 / 2f64.sqrt(), 0.0));
        let pure = DensityOperator::pure(&psi).unwrap();
        let dephased = length_dephase(&pure);
        // probability of outcome ‖ψ‖² = 1 under ϱ_N: ⟨ψ|ϱ_N ψ⟩/tr = Σ‖ψ_n‖⁴
        let prob = psi.inner(&dephased.op().apply(&psi)).re / dephased.trace();
        let expected = length_statistics(&pure).index;
        assert_abs_diff_eq!(prob, expected, epsilon = 1e-12);
    }

    #[test]
    fn entropy_of_pure_basis_state_is_zero() {
        let e = entropies(&DensityOperator::basis_state(&w("011")));
        assert_abs_diff_eq!(e.source, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.von_neumann, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn source_entropy_dominates_von_neumann() {
        for seed in 0..10u64 {
            let rho = random_density(2, 200 + seed);
            let e = entropies(&rho);
            assert!(
                e.source >= e.von_neumann - 1e-9,
                "seed {seed}: {} < {}",
                e.source,
                e.von_neumann
            );
        }
    }

    #[test]
    fn diagonal_state_entropies_agree() {
        let src = max_entropy_source(1.0, 5).unwrap();
        let sigma = src.mixed_state();
        let e = entropies(&sigma);
        assert_abs_diff_eq!(e.source, e.von_neumann, epsilon = 1e-10);
        // pure version: zero von Neumann, positive source entropy
        let psi = DensityOperator::pure(&src.pure_state()).unwrap();
        let ep = entropies(&psi);
        assert_abs_diff_eq!(ep.von_neumann, 0.0, epsilon = 1e-9);
        assert!(ep.source > 1.0);
    }

    #[test]
    fn max_entropy_weights_at_mu_one() {
        let src = max_entropy_source(1.0, 4).unwrap();
        assert_abs_diff_eq!(src.p, 0.5);
        assert_abs_diff_eq!(src.weights[&Word::identity()], 0.5, epsilon = 1e-12);
        for x in crate::freegroup::sphere(1).unwrap() {
            assert_abs_diff_eq!(src.weights[&x], 1.0 / 16.0, epsilon = 1e-12);
        }
        // closed form at μ=1 is ln 16
        assert_abs_diff_eq!(src.closed_form_entropy, 16f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn average_length_approaches_mu() {
        let src = max_entropy_source(1.0, 12).unwrap();
        let avg: f64 = src
            .weights
            .iter()
            .map(|(x, w)| x.len() as f64 * w)
            .sum();
        // the tail past depth 12 carries ≈ 1.7e−3 of the mean
        assert_abs_diff_eq!(avg, 1.0, epsilon = 5e-3);
    }

    #[test]
    fn truncated_entropy_reaches_the_closed_form() {
        let src = max_entropy_source(1.0, 6).unwrap();
        // analytic per-sphere sum vs word-by-word summation: the two differ
        // only in the n = 0 sphere-size convention, by (1−p)·ln(4/3)
        let word_sum: f64 = src.weights.values().map(|&w| eta(w)).sum();
        let (analytic, tail) = truncated_source_entropy(1.0, 6).unwrap();
        assert_abs_diff_eq!(analytic, word_sum + 0.5 * (4f64 / 3.0).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(tail, 0.5f64.powi(7), epsilon = 1e-15);
        // deep truncation closes on the closed form
        let (deep, deep_tail) = truncated_source_entropy(1.0, 30).unwrap();
        assert!(deep_tail < 1e-8);
        assert_abs_diff_eq!(deep, src.closed_form_entropy, epsilon = 1e-6);
    }

    #[test]
    fn entropy_slope_approaches_ln_3() {
        let mu = 1e3;
        let entropy = max_entropy_source(mu, 1).unwrap().closed_form_entropy;
        assert!((entropy / mu - 3f64.ln()).abs() / 3f64.ln() < 0.01);
    }
}
