//! Executable procedures: a destructive-read memory cell that
//! restores itself, a shift register working on the right end of a positive
//! word, and the Alice→Bob pipeline through a noisy channel.
//!
//! Every protocol unitary is a composition of the bit operators V_a, so bit
//! creation and deletion stay unitary throughout.

use crate::freegroup::{Letter, Word};
use crate::hilbert::{DensityOperator, LinOp};
use crate::observables::{measure, MeasurementKind, OutcomeValue};
use crate::quantum_ops::Channel;
use crate::{QmsError, Result};
use rand::Rng;

/// One recorded protocol step: what ran, what was observed, and the state
/// left behind.
#[derive(Debug, Clone)]
pub struct TranscriptStep {
    pub operation: String,
    pub outcome: Option<OutcomeValue>,
    pub probability: Option<f64>,
    pub trace_before: f64,
    pub trace_after: f64,
    pub state: DensityOperator,
}

#[derive(Debug, Clone)]
pub struct ProtocolTranscript {
    pub steps: Vec<TranscriptStep>,
    pub success: bool,
}

impl ProtocolTranscript {
    fn new() -> ProtocolTranscript {
        ProtocolTranscript {
            steps: Vec::new(),
            success: true,
        }
    }

    fn record(&mut self, operation: &str, before: f64, state: DensityOperator) {
        self.steps.push(TranscriptStep {
            operation: operation.to_string(),
            outcome: None,
            probability: None,
            trace_before: before,
            trace_after: state.trace(),
            state,
        });
    }

    fn record_measurement(
        &mut self,
        operation: &str,
        before: f64,
        outcome: OutcomeValue,
        probability: f64,
        state: DensityOperator,
    ) {
        self.steps.push(TranscriptStep {
            operation: operation.to_string(),
            outcome: Some(outcome),
            probability: Some(probability),
            trace_before: before,
            trace_after: state.trace(),
            state,
        });
    }

    pub fn final_state(&self) -> Option<&DensityOperator> {
        self.steps.last().map(|s| &s.state)
    }
}

fn conjugate_step(
    transcript: &mut ProtocolTranscript,
    name: &str,
    op: &LinOp,
    state: &DensityOperator,
) -> Result<DensityOperator> {
    let out = DensityOperator::validate(op.conjugate(state.op()))
        .map_err(|e| QmsError::Protocol(format!("{name} broke the state: {e}")))?;
    transcript.record(name, state.trace(), out.clone());
    Ok(out)
}

/// The unique x with ϱ = c·δ_x⊗δ_x*, or a protocol error.
fn basis_word(rho: &DensityOperator) -> Result<Word> {
    let support = rho.support_words();
    if support.len() == 1 && (rho.weight(&support[0]) - rho.trace()).abs() < 1e-12 {
        Ok(support[0].clone())
    } else {
        Err(QmsError::Protocol(
            "state is not a basis state δ_x⊗δ_x*".into(),
        ))
    }
}

fn v(a: u8) -> LinOp {
    LinOp::append(Letter::new(a).expect("protocol letters are in range"))
}

fn expect_word(value: &OutcomeValue) -> Word {
    match value {
        OutcomeValue::Word(s) => Word::parse(s).expect("measured words are canonical"),
        other => panic!("message measurement produced {other:?}"),
    }
}

/// Reads the stored bit destructively and restores it.
///
/// Applies 𝒦(V_3); the cell δ_b becomes δ_Λ if b = 1 and δ_03 if b = 0.
/// Measuring the message distinguishes the two, and the matching V-word
/// rebuilds δ_b.
pub fn memcell_read<R: Rng>(
    cell: &DensityOperator,
    rng: &mut R,
) -> Result<(u8, DensityOperator, ProtocolTranscript)> {
    let x = basis_word(cell)?;
    if x.len() != 1 || !x.letters()[0].is_bit() {
        return Err(QmsError::Protocol(format!(
            "memory cell must hold δ_0 or δ_1, found δ_{x}"
        )));
    }
    let mut transcript = ProtocolTranscript::new();
    let probed = conjugate_step(&mut transcript, "K(V_3)", &v(3), cell)?;
    let m = measure(MeasurementKind::Message, &probed, rng)?;
    let observed = expect_word(&m.value);
    let bit = if observed.is_empty() { 1 } else { 0 };
    transcript.record_measurement(
        "measure P_Λ",
        probed.trace(),
        m.value,
        m.probability,
        m.posterior.clone(),
    );
    let restore = if bit == 1 {
        v(1)
    } else {
        // δ_03 → V_1 → δ_0 → V_2 → δ_Λ → V_0 → δ_0
        LinOp::Compose(vec![v(0), v(2), v(1)])
    };
    let restored = conjugate_step(&mut transcript, "restore", &restore, &m.posterior)?;
    Ok((bit, restored, transcript))
}

/// Writes bit `a` without learning the old value:
/// 𝒦(V_a) ∘ 𝒯((V_2∘V_1, I), (I−P_Λ, P_Λ)) ∘ 𝒦(V_3).
pub fn memcell_write<R: Rng>(
    a: u8,
    cell: &DensityOperator,
    _rng: &mut R,
) -> Result<(DensityOperator, ProtocolTranscript)> {
    if a > 1 {
        return Err(QmsError::Protocol(format!("bit to write must be 0 or 1, got {a}")));
    }
    let x = basis_word(cell)?;
    if x.len() != 1 || !x.letters()[0].is_bit() {
        return Err(QmsError::Protocol(format!(
            "memory cell must hold δ_0 or δ_1, found δ_{x}"
        )));
    }
    let mut transcript = ProtocolTranscript::new();
    let probed = conjugate_step(&mut transcript, "K(V_3)", &v(3), cell)?;
    // the switch erases whichever bit was stored without reading it
    let switch = crate::quantum_ops::QuantumOperation::Switch(vec![
        (
            LinOp::Compose(vec![v(2), v(1)]),
            crate::predicate::WordPredicate::Identity.complement(),
        ),
        (LinOp::Identity, crate::predicate::WordPredicate::Identity),
    ]);
    let erased = DensityOperator::validate(switch.apply_op(probed.op()))
        .map_err(|e| QmsError::Protocol(format!("erase switch broke the state: {e}")))?;
    transcript.record("T((V_2∘V_1, I), (I−P_Λ, P_Λ))", probed.trace(), erased.clone());
    let written = conjugate_step(&mut transcript, "K(V_a)", &v(a), &erased)?;
    Ok((written, transcript))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// Append bit b on the right.
    In(u8),
    /// Remove and return the rightmost bit.
    Out,
}

/// One shift-register step on a positive basis state δ_x, x ∈ 2*.
pub fn shift_register_step<R: Rng>(
    direction: ShiftDirection,
    reg: &DensityOperator,
    rng: &mut R,
) -> Result<(Option<u8>, DensityOperator, ProtocolTranscript)> {
    let x = basis_word(reg)?;
    if !x.is_positive() {
        return Err(QmsError::Protocol(format!(
            "shift register must hold a positive message, found δ_{x}"
        )));
    }
    let mut transcript = ProtocolTranscript::new();
    match direction {
        ShiftDirection::In(b) => {
            if b > 1 {
                return Err(QmsError::Protocol(format!("bit to shift must be 0 or 1, got {b}")));
            }
            let out = conjugate_step(&mut transcript, "K(V_b)", &v(b), reg)?;
            Ok((None, out, transcript))
        }
        ShiftDirection::Out => {
            if x.is_empty() {
                return Err(QmsError::Protocol("shift out of an empty register".into()));
            }
            let first = measure(MeasurementKind::Length, reg, rng)?;
            let n = match first.value {
                OutcomeValue::Length(n) => n,
                _ => unreachable!(),
            };
            transcript.record_measurement(
                "measure N",
                reg.trace(),
                first.value,
                first.probability,
                first.posterior.clone(),
            );
            let probed = conjugate_step(&mut transcript, "K(V_3)", &v(3), &first.posterior)?;
            let second = measure(MeasurementKind::Length, &probed, rng)?;
            let n_prime = match second.value {
                OutcomeValue::Length(n) => n,
                _ => unreachable!(),
            };
            transcript.record_measurement(
                "measure N",
                probed.trace(),
                second.value,
                second.probability,
                second.posterior.clone(),
            );
            // n′ ≤ n means V_3 cancelled a trailing 1; otherwise the register
            // ended in 0 and the stray 03 tail is removed by V_2∘V_1
            let (bit, state) = if n_prime <= n {
                (1, second.posterior)
            } else {
                let fixed = conjugate_step(
                    &mut transcript,
                    "K(V_2∘V_1)",
                    &LinOp::Compose(vec![v(2), v(1)]),
                    &second.posterior,
                )?;
                (0, fixed)
            };
            Ok((Some(bit), state, transcript))
        }
    }
}

#[derive(Debug, Clone)]
pub struct AliceBobRun {
    pub sent: Word,
    pub received: Word,
    pub success: bool,
    /// False when a zero-trace intermediate aborted the pipeline; such runs
    /// count as failures in Monte-Carlo estimates.
    pub completed: bool,
    /// Whether the received word lies in 2*; the decode step expects a
    /// positive message but types the outcome over all of FG(2).
    pub received_positive: bool,
    pub transcript: ProtocolTranscript,
}

/// One pass of the seven-step pipeline: sample a message z from ϱ, encode it
/// as Gδ_z, push the pure state through ℰ, decode with G*, measure the
/// message to get w, and reset the register to δ_Λ with R_{w⁻¹}.
pub fn alicebob_run<R: Rng>(
    rho: &DensityOperator,
    g: &LinOp,
    channel: &Channel,
    rng: &mut R,
) -> Result<AliceBobRun> {
    let mut transcript = ProtocolTranscript::new();
    let picked = measure(MeasurementKind::Message, rho, rng)?;
    let sent = expect_word(&picked.value);
    transcript.record_measurement(
        "measure M (send)",
        rho.trace(),
        picked.value,
        picked.probability,
        picked.posterior.clone(),
    );
    // normalize before encoding so the transmitted state is a unit pure state
    let pure = DensityOperator::basis_state(&sent);
    let encoded = conjugate_step(&mut transcript, "K(G)", g, &pure)?;
    let failed = |mut transcript: ProtocolTranscript| {
        transcript.success = false;
        AliceBobRun {
            sent: sent.clone(),
            received: Word::identity(),
            success: false,
            completed: false,
            received_positive: false,
            transcript,
        }
    };
    let through = match channel.apply(&encoded) {
        Ok(s) => s,
        Err(_) => return Ok(failed(transcript)),
    };
    transcript.record("E", encoded.trace(), through.clone());
    let decoded = match DensityOperator::validate(g.adjoint().conjugate(through.op())) {
        Ok(s) => s,
        Err(_) => return Ok(failed(transcript)),
    };
    transcript.record("K(G*)", through.trace(), decoded.clone());
    let received_m = measure(MeasurementKind::Message, &decoded, rng)?;
    let received = expect_word(&received_m.value);
    transcript.record_measurement(
        "measure M (receive)",
        decoded.trace(),
        received_m.value,
        received_m.probability,
        received_m.posterior.clone(),
    );
    let reset = conjugate_step(
        &mut transcript,
        "K(R_{w⁻¹})",
        &LinOp::RightTranslate(received.clone()),
        &received_m.posterior,
    )?;
    debug_assert_eq!(basis_word(&reset)?, Word::identity());
    let success = received == sent;
    transcript.success = success;
    Ok(AliceBobRun {
        received_positive: received.is_positive(),
        sent,
        received,
        success,
        completed: true,
        transcript,
    })
}
