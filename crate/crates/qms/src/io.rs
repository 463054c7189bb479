//! Wire formats: JSON for vectors, densities, operator descriptions and
//! measurement transcripts; TSV for polynomial tables. All floats are
//! printed with 17 significant digits so output round-trips exactly.

use crate::freegroup::Word;
use crate::harmonic::OrthogonalPolynomial;
use crate::hilbert::{Complex64, DensityOperator, LinOp, SparseOperator, StateVector};
use crate::observables::OutcomeValue;
use crate::predicate::WordPredicate;
use crate::quantum_ops::Channel;
use crate::{QmsError, Result};
use serde::{Deserialize, Serialize};

/// 17 significant digits: enough to reproduce any f64 bit pattern.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorEntry {
    pub word: String,
    pub re: f64,
    pub im: f64,
}

pub fn vector_to_json(f: &StateVector) -> String {
    let entries: Vec<VectorEntry> = f
        .iter()
        .map(|(x, c)| VectorEntry {
            word: x.to_string(),
            re: c.re,
            im: c.im,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("vector entries serialize")
}

pub fn vector_from_json(text: &str) -> Result<StateVector> {
    let entries: Vec<VectorEntry> =
        serde_json::from_str(text).map_err(|e| QmsError::Parse(format!("vector JSON: {e}")))?;
    let mut terms = Vec::with_capacity(entries.len());
    for e in entries {
        terms.push((Word::parse(&e.word)?, Complex64::new(e.re, e.im)));
    }
    Ok(StateVector::from_terms(terms))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEntry {
    pub row: String,
    pub col: String,
    pub re: f64,
    pub im: f64,
}

pub fn density_to_json(rho: &DensityOperator) -> String {
    operator_to_json(rho.op())
}

pub fn operator_to_json(op: &SparseOperator) -> String {
    let entries: Vec<DensityEntry> = op
        .iter()
        .map(|((x, y), c)| DensityEntry {
            row: x.to_string(),
            col: y.to_string(),
            re: c.re,
            im: c.im,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("density entries serialize")
}

pub fn operator_from_json(text: &str) -> Result<SparseOperator> {
    let entries: Vec<DensityEntry> =
        serde_json::from_str(text).map_err(|e| QmsError::Parse(format!("density JSON: {e}")))?;
    let mut terms = Vec::with_capacity(entries.len());
    for e in entries {
        terms.push((
            Word::parse(&e.row)?,
            Word::parse(&e.col)?,
            Complex64::new(e.re, e.im),
        ));
    }
    Ok(SparseOperator::from_entries(terms))
}

pub fn density_from_json(text: &str) -> Result<DensityOperator> {
    DensityOperator::validate(operator_from_json(text)?)
        .map_err(|e| QmsError::Validation(format!("density: {e}")))
}

/// A serializable operator description: a composition tree over the named
/// primitives translate, reflect, multiplier, block, and scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OpSpec {
    Identity,
    /// Left or right group translation by a word.
    Translate { side: Side, word: String },
    /// Appends the letters of `word` (V_{a0}, then V_{a1}, …).
    Append { word: String },
    Reflect,
    /// Length phase multiplier e^{−2πi·n·cycles}.
    Multiplier { cycles: f64 },
    /// A finite matrix block.
    Block { entries: Vec<DensityEntry> },
    Project { predicate: WordPredicate },
    Convolve { terms: Vec<VectorEntry> },
    Scale { re: f64, im: f64, inner: Box<OpSpec> },
    Compose { ops: Vec<OpSpec> },
    Sum { ops: Vec<OpSpec> },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl OpSpec {
    pub fn to_linop(&self) -> Result<LinOp> {
        Ok(match self {
            OpSpec::Identity => LinOp::Identity,
            OpSpec::Translate { side, word } => {
                let q = Word::parse(word)?;
                match side {
                    Side::Left => LinOp::LeftTranslate(q),
                    Side::Right => LinOp::RightTranslate(q),
                }
            }
            OpSpec::Append { word } => LinOp::append_word(&Word::parse(word)?),
            OpSpec::Reflect => LinOp::Reflect,
            OpSpec::Multiplier { cycles } => LinOp::LengthPhase(*cycles),
            OpSpec::Block { entries } => {
                let mut terms = Vec::with_capacity(entries.len());
                for e in entries {
                    terms.push((
                        Word::parse(&e.row)?,
                        Word::parse(&e.col)?,
                        Complex64::new(e.re, e.im),
                    ));
                }
                LinOp::Finite(SparseOperator::from_entries(terms))
            }
            OpSpec::Project { predicate } => LinOp::Project(predicate.clone()),
            OpSpec::Convolve { terms } => {
                let mut parsed = Vec::with_capacity(terms.len());
                for e in terms {
                    parsed.push((Word::parse(&e.word)?, Complex64::new(e.re, e.im)));
                }
                LinOp::Convolve(StateVector::from_terms(parsed))
            }
            OpSpec::Scale { re, im, inner } => {
                inner.to_linop()?.scaled(Complex64::new(*re, *im))
            }
            OpSpec::Compose { ops } => {
                let mut parts = Vec::with_capacity(ops.len());
                for op in ops {
                    parts.push(op.to_linop()?);
                }
                LinOp::Compose(parts)
            }
            OpSpec::Sum { ops } => {
                let mut parts = Vec::with_capacity(ops.len());
                for op in ops {
                    parts.push(op.to_linop()?);
                }
                LinOp::Sum(parts)
            }
        })
    }
}

/// Channel description file: Kraus terms plus the ball on which completeness
/// is verified.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kraus: Vec<OpSpec>,
    pub validation_radius: usize,
}

impl ChannelSpec {
    pub fn build(&self) -> Result<Channel> {
        let mut kraus = Vec::with_capacity(self.kraus.len());
        for spec in &self.kraus {
            kraus.push(spec.to_linop()?);
        }
        Channel::new(kraus, self.validation_radius)
    }
}

pub fn channel_from_json(text: &str) -> Result<Channel> {
    let spec: ChannelSpec =
        serde_json::from_str(text).map_err(|e| QmsError::Parse(format!("channel JSON: {e}")))?;
    spec.build()
}

/// One measurement event, emitted as a JSON line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub kind: String,
    pub value: Option<OutcomeValue>,
    pub probability: Option<f64>,
    pub trace_before: f64,
    pub trace_after: f64,
    pub seed: u64,
}

pub fn transcript_to_json_lines(
    transcript: &crate::protocols::ProtocolTranscript,
    seed: u64,
) -> String {
    let mut out = String::new();
    for step in &transcript.steps {
        let record = MeasurementRecord {
            kind: step.operation.clone(),
            value: step.outcome.clone(),
            probability: step.probability,
            trace_before: step.trace_before,
            trace_after: step.trace_after,
            seed,
        };
        out.push_str(&serde_json::to_string(&record).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// TSV table: one row per polynomial, `n` then ascending coefficients.
pub fn poly_tsv(polys: &[OrthogonalPolynomial]) -> String {
    let mut out = String::new();
    for p in polys {
        out.push_str(&p.degree.to_string());
        for c in p.coeffs_f64() {
            out.push('\t');
            out.push_str(&fmt_f64(c));
        }
        out.push('\n');
    }
    out
}

/// TSV table of a quadrature grid: node, weight.
pub fn grid_tsv(grid: &crate::harmonic::SpectralGrid) -> String {
    let mut out = String::new();
    for (l, v) in grid.nodes().iter().zip(grid.weights()) {
        out.push_str(&fmt_f64(*l));
        out.push('\t');
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

/// TSV export of a spectral field: λ, weight, cylinder word, re, im.
pub fn field_tsv(field: &crate::boundary::SpectralField) -> String {
    let mut out = String::new();
    for ((l, v), xi) in field
        .nodes()
        .iter()
        .zip(field.weights())
        .zip(field.fields())
    {
        for (y, c) in xi.iter() {
            out.push_str(&fmt_f64(*l));
            out.push('\t');
            out.push_str(&fmt_f64(*v));
            out.push('\t');
            out.push_str(&y.to_string());
            out.push('\t');
            out.push_str(&fmt_f64(c.re));
            out.push('\t');
            out.push_str(&fmt_f64(c.im));
            out.push('\n');
        }
    }
    out
}
