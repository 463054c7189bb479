//! Browser bindings: a thin string-in/string-out layer over the simulator so
//! a single static page can drive it. The core routines are plain Rust
//! functions (unit-tested on the host); the `#[wasm_bindgen]` wrappers only
//! translate errors.

use qms::freegroup::Word;
use qms::hilbert::{Complex64, StateVector};
use qms::observables::{entropies, outcome_distribution, MeasurementKind, OutcomeValue};
use qms::DensityOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use wasm_bindgen::prelude::*;

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Parses one vector term per line: `word re [im]`; blank lines are skipped.
fn parse_vector(text: &str) -> Result<StateVector, String> {
    let mut terms = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts
            .next()
            .ok_or_else(|| format!("line {}: missing word", k + 1))?;
        let word = Word::parse(word).map_err(|e| format!("line {}: {e}", k + 1))?;
        let re: f64 = parts
            .next()
            .unwrap_or("1")
            .parse()
            .map_err(|_| format!("line {}: bad real part", k + 1))?;
        let im: f64 = parts
            .next()
            .unwrap_or("0")
            .parse()
            .map_err(|_| format!("line {}: bad imaginary part", k + 1))?;
        if parts.next().is_some() {
            return Err(format!("line {}: expected `word re [im]`", k + 1));
        }
        terms.push((word, Complex64::new(re, im)));
    }
    let f = StateVector::from_terms(terms);
    if f.is_zero() {
        return Err("the vector is zero".into());
    }
    Ok(f)
}

fn vector_lines(f: &StateVector) -> String {
    let mut out = String::new();
    for (x, c) in f.iter() {
        out.push_str(&format!("{x}\t{}\t{}\n", fmt(c.re), fmt(c.im)));
    }
    out
}

pub fn word_calc_impl(op: &str, lhs: &str, rhs: &str) -> Result<String, String> {
    let a = Word::parse(lhs).map_err(|e| e.to_string())?;
    Ok(match op {
        "reduce" => a.to_string(),
        "inv" => a.inv().to_string(),
        "mul" => {
            let b = Word::parse(rhs).map_err(|e| e.to_string())?;
            a.mul(&b).to_string()
        }
        other => return Err(format!("unknown word operation {other}")),
    })
}

pub fn convolve_impl(lhs: &str, rhs: &str) -> Result<String, String> {
    let f = parse_vector(lhs)?;
    let g = parse_vector(rhs)?;
    Ok(vector_lines(&f.convolve(&g)))
}

pub fn measure_impl(state: &str, kind: &str, seed: u64, samples: u32) -> Result<String, String> {
    let psi = parse_vector(state)?;
    let rho = DensityOperator::pure(&psi).map_err(|e| e.to_string())?;
    let kind = match kind {
        "message" => MeasurementKind::Message,
        "length" => MeasurementKind::Length,
        "positive" => MeasurementKind::Positive,
        other => return Err(format!("unknown measurement kind {other}")),
    };
    let dist = outcome_distribution(kind, &rho);
    if dist.is_empty() {
        return Err("no outcome has positive probability".into());
    }
    let labels: Vec<String> = dist
        .iter()
        .map(|(value, _, _)| match value {
            OutcomeValue::Word(w) | OutcomeValue::PositiveWord(w) => w.clone(),
            OutcomeValue::Length(n) => n.to_string(),
            OutcomeValue::NotPositive => "(-)".into(),
            OutcomeValue::Bit(b) => b.to_string(),
            OutcomeValue::Spectral(r) => fmt(*r),
        })
        .collect();
    let mut counts = vec![0u32; dist.len()];
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let total: f64 = dist.iter().map(|(_, p, _)| p).sum();
    for _ in 0..samples {
        let mut u = rng.gen_range(0.0..total);
        let mut hit = dist.len() - 1;
        for (k, (_, p, _)) in dist.iter().enumerate() {
            u -= p;
            if u <= 0.0 {
                hit = k;
                break;
            }
        }
        counts[hit] += 1;
    }
    let e = entropies(&rho);
    let mut out = String::new();
    out.push_str(&format!(
        "seed {seed}, {samples} samples; source entropy {} nats, von Neumann {}\n",
        fmt(e.source),
        fmt(e.von_neumann)
    ));
    out.push_str("outcome\tprobability\tobserved\n");
    for ((label, (_, p, _)), count) in labels.iter().zip(&dist).zip(&counts) {
        out.push_str(&format!(
            "{label}\t{}\t{}\n",
            fmt(*p),
            fmt(f64::from(*count) / f64::from(samples.max(1)))
        ));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn word_calc(op: &str, lhs: &str, rhs: &str) -> Result<String, JsError> {
    word_calc_impl(op, lhs, rhs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn convolve(lhs: &str, rhs: &str) -> Result<String, JsError> {
    convolve_impl(lhs, rhs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn measure_sample(state: &str, kind: &str, seed: u64, samples: u32) -> Result<String, JsError> {
    measure_impl(state, kind, seed, samples).map_err(|e| JsError::new(&e))
}
