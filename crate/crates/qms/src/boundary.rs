//! The Poisson boundary Ω of FG(2): infinite reduced words with the cylinder
//! measure ν(E_x) = 1/(4·3^{#x−1}).
//!
//! Functions depending only on the first d letters of ω are stored exactly as
//! tables over FG(2)_d, so every ω-integral here is a finite sum — no
//! sampling error enters the Plancherel or unitarity identities. The group
//! acts on Ω by left multiplication with Radon–Nikodym cocycle
//! P(x,ω) = 3^{2N(x,ω)−#x}; twisting by P^{1/2+it} gives the unitary
//! principal series, whose matrix coefficients against δ-functions are the
//! Fourier kernel K((λ,ω),x) = P(x,ω)^{1/2+it(λ)} with
//! t(λ) = arccos(2λ/√3)/ln 3.

use crate::freegroup::{sphere, Word};
use crate::harmonic::SpectralGrid;
use crate::hilbert::{Complex64, StateVector};
use crate::{QmsError, Result};
use rand::Rng;
use std::collections::BTreeMap;

/// ν(E_x): the measure of the cylinder of infinite words starting with x.
pub fn boundary_measure(x: &Word) -> f64 {
    if x.is_empty() {
        1.0
    } else {
        1.0 / (4.0 * 3f64.powi(x.len() as i32 - 1))
    }
}

/// Draws a length-d prefix of a ν-distributed boundary point: first letter
/// uniform over 4, each later letter uniform over the 3 that do not cancel.
pub fn sample_prefix<R: Rng>(depth: usize, rng: &mut R) -> Word {
    let mut letters: Vec<crate::freegroup::Letter> = Vec::with_capacity(depth);
    for _ in 0..depth {
        loop {
            let l = crate::freegroup::Letter::new(rng.gen_range(0..4u8)).unwrap();
            if letters.last() != Some(&l.inv()) {
                letters.push(l);
                break;
            }
        }
    }
    Word::from_letters(letters)
}

/// The known prefix of x·ω given a known prefix of ω, as raw letters.
/// Cancellation happens only at the junction: trailing letters of x are
/// popped while they invert the leading prefix letters, and the surviving
/// tail is appended verbatim. On reduced prefixes this coincides with full
/// reduction; on raw digit streams it reproduces the stream past the
/// junction letter for letter.
pub fn boundary_action_raw(
    x: &Word,
    prefix: &[crate::freegroup::Letter],
) -> Result<Vec<crate::freegroup::Letter>> {
    if prefix.len() < x.len() {
        return Err(QmsError::Precondition(format!(
            "prefix of length {} is too short to act by a word of length {}",
            prefix.len(),
            x.len()
        )));
    }
    let mut head: Vec<crate::freegroup::Letter> = x.letters().to_vec();
    let mut k = 0;
    while k < prefix.len() {
        match head.last() {
            Some(&l) if l == prefix[k].inv() => {
                head.pop();
                k += 1;
            }
            _ => break,
        }
    }
    head.extend_from_slice(&prefix[k..]);
    Ok(head)
}

/// The known prefix of x·ω given a known (reduced) prefix of ω. The result
/// is reliable to depth `prefix.len() − #x`.
pub fn boundary_action(x: &Word, prefix: &Word) -> Result<Word> {
    Ok(Word::from_letters(boundary_action_raw(x, prefix.letters())?))
}

/// P(x,ω) = 3^{2N(x,ω)−#x}, where N is the prefix agreement of x and ω.
pub fn poisson_kernel(x: &Word, prefix: &Word) -> Result<f64> {
    Ok(3f64.powi(poisson_exponent(x, prefix)? as i32))
}

/// The integer m = 2N(x,ω) − #x with P(x,ω) = 3^m.
pub fn poisson_exponent(x: &Word, prefix: &Word) -> Result<i64> {
    let n = x.prefix_agreement(prefix)?;
    Ok(2 * n as i64 - x.len() as i64)
}

/// P(x,ω)^{1/2+it} = 3^{m/2}·e^{i·m·t·ln 3}, exact in the integer m.
pub fn poisson_power(m: i64, t: f64) -> Complex64 {
    Complex64::from_polar(3f64.powf(m as f64 / 2.0), m as f64 * t * 3f64.ln())
}

/// A function on Ω determined by the first `depth` letters: a table over
/// FG(2)_depth.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderFunction {
    depth: usize,
    table: BTreeMap<Word, Complex64>,
}

impl CylinderFunction {
    pub fn constant(c: Complex64) -> CylinderFunction {
        CylinderFunction {
            depth: 0,
            table: std::iter::once((Word::identity(), c)).collect(),
        }
    }

    /// 1_{E_x}: the indicator of the cylinder at x, at depth #x.
    pub fn indicator(x: &Word) -> CylinderFunction {
        CylinderFunction::from_fn(x.len(), |y| {
            if y == x {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .expect("indicator depth is the word's own length")
    }

    /// Tabulates `f` over the sphere of the given depth.
    pub fn from_fn<F: FnMut(&Word) -> Complex64>(depth: usize, mut f: F) -> Result<CylinderFunction> {
        let table = sphere(depth)?
            .into_iter()
            .map(|y| {
                let v = f(&y);
                (y, v)
            })
            .collect();
        Ok(CylinderFunction { depth, table })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Value on the cylinder E_y, #y = depth.
    pub fn value(&self, y: &Word) -> Complex64 {
        self.table.get(y).copied().unwrap_or_default()
    }

    /// Value at any boundary point whose prefix is known at least to depth.
    pub fn value_at_prefix(&self, prefix: &Word) -> Result<Complex64> {
        if prefix.len() < self.depth {
            return Err(QmsError::Precondition(format!(
                "prefix of length {} cannot evaluate a depth-{} cylinder function",
                prefix.len(),
                self.depth
            )));
        }
        Ok(self.value(&prefix.truncate(self.depth)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.table.iter()
    }

    /// Re-tabulates at a finer depth; the function and every integral are
    /// unchanged because each cylinder splits into equal-measure children.
    pub fn promote(&self, depth: usize) -> Result<CylinderFunction> {
        if depth < self.depth {
            return Err(QmsError::Precondition(format!(
                "cannot demote a depth-{} cylinder function to depth {depth}",
                self.depth
            )));
        }
        if depth == self.depth {
            return Ok(self.clone());
        }
        CylinderFunction::from_fn(depth, |y| self.value(&y.truncate(self.depth)))
    }

    /// ∫ ξ dν as an exact finite sum.
    pub fn integral(&self) -> Complex64 {
        self.table
            .iter()
            .map(|(y, c)| c * boundary_measure(y))
            .sum()
    }

    /// ⟨ξ|η⟩_{L²(ν)} = ∫ conj(ξ)·η dν, promoting to a common depth.
    pub fn l2_inner(&self, other: &CylinderFunction) -> Complex64 {
        let depth = self.depth.max(other.depth);
        let a = self.promote(depth).expect("promotion to max depth");
        let b = other.promote(depth).expect("promotion to max depth");
        a.table
            .iter()
            .map(|(y, c)| c.conj() * b.value(y) * boundary_measure(y))
            .sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.table
            .iter()
            .map(|(y, c)| c.norm_sqr() * boundary_measure(y))
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> CylinderFunction {
        CylinderFunction {
            depth: self.depth,
            table: self.table.iter().map(|(y, v)| (y.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &CylinderFunction) -> CylinderFunction {
        let depth = self.depth.max(other.depth);
        let a = self.promote(depth).expect("promotion to max depth");
        let b = other.promote(depth).expect("promotion to max depth");
        CylinderFunction {
            depth,
            table: a
                .table
                .iter()
                .map(|(y, c)| (y.clone(), c + b.value(y)))
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &CylinderFunction) -> f64 {
        let depth = self.depth.max(other.depth);
        let a = self.promote(depth).expect("promotion to max depth");
        let b = other.promote(depth).expect("promotion to max depth");
        a.table
            .iter()
            .map(|(y, c)| (c - b.value(y)).norm())
            .fold(0.0, f64::max)
    }

    /// ω ↦ ξ(x·ω), exact at depth `depth + #x`.
    pub fn pull_back(&self, x: &Word) -> Result<CylinderFunction> {
        let depth = self.depth + x.len();
        CylinderFunction::from_fn(depth, |y| {
            self.value_at_prefix(&x.mul(y))
                .expect("x·y retains at least the required depth")
        })
    }
}

/// (π_{1/2+it}(x)ξ)(ω) = P(x,ω)^{1/2+it}·ξ(x⁻¹·ω), exact on cylinders of
/// depth d + #x.
pub fn principal_apply(x: &Word, t: f64, xi: &CylinderFunction) -> CylinderFunction {
    let depth = xi.depth() + x.len();
    let x_inv = x.inv();
    CylinderFunction::from_fn(depth, |y| {
        let m = poisson_exponent(x, y).expect("cylinder words are deep enough");
        poisson_power(m, t)
            * xi
                .value_at_prefix(&x_inv.mul(y))
                .expect("x⁻¹·y retains the required depth")
    })
    .expect("principal series output depth is within budget")
}

/// t(λ) = arccos(2λ/√3)/ln 3, the spectral parameter on the principal line.
pub fn t_of_lambda(lambda: f64) -> f64 {
    (2.0 * lambda / 3f64.sqrt()).clamp(-1.0, 1.0).acos() / 3f64.ln()
}

/// 𝓕(f) sampled at the grid nodes: one exact cylinder function per λ.
#[derive(Debug, Clone)]
pub struct SpectralField {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    fields: Vec<CylinderFunction>,
}

impl SpectralField {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn fields(&self) -> &[CylinderFunction] {
        &self.fields
    }

    pub fn depth(&self) -> usize {
        self.fields.first().map_or(0, |f| f.depth())
    }

    /// ∫∫ |Ψ|² dν w(λ)dλ — the right-hand side of the Plancherel identity.
    pub fn norm_sq(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.fields)
            .map(|(v, xi)| v * xi.l2_norm_sq())
            .sum()
    }
}

/// 𝓕(f)(λ,ω) = Σ_x P(x,ω)^{1/2+it(λ)}·f(x), exact in ω at the depth of the
/// deepest word in supp(f).
pub fn fourier_forward(f: &StateVector, grid: &SpectralGrid) -> Result<SpectralField> {
    let depth = f.max_word_len();
    let terms: Vec<(Word, Complex64)> = f.iter().map(|(x, c)| (x.clone(), *c)).collect();
    let mut fields = Vec::with_capacity(grid.len());
    for &lambda in grid.nodes() {
        let t = t_of_lambda(lambda);
        fields.push(CylinderFunction::from_fn(depth, |y| {
            terms
                .iter()
                .map(|(x, c)| {
                    let m = poisson_exponent(x, y).expect("depth covers the support");
                    poisson_power(m, t) * c
                })
                .sum()
        })?);
    }
    Ok(SpectralField {
        nodes: grid.nodes().to_vec(),
        weights: grid.weights().to_vec(),
        fields,
    })
}

/// f(x) = ∫∫ P(x,ω)^{1/2−it(λ)}·Ψ(λ,ω) dν(ω) w(λ)dλ, cylinder-exact in ω
/// and quadrature in λ, for every x in the requested ball.
pub fn fourier_inverse(field: &SpectralField, ball_radius: usize) -> Result<StateVector> {
    if field.depth() < ball_radius {
        return Err(QmsError::Precondition(format!(
            "field depth {} cannot resolve the ball of radius {ball_radius}",
            field.depth()
        )));
    }
    let words = crate::freegroup::ball(ball_radius)?;
    let mut amplitudes: Vec<Complex64> = vec![Complex64::default(); words.len()];
    for ((&lambda, &v), xi) in field
        .nodes
        .iter()
        .zip(&field.weights)
        .zip(&field.fields)
    {
        let t = t_of_lambda(lambda);
        for (x, amp) in words.iter().zip(amplitudes.iter_mut()) {
            let inner: Complex64 = xi
                .iter()
                .map(|(y, c)| {
                    let m = poisson_exponent(x, y).expect("field depth covers the ball");
                    poisson_power(m, -t) * c * boundary_measure(y)
                })
                .sum();
            *amp += inner * v;
        }
    }
    Ok(StateVector::from_terms(
        words.into_iter().zip(amplitudes),
    ))
}
