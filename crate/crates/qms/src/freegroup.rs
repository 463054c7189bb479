//! Exact arithmetic in the free group FG(2).
//!
//! Elements are reduced words over the alphabet {0,1,2,3} with 2 = 0⁻¹ and
//! 3 = 1⁻¹. Reduction removes the cancelling digrams 02, 13, 20, 31 and is
//! confluent, so every element has exactly one reduced spelling.

use crate::{QmsError, Result};
use std::fmt;

/// Default cap on word lengths for sphere/ball enumeration.
pub const ENUMERATION_BUDGET: usize = 12;

/// One alphabet symbol: 0, 1 are bits; 2, 3 the corresponding anti-bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(value: u8) -> Result<Self> {
        if value < 4 {
            Ok(Letter(value))
        } else {
            Err(QmsError::Parse(format!("letter out of range: {value}")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// The inverse symbol: 0↔2, 1↔3.
    pub fn inv(self) -> Letter {
        Letter((self.0 + 2) % 4)
    }

    /// True for the bit letters 0 and 1.
    pub fn is_bit(self) -> bool {
        self.0 < 2
    }
}

/// A reduced word; the canonical representation of an element of FG(2).
///
/// Reduction happens eagerly at construction, so equality of `Word`s is
/// structural equality of group elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    /// The empty word Λ.
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Builds a word from raw letters, reducing cancelling digrams.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inv()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word(stack)
    }

    /// Parses the canonical text form: "e" for Λ, otherwise digits 0-3.
    pub fn parse(text: &str) -> Result<Word> {
        if text == "e" {
            return Ok(Word::identity());
        }
        if text.is_empty() {
            return Err(QmsError::Parse(
                "empty string; use \"e\" for the identity".into(),
            ));
        }
        let mut letters = Vec::with_capacity(text.len());
        for c in text.chars() {
            let d = c
                .to_digit(10)
                .filter(|&d| d < 4)
                .ok_or_else(|| QmsError::Parse(format!("invalid letter {c:?} in {text:?}")))?;
            letters.push(Letter(d as u8));
        }
        Ok(Word::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Word length #x.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if every letter is a bit, i.e. the word lies in 2*.
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.is_bit())
    }

    /// Group product: concatenate and reduce.
    pub fn mul(&self, other: &Word) -> Word {
        let mut stack = self.0.clone();
        for &l in &other.0 {
            if stack.last() == Some(&l.inv()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word(stack)
    }

    /// Group inverse: inverse letters in reverse order.
    pub fn inv(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// n-th power (n may be negative).
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Length of the common initial segment of `self` and `prefix`.
    ///
    /// `prefix` stands for the start of an infinite reduced word, so it must
    /// be at least as long as `self` for the agreement to be decidable.
    pub fn prefix_agreement(&self, prefix: &Word) -> Result<usize> {
        if prefix.len() < self.len() {
            return Err(QmsError::Precondition(format!(
                "prefix of length {} cannot determine agreement with word of length {}",
                prefix.len(),
                self.len()
            )));
        }
        Ok(self
            .0
            .iter()
            .zip(&prefix.0)
            .take_while(|(a, b)| a == b)
            .count())
    }

    /// First `n` letters as a word (already reduced).
    pub fn truncate(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "e")
        } else {
            for l in &self.0 {
                write!(f, "{}", l.value())?;
            }
            Ok(())
        }
    }
}

/// All reduced words of length `n`, in lexicographic order.
///
/// Sizes: 1 for n = 0, then 4·3ⁿ⁻¹.
pub fn sphere(n: usize) -> Result<Vec<Word>> {
    sphere_with_budget(n, ENUMERATION_BUDGET)
}

pub fn sphere_with_budget(n: usize, budget: usize) -> Result<Vec<Word>> {
    if n > budget {
        return Err(QmsError::Budget(format!(
            "sphere({n}) exceeds enumeration budget {budget}"
        )));
    }
    let mut current = vec![Word::identity()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(current.len() * 3 + 1);
        for w in &current {
            for v in 0..4u8 {
                let l = Letter(v);
                if w.0.last() != Some(&l.inv()) {
                    let mut ext = w.0.clone();
                    ext.push(l);
                    next.push(Word(ext));
                }
            }
        }
        current = next;
    }
    Ok(current)
}

/// Number of reduced words of length `n`.
pub fn sphere_size(n: usize) -> usize {
    if n == 0 {
        1
    } else {
        4 * 3usize.pow(n as u32 - 1)
    }
}

/// All reduced words of length at most `n`, spheres in increasing order.
pub fn ball(n: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(sphere(k)?);
    }
    Ok(out)
}

/// Decomposes `x` with respect to the Z-action n ↦ aⁿ·x.
///
/// Returns (n, z) with x = aⁿ·z and z a minimum-length word in the orbit of
/// x. Each step by a shifts the length by at least the cyclically reduced
/// core of a (≥ 1 letter), so powers beyond #x + #a cannot shorten further.
pub fn orbit_decompose(a: &Word, x: &Word) -> Result<(i64, Word)> {
    if a.is_empty() {
        return Err(QmsError::Precondition(
            "orbit decomposition needs a nontrivial translation word".into(),
        ));
    }
    let bound = (x.len() + a.len()) as i64;
    let mut best: Option<(i64, Word)> = None;
    for k in -bound..=bound {
        let z = a.pow(-k).mul(x);
        match &best {
            Some((_, zb)) if zb.len() <= z.len() => {}
            _ => best = Some((k, z)),
        }
    }
    Ok(best.expect("nonempty scan"))
}
