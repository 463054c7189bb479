//! Decidable word sets.
//!
//! A [`WordPredicate`] names a subset A ⊆ FG(2) for which membership is
//! decidable on any word. These are the index sets of the atomic spectral
//! measure M(A); complement and intersection are closed.

use crate::freegroup::{Letter, Word};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WordPredicate {
    /// All of FG(2).
    All,
    /// The empty set.
    None,
    /// Words of length exactly n, i.e. the sphere FG(2)_n.
    LengthEq { n: usize },
    /// Words of length at most n (the ball).
    LengthLe { n: usize },
    /// The positive messages 2*: words over the bit letters only.
    Positive,
    /// The singleton {Λ}.
    Identity,
    /// Words with #x > j whose letter at position j equals `letter`.
    LetterAt { j: usize, letter: u8 },
    /// Words beginning with the given reduced word.
    Prefix { prefix: String },
    /// An explicit finite set (canonical text encoding).
    FiniteSet { words: BTreeSet<String> },
    Not(Box<WordPredicate>),
    And(Vec<WordPredicate>),
    Or(Vec<WordPredicate>),
}

impl WordPredicate {
    pub fn contains(&self, x: &Word) -> bool {
        match self {
            WordPredicate::All => true,
            WordPredicate::None => false,
            WordPredicate::LengthEq { n } => x.len() == *n,
            WordPredicate::LengthLe { n } => x.len() <= *n,
            WordPredicate::Positive => x.is_positive(),
            WordPredicate::Identity => x.is_empty(),
            WordPredicate::LetterAt { j, letter } => {
                x.len() > *j && x.letters()[*j].value() == *letter
            }
            WordPredicate::Prefix { prefix } => {
                let p = Word::parse(prefix).expect("prefix predicates hold canonical text");
                x.len() >= p.len() && x.letters()[..p.len()] == *p.letters()
            }
            WordPredicate::FiniteSet { words } => words.contains(&x.to_string()),
            WordPredicate::Not(p) => !p.contains(x),
            WordPredicate::And(ps) => ps.iter().all(|p| p.contains(x)),
            WordPredicate::Or(ps) => ps.iter().any(|p| p.contains(x)),
        }
    }

    pub fn complement(self) -> WordPredicate {
        match self {
            WordPredicate::All => WordPredicate::None,
            WordPredicate::None => WordPredicate::All,
            WordPredicate::Not(p) => *p,
            p => WordPredicate::Not(Box::new(p)),
        }
    }

    pub fn intersect(self, other: WordPredicate) -> WordPredicate {
        WordPredicate::And(vec![self, other])
    }

    pub fn singleton(x: &Word) -> WordPredicate {
        WordPredicate::FiniteSet {
            words: std::iter::once(x.to_string()).collect(),
        }
    }

    /// The set behind the extended-bit observable value b at position j.
    pub fn letter_at(j: usize, letter: Letter) -> WordPredicate {
        WordPredicate::LetterAt {
            j,
            letter: letter.value(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn membership() {
        assert!(WordPredicate::Positive.contains(&w("0110")));
        assert!(!WordPredicate::Positive.contains(&w("23")));
        assert!(WordPredicate::Positive.contains(&Word::identity()));
        assert!(WordPredicate::LengthEq { n: 2 }.contains(&w("01")));
        assert!(WordPredicate::Identity.contains(&w("e")));
        assert!(WordPredicate::LetterAt { j: 1, letter: 3 }.contains(&w("03")));
        assert!(!WordPredicate::LetterAt { j: 2, letter: 3 }.contains(&w("03")));
        assert!(WordPredicate::Prefix {
            prefix: "01".into()
        }
        .contains(&w("011")));
    }

    #[test]
    fn complement_and_intersection() {
        let p = WordPredicate::LengthLe { n: 1 };
        assert!(p.clone().complement().contains(&w("01")));
        assert!(!p.clone().complement().contains(&w("0")));
        let both = p.intersect(WordPredicate::Positive);
        assert!(both.contains(&w("1")));
        assert!(!both.contains(&w("2")));
    }
}
