//! Points with canonical encodings per carrier family.
//!
//! Equality, hashing, and ordering go through the canonical encoding:
//! lattice points are coordinate tuples, free-group elements are reduced
//! words (generators `a, b, ...`, inverses `A, B, ...`), finite-graph
//! vertices are ids, and collar points are (boundary index, depth index)
//! pairs. The derived `Ord` is the canonical order used wherever the
//! library promises deterministic, least-member-first output.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    /// ℤᵈ lattice point.
    Lattice(Vec<i64>),
    /// Reduced word in a free group; `""` is the identity.
    Word(String),
    /// Vertex of an explicit finite graph.
    Vertex(u64),
    /// Point (a, t) of a collar A × (0, 1]; `depth` indexes the carrier's
    /// depth schedule.
    Collar { boundary: usize, depth: usize },
}

impl Point {
    pub fn origin(dim: usize) -> Point {
        Point::Lattice(vec![0; dim])
    }

    pub fn identity_word() -> Point {
        Point::Word(String::new())
    }

    /// Reduced-word length for words, ℓ¹ norm for lattice points.
    pub fn word_length(&self) -> Option<u64> {
        match self {
            Point::Lattice(v) => Some(v.iter().map(|c| c.unsigned_abs()).sum()),
            Point::Word(w) => Some(w.len() as u64),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Lattice(v) => {
                write!(f, "(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Point::Word(w) => {
                if w.is_empty() {
                    write!(f, "e")
                } else {
                    write!(f, "{w}")
                }
            }
            Point::Vertex(v) => write!(f, "v{v}"),
            Point::Collar { boundary, depth } => write!(f, "({boundary}@{depth})"),
        }
    }
}

/// Cancel adjacent inverse pairs (`aA`, `Aa`, ...) until none remain.
pub fn reduce_word(w: &str) -> String {
    let mut out: Vec<char> = Vec::with_capacity(w.len());
    for c in w.chars() {
        match out.last() {
            Some(&top) if top != c && top.eq_ignore_ascii_case(&c) => {
                out.pop();
            }
            _ => out.push(c),
        }
    }
    out.into_iter().collect()
}

/// Formal inverse: reverse the word and swap case letterwise.
pub fn invert_word(w: &str) -> String {
    w.chars()
        .rev()
        .map(|c| {
            if c.is_ascii_lowercase() {
                c.to_ascii_uppercase()
            } else {
                c.to_ascii_lowercase()
            }
        })
        .collect()
}

/// Reduced product u·v.
pub fn mul_words(u: &str, v: &str) -> String {
    let mut s = String::with_capacity(u.len() + v.len());
    s.push_str(u);
    s.push_str(v);
    reduce_word(&s)
}
