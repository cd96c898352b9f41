use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// One of the two free generators of `F₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FreeGen {
    G1,
    G2,
}

impl FreeGen {
    pub fn other(self) -> Self {
        match self {
            FreeGen::G1 => FreeGen::G2,
            FreeGen::G2 => FreeGen::G1,
        }
    }
}

impl fmt::Display for FreeGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeGen::G1 => f.write_str("g1"),
            FreeGen::G2 => f.write_str("g2"),
        }
    }
}

/// A power `gen^exp` inside a reduced free word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub gen: FreeGen,
    pub exp: i64,
}

impl Syllable {
    pub fn new(gen: FreeGen, exp: i64) -> Self {
        Syllable { gen, exp }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    /// The free abelian group `Zᵈ`.
    Zd { dim: usize },
    /// The discrete Heisenberg group `H₃(Z)`.
    Heisenberg,
    /// The free group on two generators.
    Free2,
}

impl GroupKind {
    pub fn name(&self) -> String {
        match self {
            GroupKind::Zd { dim } => format!("Z^{dim}"),
            GroupKind::Heisenberg => "H3(Z)".to_string(),
            GroupKind::Free2 => "F2".to_string(),
        }
    }

    pub fn is_commutative(&self) -> bool {
        matches!(self, GroupKind::Zd { .. })
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// An exact group element in normal form.
///
/// Free words are kept reduced: no zero exponents and no two adjacent
/// syllables on the same generator. Use [`GroupElement::free2`] to build one
/// from an arbitrary syllable list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElement {
    Zd(Vec<i64>),
    /// `(a, b, c)` with product `(a₁+a₂, b₁+b₂, a₁b₂+c₁+c₂)`.
    Heisenberg([i64; 3]),
    Free2(Vec<Syllable>),
}

impl GroupElement {
    pub fn identity(kind: GroupKind) -> Self {
        match kind {
            GroupKind::Zd { dim } => GroupElement::Zd(vec![0; dim]),
            GroupKind::Heisenberg => GroupElement::Heisenberg([0; 3]),
            GroupKind::Free2 => GroupElement::Free2(Vec::new()),
        }
    }

    pub fn zd(coords: impl Into<Vec<i64>>) -> Self {
        GroupElement::Zd(coords.into())
    }

    pub fn heisenberg(a: i64, b: i64, c: i64) -> Self {
        GroupElement::Heisenberg([a, b, c])
    }

    /// Builds a free word and reduces it.
    pub fn free2(syllables: impl IntoIterator<Item = (FreeGen, i64)>) -> Self {
        let mut word = Vec::new();
        for (gen, exp) in syllables {
            push_reduced(&mut word, Syllable::new(gen, exp));
        }
        GroupElement::Free2(word)
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            GroupElement::Zd(v) => GroupKind::Zd { dim: v.len() },
            GroupElement::Heisenberg(_) => GroupKind::Heisenberg,
            GroupElement::Free2(_) => GroupKind::Free2,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Zd(v) => v.iter().all(|&x| x == 0),
            GroupElement::Heisenberg(h) => *h == [0; 3],
            GroupElement::Free2(w) => w.is_empty(),
        }
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Zd(x), GroupElement::Zd(y)) => {
                if x.len() != y.len() {
                    return Err(usage(format!(
                        "cannot multiply elements of Z^{} and Z^{}",
                        x.len(),
                        y.len()
                    )));
                }
                Ok(GroupElement::Zd(x.iter().zip(y).map(|(a, b)| a + b).collect()))
            }
            (GroupElement::Heisenberg([a1, b1, c1]), GroupElement::Heisenberg([a2, b2, c2])) => {
                Ok(GroupElement::Heisenberg([a1 + a2, b1 + b2, a1 * b2 + c1 + c2]))
            }
            (GroupElement::Free2(x), GroupElement::Free2(y)) => {
                let mut word = x.clone();
                for &s in y {
                    push_reduced(&mut word, s);
                }
                Ok(GroupElement::Free2(word))
            }
            _ => Err(usage(format!(
                "cannot multiply an element of {} with an element of {}",
                self.kind(),
                other.kind()
            ))),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Zd(v) => GroupElement::Zd(v.iter().map(|x| -x).collect()),
            GroupElement::Heisenberg([a, b, c]) => GroupElement::Heisenberg([-a, -b, a * b - c]),
            GroupElement::Free2(w) => GroupElement::Free2(
                w.iter()
                    .rev()
                    .map(|s| Syllable::new(s.gen, -s.exp))
                    .collect(),
            ),
        }
    }

    /// Checks the normal-form invariant of free words (always true for the
    /// other variants).
    pub fn is_reduced(&self) -> bool {
        match self {
            GroupElement::Free2(w) => {
                w.iter().all(|s| s.exp != 0) && w.windows(2).all(|p| p[0].gen != p[1].gen)
            }
            _ => true,
        }
    }
}

fn push_reduced(word: &mut Vec<Syllable>, s: Syllable) {
    if s.exp == 0 {
        return;
    }
    match word.last_mut() {
        Some(last) if last.gen == s.gen => {
            last.exp += s.exp;
            if last.exp == 0 {
                word.pop();
            }
        }
        _ => word.push(s),
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Zd(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            GroupElement::Heisenberg([a, b, c]) => write!(f, "({a},{b},{c})"),
            GroupElement::Free2(w) => {
                if w.is_empty() {
                    return f.write_str("e");
                }
                for (i, s) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}^{}", s.gen, s.exp)?;
                }
                Ok(())
            }
        }
    }
}
