//! Exact arithmetic, word lengths and ball growth in `Zᵈ`, `H₃(Z)` and `F₂`.

mod ball;
mod element;
mod growth;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use ball::{bfs_balls, BallSummary, BallTable, BfsOptions, DEFAULT_BALL_CAP};
pub use element::{FreeGen, GroupElement, GroupKind, Syllable};
pub use growth::{
    additivity_witness, bass_guivarch, exhaustive_pairs, growth_order_fit, triangle_check,
    AdditivityWitness, GrowthClass, GrowthFit, TriangleReport,
};

use crate::error::{usage, Error, Result};

/// A concrete group together with its symmetric generating set.
///
/// The generating set always contains the identity. For `Zᵈ` it is every
/// vector with entries in `{-1, 0, 1}`; for `H₃(Z)` it is the identity and
/// `(±1,0,0), (0,±1,0), (0,0,±1)`; for `F₂` it is `{e, g1^±1, g2^±1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    kind: GroupKind,
    generators: Vec<GroupElement>,
}

impl GroupDescriptor {
    pub fn zd(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(usage("Z^d needs d >= 1"));
        }
        // Lexicographically descending over {1, 0, -1}^d, identity skipped.
        let total = 3usize.pow(dim as u32);
        let mut generators = Vec::with_capacity(total - 1);
        for code in 0..total {
            let mut rest = code;
            let mut v = vec![0i64; dim];
            for slot in v.iter_mut().rev() {
                *slot = 1 - (rest % 3) as i64;
                rest /= 3;
            }
            if v.iter().any(|&x| x != 0) {
                generators.push(GroupElement::Zd(v));
            }
        }
        Ok(GroupDescriptor {
            kind: GroupKind::Zd { dim },
            generators,
        })
    }

    pub fn heisenberg() -> Self {
        let generators = [
            [1, 0, 0],
            [-1, 0, 0],
            [0, 1, 0],
            [0, -1, 0],
            [0, 0, 1],
            [0, 0, -1],
        ]
        .into_iter()
        .map(GroupElement::Heisenberg)
        .collect();
        GroupDescriptor {
            kind: GroupKind::Heisenberg,
            generators,
        }
    }

    pub fn free2() -> Self {
        let generators = [
            (FreeGen::G1, 1),
            (FreeGen::G1, -1),
            (FreeGen::G2, 1),
            (FreeGen::G2, -1),
        ]
        .into_iter()
        .map(|s| GroupElement::free2([s]))
        .collect();
        GroupDescriptor {
            kind: GroupKind::Free2,
            generators,
        }
    }

    pub fn for_kind(kind: GroupKind) -> Result<Self> {
        match kind {
            GroupKind::Zd { dim } => Self::zd(dim),
            GroupKind::Heisenberg => Ok(Self::heisenberg()),
            GroupKind::Free2 => Ok(Self::free2()),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn name(&self) -> String {
        self.kind.name()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.kind)
    }

    /// Non-identity generators, in the fixed order used by the BFS.
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// The full generating set `F`, identity first.
    pub fn generating_set(&self) -> Vec<GroupElement> {
        std::iter::once(self.identity())
            .chain(self.generators.iter().cloned())
            .collect()
    }

    pub fn has_closed_form_length(&self) -> bool {
        !matches!(self.kind, GroupKind::Heisenberg)
    }

    /// `τ(x)` by formula where one exists: the max-norm on `Zᵈ`, the reduced
    /// word length on `F₂`.
    pub fn closed_form_length(&self, x: &GroupElement) -> Option<u64> {
        match x {
            GroupElement::Zd(v) => Some(v.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)),
            GroupElement::Free2(w) => Some(w.iter().map(|s| s.exp.unsigned_abs()).sum()),
            GroupElement::Heisenberg(_) => None,
        }
    }

    /// A length that is guaranteed to be at least `τ(x)`.
    pub fn length_upper_bound(&self, x: &GroupElement) -> u64 {
        match x {
            // (a,b,c) = (1,0,0)^a (0,1,0)^b (0,0,1)^(c-ab)
            GroupElement::Heisenberg([a, b, c]) => {
                a.unsigned_abs() + b.unsigned_abs() + (c - a * b).unsigned_abs()
            }
            _ => self.closed_form_length(x).unwrap_or(0),
        }
    }

    /// `|Fⁿ|` by formula, when known.
    pub fn closed_form_ball_size(&self, n: u32) -> Option<u64> {
        match self.kind {
            GroupKind::Zd { dim } => (2 * n as u64 + 1).checked_pow(dim as u32),
            GroupKind::Free2 => 3u64.checked_pow(n).and_then(|p| p.checked_mul(2)).map(|p| p - 1),
            GroupKind::Heisenberg => None,
        }
    }

    /// Sphere sizes `|Fⁿ \ Fⁿ⁻¹|` for `n = 0..=radius`, when known in closed form.
    pub fn closed_form_sphere_sizes(&self, radius: u32) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(radius as usize + 1);
        let mut prev = 0u64;
        for n in 0..=radius {
            let cur = self.closed_form_ball_size(n)?;
            out.push(cur - prev);
            prev = cur;
        }
        Some(out)
    }

    fn check_member(&self, x: &GroupElement) -> Result<()> {
        if x.kind() != self.kind {
            return Err(usage(format!(
                "element {x} of {} used with group {}",
                x.kind(),
                self.kind
            )));
        }
        Ok(())
    }
}

/// Word length `τ(x)` with respect to the descriptor's generating set.
///
/// Closed forms are used for `Zᵈ` and `F₂`. `H₃(Z)` needs a BFS table that
/// contains `x`; otherwise an out-of-range error names a radius that would.
pub fn word_length(
    x: &GroupElement,
    desc: &GroupDescriptor,
    table: Option<&BallTable>,
) -> Result<u64> {
    desc.check_member(x)?;
    if let Some(len) = desc.closed_form_length(x) {
        return Ok(len);
    }
    let table = table.ok_or_else(|| Error::OutOfRange {
        element: x.to_string(),
        radius: 0,
        required_radius: desc.length_upper_bound(x),
    })?;
    if table.group() != desc {
        return Err(usage("ball table was built for a different group"));
    }
    table
        .length_of(x)
        .map(u64::from)
        .ok_or_else(|| Error::OutOfRange {
            element: x.to_string(),
            radius: table.radius(),
            required_radius: desc.length_upper_bound(x),
        })
}

/// A length oracle: a group plus an optional BFS table for groups without a
/// closed-form length.
#[derive(Debug, Clone)]
pub struct WordMetric {
    desc: GroupDescriptor,
    table: Option<Arc<BallTable>>,
}

impl WordMetric {
    pub fn closed_form(desc: GroupDescriptor) -> Self {
        WordMetric { desc, table: None }
    }

    pub fn with_table(table: Arc<BallTable>) -> Self {
        WordMetric {
            desc: table.group().clone(),
            table: Some(table),
        }
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.desc
    }

    pub fn table(&self) -> Option<&BallTable> {
        self.table.as_deref()
    }

    pub fn length(&self, x: &GroupElement) -> Result<u64> {
        word_length(x, &self.desc, self.table.as_deref())
    }
}
