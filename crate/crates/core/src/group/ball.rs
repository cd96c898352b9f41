use std::collections::HashMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{GroupDescriptor, GroupElement};
use crate::error::{Error, Result};

/// Default cap on the number of ball elements a BFS may store.
pub const DEFAULT_BALL_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, Copy)]
pub struct BfsOptions {
    pub cap: u64,
}

impl Default for BfsOptions {
    fn default() -> Self {
        BfsOptions {
            cap: DEFAULT_BALL_CAP,
        }
    }
}

/// The ball `F^N` split into spheres, with one BFS parent per element.
///
/// Elements are stored sphere by sphere in discovery order, so `ball(n)` is a
/// prefix of the element list. Every non-identity element `x` has a parent
/// `p` and a generator `u` with `x = p · u` and `τ(p) = τ(x) - 1`.
#[derive(Debug, Clone)]
pub struct BallTable {
    group: GroupDescriptor,
    elements: Vec<GroupElement>,
    lengths: Vec<u32>,
    parents: Vec<Option<(u32, u16)>>,
    sphere_offsets: Vec<usize>,
    index: HashMap<GroupElement, u32>,
}

/// Serializable summary of a ball table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSummary {
    pub group: String,
    pub generators: Vec<String>,
    pub radius: u32,
    pub sphere_sizes: Vec<u64>,
    pub cumulative: Vec<u64>,
}

/// Breadth-first enumeration of `F^N` in the Cayley graph.
pub fn bfs_balls(desc: &GroupDescriptor, radius: u32, opts: BfsOptions) -> Result<BallTable> {
    match desc.closed_form_ball_size(radius) {
        Some(projected) if projected > opts.cap => {
            return Err(resource(desc, radius, projected, opts.cap));
        }
        // closed form overflowed u64
        None if desc.has_closed_form_length() => {
            return Err(resource(desc, radius, u64::MAX, opts.cap));
        }
        _ => {}
    }

    let identity = desc.identity();
    let mut elements = vec![identity.clone()];
    let mut lengths = vec![0u32];
    let mut parents = vec![None];
    let mut index = HashMap::new();
    index.insert(identity, 0u32);
    let mut sphere_offsets = vec![0usize, 1];

    for n in 1..=radius {
        let (start, end) = (sphere_offsets[n as usize - 1], sphere_offsets[n as usize]);
        for parent in start..end {
            for (g, gen) in desc.generators().iter().enumerate() {
                let child = elements[parent].multiply(gen)?;
                if index.contains_key(&child) {
                    continue;
                }
                if elements.len() as u64 >= opts.cap {
                    // at least one more element than the cap
                    return Err(resource(desc, radius, elements.len() as u64 + 1, opts.cap));
                }
                index.insert(child.clone(), elements.len() as u32);
                elements.push(child);
                lengths.push(n);
                parents.push(Some((parent as u32, g as u16)));
            }
        }
        sphere_offsets.push(elements.len());
        // Without a closed form, give up early once a cubic extrapolation
        // already overshoots. Heisenberg balls grow quartically, so the cubic
        // projection undershoots the true size and never rejects a ball that fits.
        if !desc.has_closed_form_length() && n >= 8 && n < radius {
            let scale = ((radius + 1) as f64 / (n + 1) as f64).powi(3);
            let projected = elements.len() as f64 * scale;
            if projected > opts.cap as f64 {
                return Err(resource(desc, radius, projected.min(u64::MAX as f64) as u64, opts.cap));
            }
        }
    }

    Ok(BallTable {
        group: desc.clone(),
        elements,
        lengths,
        parents,
        sphere_offsets,
        index,
    })
}

fn resource(desc: &GroupDescriptor, radius: u32, projected: u64, cap: u64) -> Error {
    Error::Resource {
        what: format!("ball of radius {radius} in {}", desc.name()),
        projected,
        cap,
    }
}

impl BallTable {
    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn radius(&self) -> u32 {
        (self.sphere_offsets.len() - 2) as u32
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sphere(&self, n: u32) -> &[GroupElement] {
        let n = n as usize;
        if n + 1 >= self.sphere_offsets.len() {
            return &[];
        }
        &self.elements[self.sphere_offsets[n]..self.sphere_offsets[n + 1]]
    }

    /// All elements of length at most `n` (clamped to the table radius).
    pub fn ball(&self, n: u32) -> &[GroupElement] {
        let n = (n as usize).min(self.sphere_offsets.len() - 2);
        &self.elements[..self.sphere_offsets[n + 1]]
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn sphere_sizes(&self) -> Vec<u64> {
        self.sphere_offsets
            .windows(2)
            .map(|w| (w[1] - w[0]) as u64)
            .collect()
    }

    pub fn cumulative(&self) -> Vec<u64> {
        self.sphere_offsets[1..].iter().map(|&x| x as u64).collect()
    }

    pub fn index_of(&self, x: &GroupElement) -> Option<usize> {
        self.index.get(x).map(|&i| i as usize)
    }

    pub fn length_of(&self, x: &GroupElement) -> Option<u32> {
        self.index_of(x).map(|i| self.lengths[i])
    }

    pub fn length_at(&self, i: usize) -> u32 {
        self.lengths[i]
    }

    /// BFS parent `(parent element, generator)` of a stored element.
    pub fn parent(&self, x: &GroupElement) -> Option<(&GroupElement, &GroupElement)> {
        let i = self.index_of(x)?;
        self.parents[i].map(|(p, g)| {
            (
                &self.elements[p as usize],
                &self.group.generators()[g as usize],
            )
        })
    }

    /// Generators `u₁, …, u_k` with `x = u₁ ⋯ u_k` and `k = τ(x)`, read off
    /// the parent links.
    pub fn factorization(&self, x: &GroupElement) -> Option<Vec<GroupElement>> {
        let mut i = self.index_of(x)?;
        let mut gens = Vec::with_capacity(self.lengths[i] as usize);
        while let Some((p, g)) = self.parents[i] {
            gens.push(self.group.generators()[g as usize].clone());
            i = p as usize;
        }
        gens.reverse();
        Some(gens)
    }

    /// The ancestor of `x` at depth `depth` along the parent links.
    pub fn ancestor(&self, x: &GroupElement, depth: u32) -> Option<&GroupElement> {
        let mut i = self.index_of(x)?;
        if depth > self.lengths[i] {
            return None;
        }
        while self.lengths[i] > depth {
            i = self.parents[i]?.0 as usize;
        }
        Some(&self.elements[i])
    }

    pub fn summary(&self) -> BallSummary {
        BallSummary {
            group: self.group.name(),
            generators: self
                .group
                .generating_set()
                .iter()
                .map(|g| g.to_string())
                .collect(),
            radius: self.radius(),
            sphere_sizes: self.sphere_sizes(),
            cumulative: self.cumulative(),
        }
    }

    /// Writes the element list as CSV: `length,element`, one normal form per row.
    pub fn write_elements_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "length,element")?;
        for (x, len) in self.elements.iter().zip(&self.lengths) {
            writeln!(out, "{len},\"{x}\"")?;
        }
        Ok(())
    }
}
