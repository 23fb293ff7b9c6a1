use std::fmt;

use serde::{Deserialize, Serialize};

use super::group::{mask_of, Perm, PermGroup};
use crate::error::{Error, Result};

/// A labelled edge: an injection from a label set `B ⊆ [q]` into the vertices.
///
/// Stored as parallel vectors with `labels` strictly increasing; the derived order
/// (labels first, then values) is the fixed total order used for canonical forms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabelledEdge {
    labels: Vec<u32>,
    values: Vec<u32>,
}

impl LabelledEdge {
    /// Builds from `(label, vertex)` pairs; labels and vertices must each be distinct.
    pub fn new(pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut pairs: Vec<(u32, u32)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Invalid("labelled edge repeats a label".into()));
        }
        let mut vals: Vec<u32> = pairs.iter().map(|p| p.1).collect();
        vals.sort_unstable();
        if vals.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("labelled edge is not injective".into()));
        }
        if pairs.iter().any(|p| p.0 >= 32) {
            return Err(Error::Invalid("labels must be below 32".into()));
        }
        Ok(LabelledEdge { labels: pairs.iter().map(|p| p.0).collect(), values: pairs.iter().map(|p| p.1).collect() })
    }

    /// From already sorted, valid parts.
    pub(crate) fn from_sorted(labels: Vec<u32>, values: Vec<u32>) -> Self {
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        LabelledEdge { labels, values }
    }

    pub fn empty() -> Self {
        LabelledEdge { labels: Vec::new(), values: Vec::new() }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn domain_mask(&self) -> u32 {
        mask_of(&self.labels)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.labels.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, label: u32) -> Option<u32> {
        self.labels.binary_search(&label).ok().map(|k| self.values[k])
    }

    /// The image as a sorted vertex set.
    pub fn image(&self) -> Vec<u32> {
        let mut v = self.values.clone();
        v.sort_unstable();
        v
    }

    /// Restriction to the labels in `mask`.
    pub fn restrict(&self, mask: u32) -> LabelledEdge {
        let (labels, values) = self.pairs().filter(|(l, _)| mask & (1 << l) != 0).unzip();
        LabelledEdge { labels, values }
    }

    /// True when `self` is a restriction of `other`.
    pub fn is_restriction_of(&self, other: &LabelledEdge) -> bool {
        self.pairs().all(|(l, v)| other.get(l) == Some(v))
    }

    /// `ψσ = ψ ∘ σ|_{σ^{-1}(B)}`: defined on `σ^{-1}(B)` with `(ψσ)(x) = ψ(σ(x))`.
    pub fn compose_perm(&self, sigma: &[u32]) -> LabelledEdge {
        let inv = super::group::inverse(sigma);
        let mut pairs: Vec<(u32, u32)> = self.pairs().map(|(l, v)| (inv[l as usize], v)).collect();
        pairs.sort_unstable();
        LabelledEdge { labels: pairs.iter().map(|p| p.0).collect(), values: pairs.iter().map(|p| p.1).collect() }
    }

    /// The orbit `ψΣ`, sorted and deduplicated.
    pub fn orbit(&self, group: &PermGroup) -> Vec<LabelledEdge> {
        let mut out: Vec<LabelledEdge> = group.elements().iter().map(|s| self.compose_perm(s)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Lexicographic minimum of the orbit.
    pub fn canonical(&self, group: &PermGroup) -> LabelledEdge {
        group.elements().iter().map(|s| self.compose_perm(s)).min().unwrap_or_else(|| self.clone())
    }

    /// Group elements `σ` with `ψσ = target`.
    pub fn transporters<'g>(&self, target: &LabelledEdge, group: &'g PermGroup) -> Vec<&'g Perm> {
        group.elements().iter().filter(|s| self.compose_perm(s) == *target).collect()
    }
}

impl fmt::Display for LabelledEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, (l, v)) in self.pairs().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}->{v}")?;
        }
        f.write_str(")")
    }
}
