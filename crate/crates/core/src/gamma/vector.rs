use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::masks_of_size;
use crate::combinatorics::{ColouredMultigraph, Digraph};
use crate::complex::group::bits;
use crate::complex::{LabelledComplex, LabelledEdge};
use crate::error::{Error, Result};

/// Sparse `Φ_r -> ℤ^D`; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VectorDoc", into = "VectorDoc")]
pub struct EdgeVector {
    dim: usize,
    entries: BTreeMap<LabelledEdge, Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct VectorDoc {
    dim: usize,
    entries: Vec<(Vec<(u32, u32)>, Vec<i64>)>,
}

impl TryFrom<VectorDoc> for EdgeVector {
    type Error = Error;
    fn try_from(d: VectorDoc) -> Result<Self> {
        let mut v = EdgeVector::new(d.dim);
        for (p, x) in d.entries {
            v.add(LabelledEdge::new(p)?, &x)?;
        }
        Ok(v)
    }
}

impl From<EdgeVector> for VectorDoc {
    fn from(v: EdgeVector) -> Self {
        VectorDoc { dim: v.dim, entries: v.entries.into_iter().map(|(e, x)| (e.pairs().collect(), x)).collect() }
    }
}

impl EdgeVector {
    pub fn new(dim: usize) -> Self {
        EdgeVector { dim, entries: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `x` at `e`, dropping the entry if it becomes zero.
    pub fn add(&mut self, e: LabelledEdge, x: &[i64]) -> Result<()> {
        self.add_scaled(e, x, 1)
    }

    pub fn add_scaled(&mut self, e: LabelledEdge, x: &[i64], k: i64) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if k == 0 || x.iter().all(|&v| v == 0) {
            return Ok(());
        }
        let slot = self.entries.entry(e.clone()).or_insert_with(|| vec![0; x.len()]);
        for (s, v) in slot.iter_mut().zip(x) {
            *s += k * v;
        }
        if slot.iter().all(|&v| v == 0) {
            self.entries.remove(&e);
        }
        Ok(())
    }

    /// `self += k * other`.
    pub fn add_vector(&mut self, other: &EdgeVector, k: i64) -> Result<()> {
        for (e, x) in &other.entries {
            self.add_scaled(e.clone(), x, k)?;
        }
        Ok(())
    }

    pub fn get(&self, e: &LabelledEdge) -> Option<&Vec<i64>> {
        self.entries.get(e)
    }

    pub fn value(&self, e: &LabelledEdge) -> Vec<i64> {
        self.entries.get(e).cloned().unwrap_or_else(|| vec![0; self.dim])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LabelledEdge, &Vec<i64>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every support edge lies in `Φ_r`.
    pub fn supported_in(&self, phi: &LabelledComplex, r: usize) -> bool {
        self.entries.keys().all(|e| e.len() == r && phi.contains(e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("edge vector serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `G*`: every `ψ ∈ Φ_r` whose image is an edge `e` of `G` carries the multiplicity vector `G_e`.
pub fn encode_coloured(g: &ColouredMultigraph, phi: &LabelledComplex) -> Result<EdgeVector> {
    let r = g.uniformity();
    let mut out = EdgeVector::new(g.colour_count());
    let mut hit = std::collections::BTreeSet::new();
    for psi in phi.level(r) {
        let img = psi.image();
        if let Some(m) = g.multiplicity(&img) {
            out.add(psi, &m.iter().map(|&x| x as i64).collect::<Vec<_>>())?;
            hit.insert(img);
        }
    }
    if let Some((e, _)) = g.entries().find(|(e, _)| !hit.contains(*e)) {
        return Err(Error::InvalidEdge {
            edge: e.clone(),
            reason: "edge is not the image of any labelled edge of the complex".into(),
        });
    }
    Ok(out)
}

/// `G*` for an (optionally coloured) digraph: an arc `e` contributes `e_d` at `ψ: B -> V`
/// sending the `j`-th smallest label of `B` to `e(j)`, for every `B` with `ψ ∈ Φ`.
pub fn encode_arcs(g: &Digraph, phi: &LabelledComplex, dim: usize) -> Result<EdgeVector> {
    let r = g.uniformity();
    if g.colour_count() > dim {
        return Err(Error::DimensionMismatch { expected: dim, got: g.colour_count() });
    }
    let mut out = EdgeVector::new(dim);
    let masks = masks_of_size(phi.label_count(), r);
    for (arc, d) in g.arcs_with_colours() {
        let mut placed = false;
        let mut unit = vec![0i64; dim];
        unit[d] = 1;
        for &b in &masks {
            let psi = LabelledEdge::from_sorted(bits(b), arc.clone());
            if phi.contains(&psi) {
                out.add(psi, &unit)?;
                placed = true;
            }
        }
        if !placed {
            return Err(Error::InvalidEdge {
                edge: arc.clone(),
                reason: "arc is not represented in the complex".into(),
            });
        }
    }
    Ok(out)
}
