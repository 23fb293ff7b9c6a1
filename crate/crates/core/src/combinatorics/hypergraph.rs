use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::partition::Partition;
use super::util::k_subsets;
use crate::error::{Error, Result};

/// An `r`-uniform hypergraph on `0..n` with canonically sorted edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphDoc", into = "HypergraphDoc")]
pub struct Hypergraph {
    n: usize,
    r: usize,
    edges: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphDoc {
    #[serde(rename = "type")]
    kind: String,
    n: usize,
    r: usize,
    edges: Vec<Vec<u32>>,
}

impl TryFrom<HypergraphDoc> for Hypergraph {
    type Error = Error;
    fn try_from(doc: HypergraphDoc) -> Result<Self> {
        if doc.kind != "hypergraph" {
            return Err(Error::Invalid(format!("expected type \"hypergraph\", got {:?}", doc.kind)));
        }
        Hypergraph::new(doc.n, doc.r, doc.edges)
    }
}

impl From<Hypergraph> for HypergraphDoc {
    fn from(h: Hypergraph) -> Self {
        HypergraphDoc { kind: "hypergraph".into(), n: h.n, r: h.r, edges: h.edges }
    }
}

pub(crate) fn canonical_set(n: usize, r: usize, mut e: Vec<u32>) -> Result<Vec<u32>> {
    if e.len() != r {
        return Err(Error::InvalidEdge { edge: e, reason: format!("expected {r} vertices") });
    }
    e.sort_unstable();
    if e.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidEdge { edge: e, reason: "repeated vertex".into() });
    }
    if let Some(&v) = e.iter().find(|&&v| v as usize >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    Ok(e)
}

impl Hypergraph {
    pub fn new(n: usize, r: usize, edges: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::Invalid("uniformity must be positive".into()));
        }
        let mut out = Vec::new();
        for e in edges {
            out.push(canonical_set(n, r, e)?);
        }
        out.sort();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].clone()));
        }
        Ok(Hypergraph { n, r, edges: out })
    }

    pub fn empty(n: usize, r: usize) -> Self {
        Hypergraph { n, r, edges: Vec::new() }
    }

    /// The complete `r`-graph `K^r_n`.
    pub fn complete(n: usize, r: usize) -> Self {
        let verts: Vec<u32> = (0..n as u32).collect();
        Hypergraph { n, r, edges: k_subsets(&verts, r) }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: &[u32]) -> bool {
        let mut e = e.to_vec();
        e.sort_unstable();
        self.edges.binary_search(&e).is_ok()
    }

    fn check_set(&self, e: &[u32]) -> Result<Vec<u32>> {
        let mut s = e.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&v) = s.iter().find(|&&v| v as usize >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(s)
    }

    /// The sets `f` disjoint from `e` with `e ∪ f` an edge.
    pub fn neighbourhood(&self, e: &[u32]) -> Result<Vec<Vec<u32>>> {
        let e = self.check_set(e)?;
        Ok(self
            .edges
            .iter()
            .filter(|f| e.iter().all(|v| f.binary_search(v).is_ok()))
            .map(|f| f.iter().copied().filter(|v| e.binary_search(v).is_err()).collect())
            .collect())
    }

    pub fn degree(&self, e: &[u32]) -> Result<usize> {
        let e = self.check_set(e)?;
        Ok(self.edges.iter().filter(|f| e.iter().all(|v| f.binary_search(v).is_ok())).count())
    }

    /// Degrees of every `i`-set contained in some edge; sets of degree zero are absent.
    pub fn degree_map(&self, i: usize) -> HashMap<Vec<u32>, u64> {
        let mut map = HashMap::new();
        for f in &self.edges {
            for s in k_subsets(f, i) {
                *map.entry(s).or_insert(0) += 1;
            }
        }
        map
    }

    /// The blowup replacing vertex `x` by a class of `sizes[x]` vertices.
    /// Classes are consecutive id ranges; the induced partition is returned alongside.
    pub fn blowup(&self, sizes: &[usize]) -> Result<(Hypergraph, Partition)> {
        if sizes.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: sizes.len() });
        }
        if sizes.contains(&0) {
            return Err(Error::Invalid("blowup class sizes must be positive".into()));
        }
        let part = Partition::from_sizes(sizes);
        let mut edges = Vec::new();
        for f in &self.edges {
            let mut cur = Vec::with_capacity(self.r);
            fn rec(f: &[u32], part: &Partition, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
                if cur.len() == f.len() {
                    out.push(cur.clone());
                    return;
                }
                for &v in part.part(f[cur.len()] as usize) {
                    cur.push(v);
                    rec(f, part, cur, out);
                    cur.pop();
                }
            }
            rec(f, &part, &mut cur, &mut edges);
        }
        let total: usize = sizes.iter().sum();
        Ok((Hypergraph::new(total, self.r, edges)?, part))
    }

    /// Blowup with every class of size `n`.
    pub fn uniform_blowup(&self, n: usize) -> Result<(Hypergraph, Partition)> {
        self.blowup(&vec![n; self.n])
    }

    /// The partition-indices of the edges, sorted in decreasing lexicographic order.
    pub fn index_set(&self, p: &Partition) -> Result<Vec<Vec<usize>>> {
        let mut idx = Vec::new();
        for e in &self.edges {
            idx.push(p.index_vector(e)?);
        }
        idx.sort_unstable_by(|a, b| b.cmp(a));
        idx.dedup();
        Ok(idx)
    }

    /// The degree vector over the index set `index`: coordinate `i` counts edges
    /// of index `i` containing `e`.
    pub fn partite_degree_vector(&self, p: &Partition, index: &[Vec<usize>], e: &[u32]) -> Result<Vec<u64>> {
        let e = self.check_set(e)?;
        let mut out = vec![0u64; index.len()];
        for f in &self.edges {
            if e.iter().all(|v| f.binary_search(v).is_ok()) {
                let iv = p.index_vector(f)?;
                if let Some(k) = index.iter().position(|x| *x == iv) {
                    out[k] += 1;
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
