use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::util::injections;
use crate::error::{Error, Result};

/// An `r`-digraph: a set of injections `[r] -> V` (arcs), optionally coloured.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DigraphDoc", into = "DigraphDoc")]
pub struct Digraph {
    n: usize,
    r: usize,
    arcs: Vec<Vec<u32>>,
    colours: Option<Vec<usize>>,
    colour_count: usize,
}

#[derive(Serialize, Deserialize)]
struct DigraphDoc {
    #[serde(rename = "type")]
    kind: String,
    n: usize,
    r: usize,
    arcs: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    colours: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    colour_count: Option<usize>,
}

impl TryFrom<DigraphDoc> for Digraph {
    type Error = Error;
    fn try_from(doc: DigraphDoc) -> Result<Self> {
        if doc.kind != "digraph" {
            return Err(Error::Invalid(format!("expected type \"digraph\", got {:?}", doc.kind)));
        }
        match doc.colours {
            None => Digraph::new(doc.n, doc.r, doc.arcs),
            Some(c) => {
                let d = doc.colour_count.unwrap_or_else(|| c.iter().max().map_or(1, |m| m + 1));
                Digraph::coloured(doc.n, doc.r, d, doc.arcs.into_iter().zip(c))
            }
        }
    }
}

impl From<Digraph> for DigraphDoc {
    fn from(g: Digraph) -> Self {
        let colour_count = g.colours.as_ref().map(|_| g.colour_count);
        DigraphDoc { kind: "digraph".into(), n: g.n, r: g.r, arcs: g.arcs, colours: g.colours, colour_count }
    }
}

fn check_arc(n: usize, r: usize, a: &[u32]) -> Result<()> {
    if a.len() != r {
        return Err(Error::InvalidEdge { edge: a.to_vec(), reason: format!("expected {r} vertices") });
    }
    if let Some(&v) = a.iter().find(|&&v| v as usize >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let mut s = a.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidEdge { edge: a.to_vec(), reason: "arc is not injective".into() });
    }
    Ok(())
}

impl Digraph {
    pub fn new(n: usize, r: usize, arcs: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::Invalid("uniformity must be positive".into()));
        }
        let mut out: Vec<Vec<u32>> = Vec::new();
        for a in arcs {
            check_arc(n, r, &a)?;
            out.push(a);
        }
        out.sort();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].clone()));
        }
        Ok(Digraph { n, r, arcs: out, colours: None, colour_count: 1 })
    }

    /// A coloured digraph; each arc carries one colour in `0..colour_count`.
    pub fn coloured(
        n: usize,
        r: usize,
        colour_count: usize,
        arcs: impl IntoIterator<Item = (Vec<u32>, usize)>,
    ) -> Result<Self> {
        if r == 0 || colour_count == 0 {
            return Err(Error::Invalid("uniformity and colour count must be positive".into()));
        }
        let mut out: Vec<(Vec<u32>, usize)> = Vec::new();
        for (a, c) in arcs {
            check_arc(n, r, &a)?;
            if c >= colour_count {
                return Err(Error::Invalid(format!("colour {c} outside 0..{colour_count}")));
            }
            out.push((a, c));
        }
        out.sort();
        if let Some(w) = out.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateEdge(w[0].0.clone()));
        }
        let (arcs, colours) = out.into_iter().unzip();
        Ok(Digraph { n, r, arcs, colours: Some(colours), colour_count })
    }

    /// The complete `r`-digraph `KD^r_n`.
    pub fn complete(n: usize, r: usize) -> Self {
        Digraph { n, r, arcs: injections(r, n), colours: None, colour_count: 1 }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn arcs(&self) -> &[Vec<u32>] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn colour_count(&self) -> usize {
        self.colour_count
    }

    pub fn is_coloured(&self) -> bool {
        self.colours.is_some()
    }

    /// Colour of arc number `k`; uncoloured digraphs report colour 0.
    pub fn colour_of_index(&self, k: usize) -> usize {
        self.colours.as_ref().map_or(0, |c| c[k])
    }

    pub fn colour_of(&self, arc: &[u32]) -> Option<usize> {
        self.arcs.binary_search_by(|a| a.as_slice().cmp(arc)).ok().map(|k| self.colour_of_index(k))
    }

    pub fn arcs_with_colours(&self) -> impl Iterator<Item = (&Vec<u32>, usize)> {
        self.arcs.iter().enumerate().map(move |(k, a)| (a, self.colour_of_index(k)))
    }

    /// True when all arc images (as sets) are distinct.
    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::new();
        self.arcs.iter().all(|a| {
            let mut s = a.clone();
            s.sort_unstable();
            seen.insert(s)
        })
    }

    fn check_injection(&self, psi: &[u32]) -> Result<()> {
        if psi.len() > self.r {
            return Err(Error::Invalid(format!("injection of length {} exceeds r={}", psi.len(), self.r)));
        }
        if let Some(&v) = psi.iter().find(|&&v| v as usize >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        let mut s = psi.to_vec();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("{psi:?} is not injective")));
        }
        Ok(())
    }

    /// Degree vector of `psi: [i] -> V` over `I^i_r` (lexicographic coordinate order):
    /// coordinate `pi` counts arcs `e` with `e(pi(j)) = psi(j)` for all `j`.
    pub fn digraph_degree_vector(&self, psi: &[u32]) -> Result<Vec<u64>> {
        self.check_injection(psi)?;
        let pis = injections(psi.len(), self.r);
        Ok(pis
            .iter()
            .map(|pi| self.arcs.iter().filter(|e| pi.iter().zip(psi).all(|(&p, &v)| e[p as usize] == v)).count() as u64)
            .collect())
    }

    /// Coloured variant over `[D] x I^i_r`, colour-major.
    pub fn master_degree_vector(&self, psi: &[u32]) -> Result<Vec<u64>> {
        self.check_injection(psi)?;
        let pis = injections(psi.len(), self.r);
        let mut out = vec![0u64; self.colour_count * pis.len()];
        for (e, d) in self.arcs_with_colours() {
            for (k, pi) in pis.iter().enumerate() {
                if pi.iter().zip(psi).all(|(&p, &v)| e[p as usize] == v) {
                    out[d * pis.len() + k] += 1;
                }
            }
        }
        Ok(out)
    }

    /// Coloured degree vectors of every `psi: [i] -> V` met by some arc, colour-major over
    /// `[D] x I^i_r`.
    pub fn master_degree_map(&self, i: usize) -> HashMap<Vec<u32>, Vec<u64>> {
        let pis = injections(i, self.r);
        let width = pis.len();
        let mut map: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
        for (e, d) in self.arcs_with_colours() {
            for (k, pi) in pis.iter().enumerate() {
                let psi: Vec<u32> = pi.iter().map(|&p| e[p as usize]).collect();
                map.entry(psi).or_insert_with(|| vec![0; self.colour_count * width])[d * width + k] += 1;
            }
        }
        map
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("digraph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
