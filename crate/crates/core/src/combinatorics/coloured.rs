use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::hypergraph::{canonical_set, Hypergraph};
use super::util::k_subsets;
use crate::error::{Error, Result};

/// An `r`-uniform multigraph whose edges carry a vector of per-colour multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ColouredDoc", into = "ColouredDoc")]
pub struct ColouredMultigraph {
    n: usize,
    r: usize,
    colours: usize,
    mult: BTreeMap<Vec<u32>, Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct ColouredDoc {
    #[serde(rename = "type")]
    kind: String,
    n: usize,
    r: usize,
    colours: usize,
    mult: MultMap,
}

/// Edge-keyed map serialized with keys like `"0,1,2"` in numeric edge order.
struct MultMap(Vec<(Vec<u32>, Vec<u64>)>);

impl Serialize for MultMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (e, v) in &self.0 {
            let key: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            m.serialize_entry(&key.join(","), v)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for MultMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = MultMap;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from comma-separated edges to multiplicity vectors")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> std::result::Result<MultMap, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = a.next_entry::<String, Vec<u64>>()? {
                    let edge = if k.is_empty() {
                        Vec::new()
                    } else {
                        k.split(',')
                            .map(|t| t.trim().parse::<u32>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|e| serde::de::Error::custom(format!("bad edge key {k:?}: {e}")))?
                    };
                    out.push((edge, v));
                }
                Ok(MultMap(out))
            }
        }
        d.deserialize_map(V)
    }
}

impl TryFrom<ColouredDoc> for ColouredMultigraph {
    type Error = Error;
    fn try_from(doc: ColouredDoc) -> Result<Self> {
        if doc.kind != "coloured" {
            return Err(Error::Invalid(format!("expected type \"coloured\", got {:?}", doc.kind)));
        }
        ColouredMultigraph::new(doc.n, doc.r, doc.colours, doc.mult.0)
    }
}

impl From<ColouredMultigraph> for ColouredDoc {
    fn from(g: ColouredMultigraph) -> Self {
        ColouredDoc {
            kind: "coloured".into(),
            n: g.n,
            r: g.r,
            colours: g.colours,
            mult: MultMap(g.mult.into_iter().collect()),
        }
    }
}

impl ColouredMultigraph {
    /// Builds from (edge, multiplicity vector) pairs; zero vectors are dropped and
    /// repeated edges are rejected.
    pub fn new(
        n: usize,
        r: usize,
        colours: usize,
        entries: impl IntoIterator<Item = (Vec<u32>, Vec<u64>)>,
    ) -> Result<Self> {
        if r == 0 || colours == 0 {
            return Err(Error::Invalid("uniformity and colour count must be positive".into()));
        }
        let mut mult = BTreeMap::new();
        for (e, v) in entries {
            let e = canonical_set(n, r, e)?;
            if v.len() != colours {
                return Err(Error::DimensionMismatch { expected: colours, got: v.len() });
            }
            if mult.contains_key(&e) {
                return Err(Error::DuplicateEdge(e));
            }
            if v.iter().any(|&x| x > 0) {
                mult.insert(e, v);
            }
        }
        Ok(ColouredMultigraph { n, r, colours, mult })
    }

    /// A simple coloured graph from (edge, colour) pairs.
    pub fn from_coloured_edges(
        n: usize,
        r: usize,
        colours: usize,
        edges: impl IntoIterator<Item = (Vec<u32>, usize)>,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for (e, c) in edges {
            if c >= colours {
                return Err(Error::Invalid(format!("colour {c} outside 0..{colours}")));
            }
            let mut v = vec![0; colours];
            v[c] = 1;
            entries.push((e, v));
        }
        ColouredMultigraph::new(n, r, colours, entries)
    }

    /// Every edge of `g` in colour `colour`.
    pub fn monochromatic(g: &Hypergraph, colours: usize, colour: usize) -> Result<Self> {
        Self::from_coloured_edges(
            g.vertex_count(),
            g.uniformity(),
            colours,
            g.edges().iter().map(|e| (e.clone(), colour)),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn colour_count(&self) -> usize {
        self.colours
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u32>, &Vec<u64>)> {
        self.mult.iter()
    }

    pub fn multiplicity(&self, e: &[u32]) -> Option<&Vec<u64>> {
        let mut e = e.to_vec();
        e.sort_unstable();
        self.mult.get(&e)
    }

    /// Number of stored edges (support size).
    pub fn support_len(&self) -> usize {
        self.mult.len()
    }

    /// Total edge count with multiplicity.
    pub fn total(&self) -> u64 {
        self.mult.values().flatten().sum()
    }

    /// Edge count per colour, with multiplicity.
    pub fn colour_totals(&self) -> Vec<u64> {
        let mut t = vec![0; self.colours];
        for v in self.mult.values() {
            for (d, &x) in v.iter().enumerate() {
                t[d] += x;
            }
        }
        t
    }

    /// The underlying simple `r`-graph (support).
    pub fn support(&self) -> Hypergraph {
        Hypergraph::new(self.n, self.r, self.mult.keys().cloned()).expect("support is canonical")
    }

    /// Coordinate `d` counts (with multiplicity) the colour-`d` edges containing `e`.
    pub fn coloured_degree_vector(&self, e: &[u32]) -> Result<Vec<u64>> {
        let mut s = e.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&v) = s.iter().find(|&&v| v as usize >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        let mut out = vec![0; self.colours];
        for (f, m) in &self.mult {
            if s.iter().all(|v| f.binary_search(v).is_ok()) {
                for (d, &x) in m.iter().enumerate() {
                    out[d] += x;
                }
            }
        }
        Ok(out)
    }

    /// Degree vectors of every `i`-set contained in some edge.
    pub fn degree_vector_map(&self, i: usize) -> HashMap<Vec<u32>, Vec<u64>> {
        let mut map: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
        for (f, m) in &self.mult {
            for s in k_subsets(f, i) {
                let slot = map.entry(s).or_insert_with(|| vec![0; self.colours]);
                for (d, &x) in m.iter().enumerate() {
                    slot[d] += x;
                }
            }
        }
        map
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coloured multigraph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
