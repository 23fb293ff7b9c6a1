use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::edge::LabelledEdge;
use super::group::{bits, symmetric_elements, PermGroup};
use crate::combinatorics::util::injections;
use crate::combinatorics::Partition;
use crate::error::{Error, Result};

/// Largest label-set size for which exact adaptedness is decided by enumerating `S_q`.
pub const MAX_EXACT_Q: usize = 10;

/// A restriction-closed set of labelled edges with labels in `[q]` and vertices in `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexDoc", into = "ComplexDoc")]
pub struct LabelledComplex {
    q: usize,
    n: usize,
    layers: BTreeMap<u32, BTreeSet<Vec<u32>>>,
    parts: Option<ComplexParts>,
}

/// Pattern and host partitions of a partite complex; part `j` of the labels maps into part `j` of the vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexParts {
    pub pattern: Partition,
    pub host: Partition,
}

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    q: usize,
    n: usize,
    maximal: Vec<Vec<(u32, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parts: Option<ComplexParts>,
}

impl TryFrom<ComplexDoc> for LabelledComplex {
    type Error = Error;
    fn try_from(d: ComplexDoc) -> Result<Self> {
        let edges = d.maximal.into_iter().map(LabelledEdge::new).collect::<Result<Vec<_>>>()?;
        let mut c = LabelledComplex::from_maximal(d.q, d.n, edges)?;
        c.parts = d.parts;
        Ok(c)
    }
}

impl From<LabelledComplex> for ComplexDoc {
    fn from(c: LabelledComplex) -> Self {
        let maximal = c.maximal_edges().into_iter().map(|e| e.pairs().collect()).collect();
        ComplexDoc { q: c.q, n: c.n, maximal, parts: c.parts }
    }
}

impl LabelledComplex {
    pub fn empty(q: usize, n: usize) -> Self {
        LabelledComplex { q, n, layers: BTreeMap::new(), parts: None }
    }

    /// Every injection `B -> 0..n` for every `B ⊆ [q]`.
    pub fn complete(q: usize, n: usize) -> Result<Self> {
        check_q(q)?;
        let mut c = Self::empty(q, n);
        if n == 0 {
            return Ok(c);
        }
        for mask in 0u32..(1 << q) {
            let k = mask.count_ones() as usize;
            c.layers.insert(mask, injections(k, n).into_iter().collect());
        }
        Ok(c)
    }

    /// Every injection `φ: B -> 0..n` with `φ(B ∩ P_j) ⊆ P'_j` for all parts.
    pub fn complete_partite(pattern: &Partition, host: &Partition) -> Result<Self> {
        let q = pattern.vertex_count();
        check_q(q)?;
        if pattern.part_count() != host.part_count() {
            return Err(Error::InvalidPartition(format!(
                "pattern has {} parts but host has {}",
                pattern.part_count(),
                host.part_count()
            )));
        }
        for j in 0..pattern.part_count() {
            if !pattern.part(j).is_empty() && host.part(j).is_empty() {
                return Err(Error::InvalidPartition(format!("host part {j} is empty")));
            }
        }
        let n = host.vertex_count();
        let mut c = Self::empty(q, n);
        if n == 0 {
            return Ok(c);
        }
        for mask in 0u32..(1 << q) {
            let labels = bits(mask);
            let mut set = BTreeSet::new();
            let mut cur = Vec::with_capacity(labels.len());
            fill_partite(&labels, pattern, host, &mut cur, &mut set);
            c.layers.insert(mask, set);
        }
        c.parts = Some(ComplexParts { pattern: pattern.clone(), host: host.clone() });
        Ok(c)
    }

    /// The restriction closure of the given labelled edges.
    pub fn from_maximal(q: usize, n: usize, edges: impl IntoIterator<Item = LabelledEdge>) -> Result<Self> {
        check_q(q)?;
        let mut c = Self::empty(q, n);
        for e in edges {
            if e.labels().iter().any(|&l| l as usize >= q) {
                return Err(Error::Invalid(format!("labelled edge {e} uses a label outside [q]")));
            }
            if let Some(&v) = e.values().iter().find(|&&v| v as usize >= n) {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            let m = e.domain_mask();
            let mut sub = m;
            loop {
                c.insert_raw(e.restrict(sub));
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & m;
            }
        }
        Ok(c)
    }

    fn insert_raw(&mut self, e: LabelledEdge) {
        let m = e.domain_mask();
        self.layers.entry(m).or_default().insert(e.values().to_vec());
    }

    pub fn with_parts(mut self, parts: ComplexParts) -> Self {
        self.parts = Some(parts);
        self
    }

    pub fn parts(&self) -> Option<&ComplexParts> {
        self.parts.as_ref()
    }

    pub fn label_count(&self) -> usize {
        self.q
    }

    pub fn vertex_bound(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.layers.values().all(|s| s.is_empty())
    }

    /// Total number of labelled edges over all domains.
    pub fn len(&self) -> usize {
        self.layers.values().map(|s| s.len()).sum()
    }

    /// `V(Φ)`: vertices in the image of some single-label edge.
    pub fn vertices(&self) -> Vec<u32> {
        let mut out = BTreeSet::new();
        for (m, s) in &self.layers {
            if m.count_ones() == 1 {
                out.extend(s.iter().map(|v| v[0]));
            }
        }
        out.into_iter().collect()
    }

    pub fn contains(&self, e: &LabelledEdge) -> bool {
        self.layers.get(&e.domain_mask()).is_some_and(|s| s.contains(e.values()))
    }

    pub fn contains_parts(&self, mask: u32, values: &[u32]) -> bool {
        self.layers.get(&mask).is_some_and(|s| s.contains(values))
    }

    /// `Φ_B` for the label set `mask`.
    pub fn layer(&self, mask: u32) -> Vec<LabelledEdge> {
        let labels = bits(mask);
        self.layers
            .get(&mask)
            .map(|s| s.iter().map(|v| LabelledEdge::from_sorted(labels.clone(), v.clone())).collect())
            .unwrap_or_default()
    }

    pub fn layer_len(&self, mask: u32) -> usize {
        self.layers.get(&mask).map_or(0, |s| s.len())
    }

    /// `Φ_k`: all edges with `k` labels, sorted.
    pub fn level(&self, k: usize) -> Vec<LabelledEdge> {
        let mut out = Vec::new();
        for &m in self.layers.keys() {
            if m.count_ones() as usize == k {
                out.extend(self.layer(m));
            }
        }
        out.sort();
        out
    }

    /// Every edge, sorted.
    pub fn all_edges(&self) -> Vec<LabelledEdge> {
        let mut out: Vec<LabelledEdge> = self.layers.keys().flat_map(|&m| self.layer(m)).collect();
        out.sort();
        out
    }

    /// Edges that are not a proper restriction of another edge.
    pub fn maximal_edges(&self) -> Vec<LabelledEdge> {
        let mut covered: BTreeSet<LabelledEdge> = BTreeSet::new();
        for e in self.all_edges() {
            for &l in e.labels() {
                covered.insert(e.restrict(e.domain_mask() & !(1 << l)));
            }
        }
        self.all_edges().into_iter().filter(|e| !covered.contains(e)).collect()
    }

    pub fn is_restriction_closed(&self) -> bool {
        self.all_edges()
            .iter()
            .all(|e| e.labels().iter().all(|&l| self.contains(&e.restrict(e.domain_mask() & !(1 << l)))))
    }

    /// `φσ ∈ Φ` for every `φ ∈ Φ` and every generator `σ` (hence every element).
    pub fn is_adapted(&self, group: &PermGroup) -> bool {
        let gens: Vec<&Vec<u32>> = if group.generators().is_empty() {
            group.elements().iter().collect()
        } else {
            group.generators().iter().collect()
        };
        self.all_edges().iter().all(|e| gens.iter().all(|s| self.contains(&e.compose_perm(s))))
    }

    /// The unique group `Σ` for which the complex is exactly `Σ`-adapted, if any.
    pub fn exactly_adapted(&self) -> Result<Option<PermGroup>> {
        if self.q > MAX_EXACT_Q {
            return Err(Error::Invalid(format!("exact adaptedness needs q <= {MAX_EXACT_Q}")));
        }
        let edges = self.all_edges();
        let adapted: Vec<Vec<u32>> = symmetric_elements(self.q)
            .into_iter()
            .filter(|s| edges.iter().all(|e| self.contains(&e.compose_perm(s))))
            .collect();
        let group = PermGroup::from_elements(self.q, adapted)?;
        let mut allowed: BTreeMap<(u32, u32), BTreeSet<Vec<(u32, u32)>>> = BTreeMap::new();
        for e in &edges {
            let b = e.domain_mask();
            let k = e.len();
            for b2 in masks_of_size(self.q, k) {
                let entry = allowed.entry((b2, b)).or_insert_with(|| group.restrictions(b2, b).into_iter().collect());
                let src = bits(b2);
                for tau in injections(k, k) {
                    // τ: B' -> B, sending the j-th label of B' to the τ(j)-th label of B
                    let pairs: Vec<(u32, u32)> =
                        src.iter().zip(&tau).map(|(&x, &t)| (x, e.labels()[t as usize])).collect();
                    let composed = LabelledEdge::from_sorted(
                        src.clone(),
                        pairs.iter().map(|&(_, y)| e.get(y).expect("in domain")).collect(),
                    );
                    if self.contains(&composed) != entry.contains(&pairs) {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(Some(group))
    }

    /// Orbits of `Φ_k` under `Σ`, each with its canonical (lexicographically least) representative.
    pub fn orbits(&self, k: usize, group: &PermGroup) -> Vec<Orbit> {
        let mut map: BTreeMap<LabelledEdge, BTreeSet<LabelledEdge>> = BTreeMap::new();
        for e in self.level(k) {
            map.entry(e.canonical(group)).or_default().insert(e);
        }
        map.into_iter()
            .map(|(representative, members)| Orbit { representative, members: members.into_iter().collect() })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("complex serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// One orbit `ψΣ` of labelled edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub representative: LabelledEdge,
    pub members: Vec<LabelledEdge>,
}

fn check_q(q: usize) -> Result<()> {
    if q >= 32 {
        return Err(Error::Invalid("label sets are limited to q < 32".into()));
    }
    Ok(())
}

pub(crate) fn masks_of_size(q: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << q)).filter(|m| m.count_ones() as usize == k).collect()
}

fn fill_partite(
    labels: &[u32],
    pattern: &Partition,
    host: &Partition,
    cur: &mut Vec<u32>,
    out: &mut BTreeSet<Vec<u32>>,
) {
    if cur.len() == labels.len() {
        out.insert(cur.clone());
        return;
    }
    let j = pattern.part_of(labels[cur.len()]);
    for &v in host.part(j) {
        if !cur.contains(&v) {
            cur.push(v);
            fill_partite(labels, pattern, host, cur, out);
            cur.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_example(a: usize, b: usize) -> LabelledComplex {
        let pattern = Partition::new(vec![vec![0, 1], vec![2]]).unwrap();
        let host = Partition::from_sizes(&[a, b]);
        LabelledComplex::complete_partite(&pattern, &host).unwrap()
    }

    #[test]
    fn complete_counts() {
        let c = LabelledComplex::complete(3, 5).unwrap();
        assert_eq!(c.level(3).len(), 60);
        assert!(c.is_restriction_closed());
        assert!(LabelledComplex::complete(3, 0).unwrap().is_empty());
        let p = running_example(4, 3);
        assert_eq!(p.layer_len(0b111), 4 * 3 * 3);
        assert!(p.is_restriction_closed());
    }

    #[test]
    fn exact_adaptedness() {
        let c = LabelledComplex::complete(3, 4).unwrap();
        assert_eq!(c.exactly_adapted().unwrap().unwrap().order(), 6);
        let p = running_example(3, 2);
        let sigma = p.exactly_adapted().unwrap().unwrap();
        assert_eq!(sigma.elements(), &[vec![0, 1, 2], vec![1, 0, 2]]);
        assert!(p.is_adapted(&sigma));
        assert!(!p.is_adapted(&PermGroup::symmetric(3).unwrap()));
    }

    #[test]
    fn deleting_one_edge_breaks_adaptedness() {
        let c = LabelledComplex::complete(2, 3).unwrap();
        let keep: Vec<LabelledEdge> = c.level(2).into_iter().filter(|e| e.values() != [0, 1]).collect();
        let d = LabelledComplex::from_maximal(2, 3, keep).unwrap();
        assert!(!d.is_adapted(&PermGroup::symmetric(2).unwrap()));
        assert!(d.is_adapted(&PermGroup::trivial(2)));
    }

    #[test]
    fn orbits_partition_level() {
        let p = running_example(3, 2);
        let sigma = PermGroup::part_stabilizer(&Partition::new(vec![vec![0, 1], vec![2]]).unwrap()).unwrap();
        for k in 0..=3 {
            let orbits = p.orbits(k, &sigma);
            let total: usize = orbits.iter().map(|o| o.members.len()).sum();
            assert_eq!(total, p.level(k).len());
            for o in &orbits {
                assert_eq!(o.representative.canonical(&sigma), o.representative);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = running_example(2, 1);
        let s = p.to_json();
        let back = LabelledComplex::from_json(&s).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json(), s);
    }
}
