//! Divisibility and balance checkers.
//!
//! Every check reduces to degree vectors of small vertex sets (or injections) and
//! integer-span membership. Sets not met by any edge have zero degree vectors and are
//! skipped, since zero lies in every lattice.

mod coloured;
mod digraph;
mod master;

pub use coloured::{coloured_balanced, coloured_divisible, BalanceReport};
pub use digraph::{digraph_divisible, shift_regular};
pub use master::{canonical_family_check, check_orbit_pattern, master_divisible, CanonicalFamily, MultiDigraph};

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::combinatorics::util::{binomial, k_subsets};
use crate::combinatorics::{Hypergraph, Partition};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;

/// The first failure observed at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelFailure {
    pub level: usize,
    pub witness: Vec<u32>,
    pub lattice: String,
    #[serde(serialize_with = "as_strings")]
    pub vector: Vec<BigInt>,
}

fn as_strings<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Verdict plus at most one failure per level, levels ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DivisibilityReport {
    pub verdict: bool,
    pub levels: Vec<usize>,
    pub failures: Vec<LevelFailure>,
}

impl DivisibilityReport {
    fn start(levels: impl IntoIterator<Item = usize>) -> Self {
        DivisibilityReport { verdict: true, levels: levels.into_iter().collect(), failures: Vec::new() }
    }

    fn record(&mut self, f: LevelFailure) {
        if !self.failures.iter().any(|g| g.level == f.level) {
            self.failures.push(f);
            self.failures.sort_by_key(|g| g.level);
        }
        self.verdict = false;
    }

    pub fn failure_at(&self, level: usize) -> Option<&LevelFailure> {
        self.failures.iter().find(|f| f.level == level)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// A lattice assembled from generator vectors, with a printable HNF description.
pub(crate) struct Span {
    basis: LatticeBasis,
}

impl Span {
    pub(crate) fn new(dim: usize) -> Self {
        Span { basis: LatticeBasis::new(dim, false) }
    }

    pub(crate) fn add_u64(&mut self, v: &[u64]) -> Result<()> {
        if v.iter().any(|&x| x != 0) {
            self.basis.insert(v.iter().map(|&x| BigInt::from(x)).collect())?;
        }
        Ok(())
    }

    pub(crate) fn contains_u64(&self, v: &[u64]) -> Result<bool> {
        if v.iter().all(|&x| x == 0) {
            return Ok(true);
        }
        self.basis.contains(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    pub(crate) fn describe(&self) -> String {
        let rows: Vec<String> = self
            .basis
            .hnf_rows()
            .iter()
            .map(|r| format!("({})", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        if rows.is_empty() {
            "<0>".into()
        } else {
            format!("<{}>", rows.join(", "))
        }
    }
}

pub(crate) fn failure_u64(level: usize, witness: Vec<u32>, span: &Span, v: &[u64]) -> LevelFailure {
    LevelFailure { level, witness, lattice: span.describe(), vector: v.iter().map(|&x| BigInt::from(x)).collect() }
}

/// Sorted keys, so the first failure per level is the lexicographically least witness.
pub(crate) fn sorted<V>(m: HashMap<Vec<u32>, V>) -> BTreeMap<Vec<u32>, V> {
    m.into_iter().collect()
}

/// Checks `binom(q-i, r-i) | λ binom(n-i, r-i)` for `0 ≤ i < r`.
pub fn steiner_divisible(n: u64, q: u64, r: u64, lambda: u64) -> Result<DivisibilityReport> {
    if r == 0 || q < r {
        return Err(Error::Invalid(format!("need q ≥ r ≥ 1, got q={q}, r={r}")));
    }
    let mut rep = DivisibilityReport::start(0..r as usize);
    for i in 0..r {
        let modulus = binomial(q - i, r - i);
        let value = binomial(n.saturating_sub(i), r - i) * BigUint::from(lambda);
        let value = if n < i { BigUint::zero() } else { value };
        if !(&value % &modulus).is_zero() {
            rep.record(LevelFailure {
                level: i as usize,
                witness: (0..i as u32).collect(),
                lattice: format!("{modulus}Z"),
                vector: vec![BigInt::from(value)],
            });
        }
    }
    Ok(rep)
}

/// Every degree `|G(e)|` with `|e| = i` is divisible by the gcd of the degrees `|H(f)|`, `|f| = i`.
pub fn h_divisible(g: &Hypergraph, h: &Hypergraph) -> Result<DivisibilityReport> {
    let r = g.uniformity();
    if h.uniformity() != r {
        return Err(Error::DimensionMismatch { expected: r, got: h.uniformity() });
    }
    if h.is_empty() {
        return Err(Error::Invalid("pattern has no edges, gcd undefined".into()));
    }
    let mut rep = DivisibilityReport::start(0..=r);
    for i in 0..=r {
        let gcd = h.degree_map(i).values().fold(0u64, |a, &b| a.gcd(&b));
        for (e, d) in sorted(g.degree_map(i)) {
            if d % gcd != 0 {
                rep.record(LevelFailure {
                    level: i,
                    witness: e,
                    lattice: format!("{gcd}Z"),
                    vector: vec![BigInt::from(d)],
                });
                break;
            }
        }
    }
    Ok(rep)
}

fn check_blowup(g: &Hypergraph, gp: &Partition, h: &Hypergraph, hp: &Partition) -> Result<Vec<Vec<usize>>> {
    if g.uniformity() != h.uniformity() {
        return Err(Error::DimensionMismatch { expected: h.uniformity(), got: g.uniformity() });
    }
    if gp.part_count() != hp.part_count() {
        return Err(Error::DimensionMismatch { expected: hp.part_count(), got: gp.part_count() });
    }
    if gp.vertex_count() != g.vertex_count() || hp.vertex_count() != h.vertex_count() {
        return Err(Error::InvalidPartition("partition does not cover the vertex set".into()));
    }
    let index = h.index_set(hp)?;
    for e in g.edges() {
        let iv = gp.index_vector(e)?;
        if !index.contains(&iv) {
            return Err(Error::NotBlowup(format!("edge {e:?} has index {iv:?} outside the pattern's index set")));
        }
    }
    Ok(index)
}

/// `(H,P)`-divisibility: `G_I(e) ∈ ⟨H_I(f) : i_P(f) = i_P'(e)⟩` for every `e`.
pub fn hp_divisible(g: &Hypergraph, gp: &Partition, h: &Hypergraph, hp: &Partition) -> Result<DivisibilityReport> {
    let index = check_blowup(g, gp, h, hp)?;
    let r = g.uniformity();
    let pos: HashMap<&Vec<usize>, usize> = index.iter().enumerate().map(|(k, i)| (i, k)).collect();
    let mut rep = DivisibilityReport::start(0..=r);
    let hv: Vec<u32> = (0..h.vertex_count() as u32).collect();
    for i in 0..=r {
        let mut spans: BTreeMap<Vec<usize>, Span> = BTreeMap::new();
        for f in k_subsets(&hv, i) {
            let v = h.partite_degree_vector(hp, &index, &f)?;
            spans.entry(hp.index_vector(&f)?).or_insert_with(|| Span::new(index.len())).add_u64(&v)?;
        }
        let mut vecs: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
        for e in g.edges() {
            let k = pos[&gp.index_vector(e)?];
            for s in k_subsets(e, i) {
                vecs.entry(s).or_insert_with(|| vec![0; index.len()])[k] += 1;
            }
        }
        let empty = Span::new(index.len());
        for (e, v) in sorted(vecs) {
            let span = spans.get(&gp.index_vector(&e)?).unwrap_or(&empty);
            if !span.contains_u64(&v)? {
                rep.record(failure_u64(i, e, span, &v));
                break;
            }
        }
    }
    Ok(rep)
}

/// The generator `H_I(f)` and degree `G_I(e)` vectors grouped by index, for reporting worked values.
pub fn hp_vectors(
    g: &Hypergraph,
    gp: &Partition,
    h: &Hypergraph,
    hp: &Partition,
    level: usize,
) -> Result<(Vec<Vec<usize>>, BTreeMap<Vec<usize>, Vec<Vec<u64>>>, BTreeMap<Vec<usize>, Vec<Vec<u64>>>)> {
    let index = check_blowup(g, gp, h, hp)?;
    let mut gens: BTreeMap<Vec<usize>, Vec<Vec<u64>>> = BTreeMap::new();
    let hv: Vec<u32> = (0..h.vertex_count() as u32).collect();
    for f in k_subsets(&hv, level) {
        let v = h.partite_degree_vector(hp, &index, &f)?;
        let slot = gens.entry(hp.index_vector(&f)?).or_default();
        if !slot.contains(&v) {
            slot.push(v);
        }
    }
    let mut degs: BTreeMap<Vec<usize>, Vec<Vec<u64>>> = BTreeMap::new();
    let gv: Vec<u32> = (0..g.vertex_count() as u32).collect();
    for e in k_subsets(&gv, level) {
        let v = g.partite_degree_vector(gp, &index, &e)?;
        let slot = degs.entry(gp.index_vector(&e)?).or_default();
        if !slot.contains(&v) {
            slot.push(v);
        }
    }
    Ok((index, gens, degs))
}

/// `H`-balance of an `H`-blowup `G` with parts `gp[x]` for `x ∈ V(H)`: for every `f ⊆ V(H)`
/// and `f`-partite `e`, the counts `|G_{f'}(e)|` agree over all `f ⊆ f' ∈ H`.
pub fn h_balanced(g: &Hypergraph, gp: &Partition, h: &Hypergraph) -> Result<bool> {
    if gp.part_count() != h.vertex_count() || gp.vertex_count() != g.vertex_count() {
        return Err(Error::InvalidPartition("blowup partition must have one part per pattern vertex".into()));
    }
    if g.uniformity() != h.uniformity() {
        return Err(Error::DimensionMismatch { expected: h.uniformity(), got: g.uniformity() });
    }
    let mut counts: HashMap<Vec<u32>, HashMap<Vec<u32>, u64>> = HashMap::new();
    for e in g.edges() {
        let mut f: Vec<u32> = e.iter().map(|&v| gp.part_of(v) as u32).collect();
        f.sort_unstable();
        if f.windows(2).any(|w| w[0] == w[1]) || !h.contains(&f) {
            return Err(Error::NotBlowup(format!("edge {e:?} is not partite over a pattern edge")));
        }
        for s in (0..=e.len()).flat_map(|k| k_subsets(e, k)) {
            *counts.entry(s).or_default().entry(f.clone()).or_insert(0) += 1;
        }
    }
    counts.entry(Vec::new()).or_default();
    for (e, by_edge) in &counts {
        let mut f: Vec<u32> = e.iter().map(|&v| gp.part_of(v) as u32).collect();
        f.sort_unstable();
        let mut expected: Option<u64> = None;
        for fp in h.edges().iter().filter(|fp| f.iter().all(|x| fp.binary_search(x).is_ok())) {
            let c = by_edge.get(fp).copied().unwrap_or(0);
            if *expected.get_or_insert(c) != c {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::to_big;

    #[test]
    fn steiner_conditions() {
        assert!(steiner_divisible(7, 3, 2, 1).unwrap().verdict);
        let r = steiner_divisible(6, 3, 2, 1).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.failure_at(1).unwrap().vector, to_big(&[5]));
        assert!(steiner_divisible(8, 3, 2, 0).unwrap().verdict);
        assert!(steiner_divisible(6, 3, 2, 2).unwrap().verdict);
        assert!(steiner_divisible(1, 3, 0, 1).is_err());
        for n in 1..=60u64 {
            assert_eq!(steiner_divisible(n, 3, 2, 1).unwrap().verdict, n % 6 == 1 || n % 6 == 3, "n={n}");
        }
    }

    #[test]
    fn h_divisibility_examples() {
        let k3 = Hypergraph::complete(3, 2);
        assert!(h_divisible(&Hypergraph::complete(7, 2), &k3).unwrap().verdict);
        let r = h_divisible(&Hypergraph::complete(5, 2), &k3).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.failures[0].level, 0);
        assert_eq!(r.failures[0].lattice, "3Z");
        assert!(h_divisible(&Hypergraph::empty(4, 2), &k3).unwrap().verdict);
        assert!(h_divisible(&k3, &Hypergraph::empty(3, 2)).is_err());
        // perfect matching: degrees are 1, so only |H| | |G| binds
        let m = Hypergraph::new(4, 2, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = Hypergraph::new(6, 2, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let r = h_divisible(&g, &m).unwrap();
        assert_eq!(r.failures.iter().map(|f| f.level).collect::<Vec<_>>(), vec![0]);
    }

    fn k4_with_apex() -> (Hypergraph, Partition) {
        (Hypergraph::complete(4, 2), Partition::new(vec![vec![0, 1, 2], vec![3]]).unwrap())
    }

    fn resolvable_host(n: usize) -> (Hypergraph, Partition) {
        let m = (n - 1) / 2;
        let p1: Vec<u32> = (0..n as u32).collect();
        let p2: Vec<u32> = (n as u32..(n + m) as u32).collect();
        let mut edges = k_subsets(&p1, 2);
        for &x in &p1 {
            for &y in &p2 {
                edges.push(vec![x, y]);
            }
        }
        (Hypergraph::new(n + m, 2, edges).unwrap(), Partition::new(vec![p1, p2]).unwrap())
    }

    #[test]
    fn resolvable_worked_vectors() {
        let (h, hp) = k4_with_apex();
        let (g, gp) = resolvable_host(9);
        assert_eq!(g.len(), 36 + 36);
        assert!(hp_divisible(&g, &gp, &h, &hp).unwrap().verdict);
        let (index, gens, degs) = hp_vectors(&g, &gp, &h, &hp, 0).unwrap();
        assert_eq!(index, vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(gens[&vec![0, 0]], vec![vec![3, 3]]);
        assert_eq!(degs[&vec![0, 0]], vec![vec![36, 36]]);
        let (_, gens, degs) = hp_vectors(&g, &gp, &h, &hp, 1).unwrap();
        assert_eq!(gens[&vec![1, 0]], vec![vec![2, 1]]);
        assert_eq!(gens[&vec![0, 1]], vec![vec![0, 3]]);
        assert_eq!(degs[&vec![1, 0]], vec![vec![8, 4]]);
        assert_eq!(degs[&vec![0, 1]], vec![vec![0, 9]]);
    }

    #[test]
    fn resolvable_even_order_fails() {
        let (h, hp) = k4_with_apex();
        let n = 8;
        let p1: Vec<u32> = (0..n).collect();
        let p2: Vec<u32> = (n..n + 3).collect();
        let mut edges = k_subsets(&p1, 2);
        for &x in &p1 {
            for &y in &p2 {
                edges.push(vec![x, y]);
            }
        }
        let g = Hypergraph::new(11, 2, edges).unwrap();
        let gp = Partition::new(vec![p1, p2]).unwrap();
        assert!(!hp_divisible(&g, &gp, &h, &hp).unwrap().verdict);
    }

    #[test]
    fn blowup_violation() {
        let (h, hp) = k4_with_apex();
        let g = Hypergraph::new(4, 2, vec![vec![2, 3]]).unwrap();
        let gp = Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(hp_divisible(&g, &gp, &h, &hp), Err(Error::NotBlowup(_))));
    }

    #[test]
    fn trivial_partition_collapses_to_h_divisibility() {
        let k3 = Hypergraph::complete(3, 2);
        for n in 3..9 {
            let g = Hypergraph::complete(n, 2);
            let a = hp_divisible(&g, &Partition::trivial(n), &k3, &Partition::trivial(3)).unwrap().verdict;
            assert_eq!(a, h_divisible(&g, &k3).unwrap().verdict, "n={n}");
        }
    }

    #[test]
    fn singleton_parts_need_equal_bipartite_pieces() {
        let k3 = Hypergraph::complete(3, 2);
        let (full, gp) = k3.uniform_blowup(2).unwrap();
        let hp = Partition::singletons(3);
        assert!(hp_divisible(&full, &gp, &k3, &hp).unwrap().verdict);
        let fewer = Hypergraph::new(6, 2, full.edges()[1..].to_vec()).unwrap();
        let rep = hp_divisible(&fewer, &gp, &k3, &hp).unwrap();
        assert!(!rep.verdict);
        assert!(rep.failure_at(0).is_some());
    }

    #[test]
    fn balance_examples() {
        let k3 = Hypergraph::complete(3, 2);
        let (full, gp) = k3.uniform_blowup(3).unwrap();
        assert!(h_balanced(&full, &gp, &k3).unwrap());
        let minus = Hypergraph::new(9, 2, full.edges()[1..].to_vec()).unwrap();
        assert!(!h_balanced(&minus, &gp, &k3).unwrap());
        let bad = Hypergraph::new(9, 2, vec![vec![0, 1]]).unwrap();
        assert!(h_balanced(&bad, &gp, &k3).is_err());
    }
}
