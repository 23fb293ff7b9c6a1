use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{failure_u64, DivisibilityReport, Span};
use crate::combinatorics::util::injections;
use crate::combinatorics::{Digraph, Partition};
use crate::error::{Error, Result};

/// A `[D]`-edge-coloured `r`-multidigraph: arc and colour to multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultiDoc", into = "MultiDoc")]
pub struct MultiDigraph {
    n: usize,
    r: usize,
    colours: usize,
    arcs: BTreeMap<(Vec<u32>, usize), u64>,
}

#[derive(Serialize, Deserialize)]
struct MultiDoc {
    n: usize,
    r: usize,
    colours: usize,
    arcs: Vec<(Vec<u32>, usize, u64)>,
}

impl TryFrom<MultiDoc> for MultiDigraph {
    type Error = Error;
    fn try_from(d: MultiDoc) -> Result<Self> {
        let mut g = MultiDigraph::new(d.n, d.r, d.colours, std::iter::empty())?;
        for (a, c, m) in d.arcs {
            g.add(a, c, m)?;
        }
        Ok(g)
    }
}

impl From<MultiDigraph> for MultiDoc {
    fn from(g: MultiDigraph) -> Self {
        MultiDoc { n: g.n, r: g.r, colours: g.colours, arcs: g.arcs.into_iter().map(|((a, c), m)| (a, c, m)).collect() }
    }
}

impl MultiDigraph {
    pub fn new(n: usize, r: usize, colours: usize, arcs: impl IntoIterator<Item = (Vec<u32>, usize)>) -> Result<Self> {
        let mut g = MultiDigraph { n, r, colours, arcs: BTreeMap::new() };
        for (a, c) in arcs {
            g.add(a, c, 1)?;
        }
        Ok(g)
    }

    pub fn from_digraph(g: &Digraph) -> Self {
        let arcs = g.arcs_with_colours().map(|(a, d)| ((a.clone(), d), 1)).collect();
        MultiDigraph { n: g.vertex_count(), r: g.uniformity(), colours: g.colour_count(), arcs }
    }

    pub fn add(&mut self, arc: Vec<u32>, colour: usize, mult: u64) -> Result<()> {
        if arc.len() != self.r {
            return Err(Error::InvalidEdge { edge: arc, reason: format!("arc length must be {}", self.r) });
        }
        if let Some(&v) = arc.iter().find(|&&v| v as usize >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        let set: BTreeSet<u32> = arc.iter().copied().collect();
        if set.len() != arc.len() {
            return Err(Error::InvalidEdge { edge: arc, reason: "repeated vertex".into() });
        }
        if colour >= self.colours {
            return Err(Error::Invalid(format!("colour {colour} out of range for {} colours", self.colours)));
        }
        if mult > 0 {
            *self.arcs.entry((arc, colour)).or_insert(0) += mult;
        }
        Ok(())
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

    pub fn multiplicity(&self, arc: &[u32], colour: usize) -> u64 {
        self.arcs.get(&(arc.to_vec(), colour)).copied().unwrap_or(0)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (&Vec<u32>, usize, u64)> {
        self.arcs.iter().map(|((a, c), &m)| (a, *c, m))
    }

    /// `|G^d|` for each colour.
    pub fn colour_totals(&self) -> Vec<u64> {
        let mut t = vec![0; self.colours];
        for ((_, c), m) in &self.arcs {
            t[*c] += m;
        }
        t
    }

    /// `G(ψ)*` over `[D] × I^i_r`, colour-major.
    pub fn degree_vector(&self, psi: &[u32]) -> Vec<u64> {
        let pis = injections(psi.len(), self.r);
        let mut out = vec![0; self.colours * pis.len()];
        for ((e, d), m) in &self.arcs {
            for (k, pi) in pis.iter().enumerate() {
                if pi.iter().zip(psi).all(|(&p, &v)| e[p as usize] == v) {
                    out[d * pis.len() + k] += m;
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("multidigraph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A `(P, Λ)`-canonical family with the inferred per-colour index and symmetry group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalFamily {
    pub q: usize,
    pub r: usize,
    pub colours: usize,
    pub partition: Partition,
    pub family: Vec<Digraph>,
    /// `i^d`, absent for colours with no arcs.
    pub index: Vec<Option<Vec<usize>>>,
    /// `Λ^d` as permutations of `[r]`, sorted.
    pub lambda: Vec<Option<Vec<Vec<u32>>>>,
}

/// The order-respecting partition `R(i)` of `[r]`, as consecutive position blocks.
fn blocks(index: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    index
        .iter()
        .map(|&k| {
            let b = start..start + k;
            start += k;
            b
        })
        .collect()
}

fn relative(theta: &[u32], other: &[u32]) -> Vec<u32> {
    other.iter().map(|v| theta.iter().position(|x| x == v).expect("same image") as u32).collect()
}

fn image(a: &[u32]) -> Vec<u32> {
    let mut s = a.to_vec();
    s.sort_unstable();
    s
}

/// Infers `i^d` and `Λ^d`, or reports the violated clause.
pub fn canonical_family_check(family: &[Digraph], p: &Partition) -> Result<CanonicalFamily> {
    let first = family.first().ok_or_else(|| Error::NotCanonical("empty family".into()))?;
    let (q, r) = (first.vertex_count(), first.uniformity());
    if p.vertex_count() != q {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} vertices, patterns have {q}",
            p.vertex_count()
        )));
    }
    if !p.is_order_respecting() {
        return Err(Error::NotCanonical("partition is not order-respecting".into()));
    }
    if family.iter().any(|h| h.vertex_count() != q || h.uniformity() != r) {
        return Err(Error::NotCanonical("patterns differ in vertex count or uniformity".into()));
    }
    let colours = family.iter().map(|h| h.colour_count()).max().unwrap_or(1);
    let mut index: Vec<Option<Vec<usize>>> = vec![None; colours];
    let mut lambda: Vec<Option<Vec<Vec<u32>>>> = vec![None; colours];
    for h in family {
        let mut by_image: HashMap<Vec<u32>, Vec<(&Vec<u32>, usize)>> = HashMap::new();
        for (a, d) in h.arcs_with_colours() {
            by_image.entry(image(a)).or_default().push((a, d));
        }
        for (a, d) in h.arcs_with_colours() {
            let iv = p.index_vector(a)?;
            match &index[d] {
                None => index[d] = Some(iv.clone()),
                Some(prev) if *prev != iv => {
                    return Err(Error::NotCanonical(format!(
                        "clause (i): colour {d} arcs have indices {prev:?} and {iv:?}"
                    )));
                }
                _ => {}
            }
            for (j, blk) in blocks(&iv).into_iter().enumerate() {
                if a[blk].iter().any(|&v| p.part_of(v) != j) {
                    return Err(Error::NotCanonical(format!(
                        "clause (i): arc {a:?} does not send R(i)_{j} into P_{j}"
                    )));
                }
            }
            let same = &by_image[&image(a)];
            if let Some((b, d2)) = same.iter().find(|(_, d2)| *d2 != d) {
                return Err(Error::NotCanonical(format!(
                    "clause (ii): arcs {a:?} (colour {d}) and {b:?} (colour {d2}) share an image"
                )));
            }
            let mut lam: Vec<Vec<u32>> = same.iter().map(|(b, _)| relative(a, b)).collect();
            lam.sort();
            match &lambda[d] {
                None => {
                    check_product_group(&lam, &iv, d)?;
                    lambda[d] = Some(lam);
                }
                Some(prev) if *prev != lam => {
                    return Err(Error::NotCanonical(format!(
                        "clause (ii): colour {d} arcs at {a:?} give a different Λ"
                    )));
                }
                _ => {}
            }
        }
    }
    Ok(CanonicalFamily { q, r, colours, partition: p.clone(), family: family.to_vec(), index, lambda })
}

fn check_product_group(lam: &[Vec<u32>], iv: &[usize], d: usize) -> Result<()> {
    let set: BTreeSet<&Vec<u32>> = lam.iter().collect();
    for a in lam {
        for b in lam {
            let ab: Vec<u32> = b.iter().map(|&x| a[x as usize]).collect();
            if !set.contains(&ab) {
                return Err(Error::NotCanonical(format!("clause (ii): Λ^{d} is not closed under composition")));
            }
        }
    }
    let mut size = 1usize;
    for blk in blocks(iv) {
        let proj: BTreeSet<Vec<u32>> = lam.iter().map(|l| l[blk.clone()].to_vec()).collect();
        size *= proj.len();
    }
    if size != lam.len() {
        return Err(Error::NotCanonical(format!("clause (ii): Λ^{d} is not a product over the blocks of R(i^{d})")));
    }
    Ok(())
}

/// `H(θ)*` over `[D] × I^i_r` for every `θ ∈ I^i_q` and pattern, grouped by `i_P(θ)`.
pub fn master_generators(fam: &CanonicalFamily, level: usize) -> Result<BTreeMap<Vec<usize>, Vec<Vec<u64>>>> {
    let pis = injections(level, fam.r);
    let width = pis.len();
    let mut out: BTreeMap<Vec<usize>, Vec<Vec<u64>>> = BTreeMap::new();
    for h in &fam.family {
        let mut per: BTreeMap<Vec<u32>, Vec<u64>> = BTreeMap::new();
        for (e, d) in h.arcs_with_colours() {
            for (k, pi) in pis.iter().enumerate() {
                let theta: Vec<u32> = pi.iter().map(|&x| e[x as usize]).collect();
                per.entry(theta).or_insert_with(|| vec![0; fam.colours * width])[d * width + k] += 1;
            }
        }
        for (theta, v) in per {
            let slot = out.entry(fam.partition.index_vector(&theta)?).or_default();
            if !slot.contains(&v) {
                slot.push(v);
            }
        }
    }
    Ok(out)
}

/// `G(ψ)* ∈ H⟨i_P'(ψ)⟩` at every level, one increasing `ψ` per `i`-set.
pub fn master_divisible(g: &MultiDigraph, gp: &Partition, fam: &CanonicalFamily) -> Result<DivisibilityReport> {
    if g.uniformity() != fam.r {
        return Err(Error::DimensionMismatch { expected: fam.r, got: g.uniformity() });
    }
    if g.colour_count() > fam.colours {
        return Err(Error::DimensionMismatch { expected: fam.colours, got: g.colour_count() });
    }
    if gp.part_count() != fam.partition.part_count() || gp.vertex_count() != g.vertex_count() {
        return Err(Error::InvalidPartition(
            "host partition must match the pattern's part count and cover the host".into(),
        ));
    }
    let r = fam.r;
    let mut rep = DivisibilityReport::start(0..=r);
    for i in 0..=r {
        let pis = injections(i, r);
        let width = pis.len();
        let dim = fam.colours * width;
        let mut spans: BTreeMap<Vec<usize>, Span> = BTreeMap::new();
        for (idx, gens) in master_generators(fam, i)? {
            let span = spans.entry(idx).or_insert_with(|| Span::new(dim));
            for v in gens {
                span.add_u64(&v)?;
            }
        }
        let mut vecs: BTreeMap<Vec<u32>, Vec<u64>> = BTreeMap::new();
        if i == 0 {
            vecs.insert(Vec::new(), vec![0; dim]);
        }
        for (e, d, m) in g.arcs() {
            for (k, pi) in pis.iter().enumerate() {
                let psi: Vec<u32> = pi.iter().map(|&x| e[x as usize]).collect();
                if psi.windows(2).all(|w| w[0] < w[1]) {
                    vecs.entry(psi).or_insert_with(|| vec![0; dim])[d * width + k] += m;
                }
            }
        }
        let empty = Span::new(dim);
        for (psi, v) in vecs {
            let span = spans.get(&gp.index_vector(&psi)?).unwrap_or(&empty);
            if !span.contains_u64(&v)? {
                rep.record(failure_u64(i, psi, span, &v));
                break;
            }
        }
    }
    Ok(rep)
}

/// Colour-`d` arcs of `G` come in full `Λ^d`-orbits with equal multiplicity, so the
/// choice of representative arcs per image does not matter.
pub fn check_orbit_pattern(g: &MultiDigraph, fam: &CanonicalFamily) -> Result<()> {
    for (e, d, m) in g.arcs() {
        let Some(Some(lam)) = fam.lambda.get(d) else { continue };
        for l in lam {
            let moved: Vec<u32> = l.iter().map(|&x| e[x as usize]).collect();
            if g.multiplicity(&moved, d) != m {
                return Err(Error::Invalid(format!(
                    "colour {d} arc {e:?} has multiplicity {m} but its Λ-image {moved:?} has {}",
                    g.multiplicity(&moved, d)
                )));
            }
        }
    }
    Ok(())
}
