//! Weight systems `γ` on `Σ^≤`-families: molecules, atoms, types, elementarity,
//! atom decompositions, the lattice `L_γ(Φ)` and regularity witnesses.
//!
//! A family member is a copy of `Σ^≤`; its elements at level `r` are the maps
//! `θ = σ|_B` with `|B| = r`, stored as [`LabelledEdge`]s from `B` to `σ(B)`.
//! `γ` is stored sparsely: absent entries are zero.

mod membership;
mod regular;
mod vector;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{ColouredMultigraph, Digraph, Partition};
use crate::complex::group::{bits, mask_of};
use crate::complex::{LabelledEdge, PermGroup};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;

pub use membership::{
    atom_decomposition, lattice_membership_lgamma, AtomTerm, DecompositionOutcome, FailingOrbit, LgammaChecker,
    MembershipOptions, MembershipReport, OrbitWitness,
};
pub use regular::{find_regularity_witness, verify_regularity_witness, MoleculeWeights, RegularityReport};
pub use vector::{encode_arcs, encode_coloured, EdgeVector};

/// Which construction produced a system; drives the matching host encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaKind {
    Coloured,
    Digraph,
    Master { partition: Partition },
    Custom,
}

/// One copy of `Σ^≤` with its weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub tag: String,
    gamma: BTreeMap<LabelledEdge, Vec<i64>>,
}

impl FamilyMember {
    /// Nonzero weights `θ ↦ γ_θ`.
    pub fn weights(&self) -> &BTreeMap<LabelledEdge, Vec<i64>> {
        &self.gamma
    }
}

/// `Σ`, a `Σ^≤`-family and `γ ∈ (ℤ^D)^{𝒜_r}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GammaDoc", into = "GammaDoc")]
pub struct GammaSystem {
    q: usize,
    r: usize,
    dim: usize,
    group: PermGroup,
    members: Vec<FamilyMember>,
    kind: GammaKind,
}

#[derive(Serialize, Deserialize)]
struct GammaDoc {
    q: usize,
    r: usize,
    dim: usize,
    generators: Vec<Vec<u32>>,
    #[serde(flatten)]
    kind: GammaKind,
    family: Vec<MemberDoc>,
}

#[derive(Serialize, Deserialize)]
struct MemberDoc {
    tag: String,
    gamma: Vec<(Vec<(u32, u32)>, Vec<i64>)>,
}

impl TryFrom<GammaDoc> for GammaSystem {
    type Error = Error;
    fn try_from(d: GammaDoc) -> Result<Self> {
        let group = PermGroup::from_generators(d.q, d.generators)?;
        let members = d
            .family
            .into_iter()
            .map(|m| {
                let entries =
                    m.gamma.into_iter().map(|(p, v)| Ok((LabelledEdge::new(p)?, v))).collect::<Result<Vec<_>>>()?;
                Ok((m.tag, entries))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut g = GammaSystem::new(d.q, d.r, d.dim, group, members)?;
        g.kind = d.kind;
        Ok(g)
    }
}

impl From<GammaSystem> for GammaDoc {
    fn from(g: GammaSystem) -> Self {
        GammaDoc {
            q: g.q,
            r: g.r,
            dim: g.dim,
            generators: g.group.generators().to_vec(),
            kind: g.kind,
            family: g
                .members
                .into_iter()
                .map(|m| MemberDoc {
                    tag: m.tag,
                    gamma: m.gamma.into_iter().map(|(t, v)| (t.pairs().collect(), v)).collect(),
                })
                .collect(),
        }
    }
}

/// Composition `θ∘τ` for `τ: B' -> B` given as `(x, τ(x))` pairs.
pub(crate) fn compose_map(theta: &LabelledEdge, tau: &[(u32, u32)]) -> LabelledEdge {
    LabelledEdge::from_sorted(
        tau.iter().map(|p| p.0).collect(),
        tau.iter().map(|&(_, y)| theta.get(y).expect("τ lands in the domain of θ")).collect(),
    )
}

/// Inverse of a labelled injection viewed as a map into labels: `F -> B` for `θ: B -> F`.
pub(crate) fn inverse_pairs(theta: &LabelledEdge) -> Vec<(u32, u32)> {
    let mut p: Vec<(u32, u32)> = theta.pairs().map(|(l, v)| (v, l)).collect();
    p.sort_unstable();
    p
}

pub(crate) fn masks_of_size(q: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << q)).filter(|m| m.count_ones() as usize == k).collect()
}

impl GammaSystem {
    /// A system from explicit weights; keys must lie in `𝒜_r`, zero vectors are dropped.
    pub fn new(
        q: usize,
        r: usize,
        dim: usize,
        group: PermGroup,
        members: Vec<(String, Vec<(LabelledEdge, Vec<i64>)>)>,
    ) -> Result<Self> {
        if group.degree() != q {
            return Err(Error::DimensionMismatch { expected: q, got: group.degree() });
        }
        if r == 0 || r > q || q >= 31 || dim == 0 {
            return Err(Error::Invalid(format!("need 1 <= r <= q < 31 and D >= 1 (q={q}, r={r}, D={dim})")));
        }
        let mut out = Vec::with_capacity(members.len());
        for (tag, entries) in members {
            let mut gamma = BTreeMap::new();
            for (theta, v) in entries {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
                }
                if theta.len() != r || !Self::in_sigma_le(&group, &theta) {
                    return Err(Error::Invalid(format!("{theta} is not an element of Σ^≤ at level {r}")));
                }
                if gamma.contains_key(&theta) {
                    return Err(Error::Invalid(format!("weight for {theta} given twice")));
                }
                if v.iter().any(|&x| x != 0) {
                    gamma.insert(theta, v);
                }
            }
            out.push(FamilyMember { tag, gamma });
        }
        Ok(GammaSystem { q, r, dim, group, members: out, kind: GammaKind::Custom })
    }

    fn in_sigma_le(group: &PermGroup, theta: &LabelledEdge) -> bool {
        let b = theta.domain_mask();
        let img = mask_of(theta.values());
        let pairs: Vec<(u32, u32)> = theta.pairs().collect();
        group.restrictions(b, img).contains(&pairs)
    }

    /// Coloured family: one member per pattern, `γ_θ = H_{Im θ} ∈ ℕ^D` (so `e_d` on colour-`d` edges).
    pub fn coloured(family: &[ColouredMultigraph], group: PermGroup) -> Result<Self> {
        let first = family.first().ok_or_else(|| Error::Invalid("empty pattern family".into()))?;
        let (q, r, dim) = (first.vertex_count(), first.uniformity(), first.colour_count());
        let mut members = Vec::new();
        for (k, h) in family.iter().enumerate() {
            if (h.vertex_count(), h.uniformity(), h.colour_count()) != (q, r, dim) {
                return Err(Error::Invalid("family patterns must share vertex count, uniformity and colours".into()));
            }
            let mut entries = Vec::new();
            for theta in sigma_le_level(&group, q, r) {
                if let Some(m) = h.multiplicity(&theta.image()) {
                    entries.push((theta, m.iter().map(|&x| x as i64).collect()));
                }
            }
            members.push((format!("H{k}"), entries));
        }
        let mut g = GammaSystem::new(q, r, dim, group, members)?;
        g.kind = GammaKind::Coloured;
        Ok(g)
    }

    /// Directed pattern: `γ_θ = 1_{θ ∈ H*}` (colour vector `e_d` for coloured arcs), over `Σ = S_q`.
    pub fn digraph(h: &Digraph) -> Result<Self> {
        if !h.is_simple() {
            return Err(Error::NonSimple("two arcs share an image; the weight system would not be elementary".into()));
        }
        let arcs: Vec<(Vec<u32>, usize)> = h.arcs_with_colours().map(|(a, d)| (a.clone(), d)).collect();
        let mut g = Self::arc_system(
            h.vertex_count(),
            h.uniformity(),
            h.colour_count(),
            PermGroup::symmetric(h.vertex_count())?,
            &[arcs],
        )?;
        g.kind = GammaKind::Digraph;
        Ok(g)
    }

    /// Directed pattern given as an arc multiset, without the simplicity check.
    pub fn digraph_unchecked(q: usize, r: usize, arcs: &[Vec<u32>]) -> Result<Self> {
        let arcs: Vec<(Vec<u32>, usize)> = arcs.iter().map(|a| (a.clone(), 0)).collect();
        let mut g = Self::arc_system(q, r, 1, PermGroup::symmetric(q)?, &[arcs])?;
        g.kind = GammaKind::Digraph;
        Ok(g)
    }

    /// Coloured directed family over the part-stabilizer of `partition`, without the canonical check.
    /// The arc system of a `(P, Λ)`-canonical coloured family with `Σ` the part stabilizer.
    pub fn master(family: &[Digraph], partition: &Partition) -> Result<Self> {
        let fam = crate::divisibility::canonical_family_check(family, partition)?;
        Self::master_unchecked(family, partition, fam.colours)
    }

    pub(crate) fn master_unchecked(family: &[Digraph], partition: &Partition, dim: usize) -> Result<Self> {
        let first = family.first().ok_or_else(|| Error::Invalid("empty pattern family".into()))?;
        let (q, r) = (first.vertex_count(), first.uniformity());
        let arcs: Vec<Vec<(Vec<u32>, usize)>> =
            family.iter().map(|h| h.arcs_with_colours().map(|(a, d)| (a.clone(), d)).collect()).collect();
        let mut g = Self::arc_system(q, r, dim, PermGroup::part_stabilizer(partition)?, &arcs)?;
        g.kind = GammaKind::Master { partition: partition.clone() };
        Ok(g)
    }

    /// `γ_θ = Σ_d (number of colour-d arcs equal to θ read in label order) e_d`.
    fn arc_system(q: usize, r: usize, dim: usize, group: PermGroup, family: &[Vec<(Vec<u32>, usize)>]) -> Result<Self> {
        let mut members = Vec::new();
        for (k, arcs) in family.iter().enumerate() {
            for (a, d) in arcs {
                if a.len() != r || a.iter().any(|&v| v as usize >= q) || *d >= dim {
                    return Err(Error::InvalidEdge {
                        edge: a.clone(),
                        reason: format!("not an arc on [{q}] with colour < {dim}"),
                    });
                }
            }
            let mut entries = Vec::new();
            for theta in sigma_le_level(&group, q, r) {
                let mut v = vec![0i64; dim];
                for (a, d) in arcs {
                    if a.as_slice() == theta.values() {
                        v[*d] += 1;
                    }
                }
                if v.iter().any(|&x| x != 0) {
                    entries.push((theta, v));
                }
            }
            members.push((format!("H{k}"), entries));
        }
        GammaSystem::new(q, r, dim, group, members)
    }

    pub fn label_count(&self) -> usize {
        self.q
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn kind(&self) -> &GammaKind {
        &self.kind
    }

    /// `γ_θ` for member `a` (zero when absent).
    pub fn weight(&self, a: usize, theta: &LabelledEdge) -> Vec<i64> {
        self.members[a].gamma.get(theta).cloned().unwrap_or_else(|| vec![0; self.dim])
    }

    /// `A_B`: the maps `σ|_B`, sorted.
    pub fn lower(&self, b: u32) -> Vec<LabelledEdge> {
        sigma_le_block(&self.group, self.q, b)
    }

    /// `Σ^B`: the maps `τ: B' -> B` with `τ = σ|_{B'}`, sorted by domain then values.
    pub fn upper(&self, b: u32) -> Vec<Vec<(u32, u32)>> {
        let k = b.count_ones() as usize;
        masks_of_size(self.q, k).into_iter().flat_map(|b2| self.group.restrictions(b2, b)).collect()
    }

    /// The molecule `γ(φ)` of member `a` at a full embedding `φ` (all `q` labels).
    pub fn molecule(&self, a: usize, phi: &LabelledEdge) -> Result<EdgeVector> {
        if phi.len() != self.q {
            return Err(Error::Invalid(format!("molecule needs a map on all {} labels, got {phi}", self.q)));
        }
        let mut out = EdgeVector::new(self.dim);
        for (theta, v) in &self.members[a].gamma {
            let pairs: Vec<(u32, u32)> = theta.pairs().collect();
            out.add(compose_map(phi, &pairs), v)?;
        }
        Ok(out)
    }

    /// Type classes per `r`-set `B`.
    pub fn compute_types(&self) -> TypeTable {
        let mut blocks = Vec::new();
        for b in masks_of_size(self.q, self.r) {
            let coordinates = self.upper(b);
            let mut classes: BTreeMap<Vec<i64>, Vec<(usize, LabelledEdge)>> = BTreeMap::new();
            let mut order: Vec<Vec<i64>> = Vec::new();
            for a in 0..self.members.len() {
                for theta in self.lower(b) {
                    let v = self.type_vector(a, &theta, &coordinates);
                    let slot = classes.entry(v.clone()).or_default();
                    if slot.is_empty() {
                        order.push(v);
                    }
                    slot.push((a, theta));
                }
            }
            let mut zero = Vec::new();
            let mut types = Vec::new();
            for v in order {
                let members = classes.remove(&v).expect("recorded");
                if v.iter().all(|&x| x == 0) {
                    zero = members;
                } else {
                    types.push(TypeClass { members, vector: v });
                }
            }
            blocks.push(BlockTypes { block: b, coordinates, types, zero });
        }
        TypeTable { dim: self.dim, blocks }
    }

    /// `γ^θ`: `τ ↦ γ_{θτ}` over `Σ^B`, flattened coordinate-major.
    fn type_vector(&self, a: usize, theta: &LabelledEdge, coordinates: &[Vec<(u32, u32)>]) -> Vec<i64> {
        let mut v = Vec::with_capacity(coordinates.len() * self.dim);
        for tau in coordinates {
            v.extend(self.weight(a, &compose_map(theta, tau)));
        }
        v
    }

    /// Elementarity: per block, the distinct nonzero type vectors are linearly independent
    /// and generate a saturated sublattice (no integral obstruction beyond the rational span).
    pub fn elementarity(&self) -> ElementarityReport {
        for block in self.compute_types().blocks {
            let k = block.types.len();
            if k == 0 {
                continue;
            }
            let mut rows = LatticeBasis::new(block.types[0].vector.len(), false);
            for t in &block.types {
                rows.insert(crate::lattice::to_big(&t.vector)).expect("uniform length");
            }
            if rows.rank() < k {
                return ElementarityReport::fail(block.block, "atoms are linearly dependent");
            }
            let mut cols = LatticeBasis::new(k, false);
            for c in 0..block.types[0].vector.len() {
                let col: Vec<i64> = block.types.iter().map(|t| t.vector[c]).collect();
                cols.insert(crate::lattice::to_big(&col)).expect("length k");
            }
            let det = cols.pivot_product();
            if cols.rank() < k || (det != 1.into() && det != (-1).into()) {
                return ElementarityReport::fail(block.block, "atoms span a non-saturated lattice");
            }
        }
        ElementarityReport { elementary: true, block: None, reason: None }
    }

    pub fn is_elementary(&self) -> bool {
        self.elementarity().elementary
    }

    /// Nonzero type counts plus the zero type, per block.
    pub fn type_counts(&self) -> Vec<(Vec<u32>, usize)> {
        self.compute_types().blocks.iter().map(|b| (bits(b.block), b.type_count())).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("gamma system serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn sigma_le_block(group: &PermGroup, q: usize, b: u32) -> Vec<LabelledEdge> {
    let k = b.count_ones() as usize;
    let labels = bits(b);
    let mut out: Vec<LabelledEdge> = masks_of_size(q, k)
        .into_iter()
        .flat_map(|img| group.restrictions(b, img))
        .map(|pairs| LabelledEdge::from_sorted(labels.clone(), pairs.iter().map(|p| p.1).collect()))
        .collect();
    out.sort();
    out
}

fn sigma_le_level(group: &PermGroup, q: usize, r: usize) -> Vec<LabelledEdge> {
    masks_of_size(q, r).into_iter().flat_map(|b| sigma_le_block(group, q, b)).collect()
}

/// One type `t = [θ]` in a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeClass {
    pub members: Vec<(usize, LabelledEdge)>,
    /// `γ^t` over the block's coordinates, `D` entries each.
    pub vector: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockTypes {
    pub block: u32,
    /// `Σ^B` in the order used by every type vector.
    pub coordinates: Vec<Vec<(u32, u32)>>,
    pub types: Vec<TypeClass>,
    /// Members of the zero type (possibly none).
    pub zero: Vec<(usize, LabelledEdge)>,
}

impl BlockTypes {
    /// Number of types including the zero type.
    pub fn type_count(&self) -> usize {
        self.types.len() + 1
    }

    /// Index of the nonzero type containing `(a, θ)`.
    pub fn type_of(&self, a: usize, theta: &LabelledEdge) -> Option<usize> {
        self.types.iter().position(|t| t.members.iter().any(|(x, th)| *x == a && th == theta))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeTable {
    pub dim: usize,
    pub blocks: Vec<BlockTypes>,
}

impl TypeTable {
    pub fn block(&self, b: u32) -> Option<&BlockTypes> {
        self.blocks.iter().find(|x| x.block == b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementarityReport {
    pub elementary: bool,
    pub block: Option<Vec<u32>>,
    pub reason: Option<String>,
}

impl ElementarityReport {
    fn fail(b: u32, reason: &str) -> Self {
        ElementarityReport { elementary: false, block: Some(bits(b)), reason: Some(reason.into()) }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Rainbow triangle on labels 0,1,2 with `Σ = {id, (01)}`: colour of pair `{x,y}` is its index
    /// among `{0,1}, {0,2}, {1,2}`, so `γ_θ = e_{Im θ}`.
    pub fn rainbow_running() -> GammaSystem {
        let h =
            ColouredMultigraph::from_coloured_edges(3, 2, 3, vec![(vec![0, 1], 0), (vec![0, 2], 1), (vec![1, 2], 2)])
                .unwrap();
        let sigma = PermGroup::from_generators(3, vec![vec![1, 0, 2]]).unwrap();
        GammaSystem::coloured(&[h], sigma).unwrap()
    }

    /// Every rainbow colouring of the triangle on labels 0,1,2 with colours from `0..d`.
    pub fn rainbow_family(d: usize) -> Vec<ColouredMultigraph> {
        let mut out = Vec::new();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if a != b && b != c && a != c {
                        let edges = vec![(vec![0, 1], a), (vec![0, 2], b), (vec![1, 2], c)];
                        out.push(ColouredMultigraph::from_coloured_edges(3, 2, d, edges).unwrap());
                    }
                }
            }
        }
        out
    }

    pub fn cyclic_triangle() -> Digraph {
        Digraph::new(3, 2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn le(p: &[(u32, u32)]) -> LabelledEdge {
        LabelledEdge::new(p.iter().copied()).unwrap()
    }

    #[test]
    fn rainbow_weights_follow_images() {
        let g = rainbow_running();
        // Σ^≤ at level 2 for Σ = {id,(01)}: {0,1} has two maps, {0,2} and {1,2} swap into each other
        assert_eq!(g.members()[0].weights().len(), 6);
        assert_eq!(g.weight(0, &le(&[(0, 1), (1, 0)])), vec![1, 0, 0]);
        assert_eq!(g.weight(0, &le(&[(0, 1), (2, 2)])), vec![0, 0, 1]);
        assert_eq!(g.weight(0, &le(&[(0, 0), (2, 2)])), vec![0, 1, 0]);
        assert!(g.is_elementary());
    }

    #[test]
    fn coloured_types_are_colours_plus_zero() {
        for d in 3..6usize {
            let fam = rainbow_family(d);
            let g = GammaSystem::coloured(&fam, PermGroup::symmetric(3).unwrap()).unwrap();
            for (_, c) in g.type_counts() {
                assert_eq!(c, d + 1);
            }
            assert!(g.is_elementary());
        }
    }

    #[test]
    fn simple_digraph_types() {
        let g = GammaSystem::digraph(&cyclic_triangle()).unwrap();
        assert!(g.type_counts().iter().all(|(_, c)| *c == 3));
        assert!(g.is_elementary());
        let r3 = Digraph::new(4, 3, vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 0], vec![3, 0, 1]]).unwrap();
        let g3 = GammaSystem::digraph(&r3).unwrap();
        assert!(g3.type_counts().iter().all(|(_, c)| *c == 7));
        assert!(g3.is_elementary());
    }

    #[test]
    fn non_simple_patterns() {
        let doubled = Digraph::new(3, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(GammaSystem::digraph(&doubled), Err(Error::NonSimple(_))));
        // the same arc twice in one colour
        let twice = GammaSystem::digraph_unchecked(3, 2, &[vec![0, 1], vec![0, 1]]).unwrap();
        assert!(!twice.is_elementary());
        // two cyclic rotations of one triple
        let rot = GammaSystem::digraph_unchecked(3, 3, &[vec![0, 1, 2], vec![1, 2, 0]]).unwrap();
        assert!(!rot.is_elementary());
        // opposite arcs on a pair encode an undirected edge and stay elementary
        let opposite = GammaSystem::digraph_unchecked(3, 2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(opposite.is_elementary());
        assert_eq!(opposite.type_counts()[0].1, 2);
    }

    #[test]
    fn custom_keys_are_validated() {
        let sigma = PermGroup::trivial(3);
        let bad = GammaSystem::new(3, 2, 1, sigma.clone(), vec![("x".into(), vec![(le(&[(0, 1), (1, 0)]), vec![1])])]);
        assert!(bad.is_err());
        let ok = GammaSystem::new(3, 2, 1, sigma, vec![("x".into(), vec![(le(&[(0, 0), (1, 1)]), vec![1])])]).unwrap();
        assert_eq!(ok.type_counts().len(), 3);
    }

    #[test]
    fn molecules_place_weights() {
        let g = GammaSystem::digraph(&cyclic_triangle()).unwrap();
        let m = g.molecule(0, &le(&[(0, 4), (1, 2), (2, 7)])).unwrap();
        // three weighted maps per label pair
        assert_eq!(m.len(), 9);
        assert_eq!(m.get(&le(&[(0, 4), (1, 2)])), Some(&vec![1]));
        assert_eq!(m.get(&le(&[(0, 4), (2, 7)])), None);
        assert_eq!(m.get(&le(&[(1, 2), (2, 7)])), Some(&vec![1]));
    }

    #[test]
    fn json_round_trip() {
        let g = rainbow_running();
        let s = g.to_json();
        let back = GammaSystem::from_json(&s).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), s);
    }
}
