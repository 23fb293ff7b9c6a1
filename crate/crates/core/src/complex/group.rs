use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::combinatorics::util::permutations;
use crate::combinatorics::Partition;
use crate::error::{Error, Result};

/// Groups with more elements than this are not materialized.
pub const MAX_GROUP_ORDER: usize = 3_628_800;

/// A permutation `p` of `0..q` maps `x` to `p[x]`.
pub type Perm = Vec<u32>;

pub fn identity(q: usize) -> Perm {
    (0..q as u32).collect()
}

/// `(a ∘ b)(x) = a(b(x))`.
pub fn compose(a: &[u32], b: &[u32]) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn inverse(p: &[u32]) -> Perm {
    let mut inv = vec![0u32; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

fn is_perm(q: usize, p: &[u32]) -> bool {
    if p.len() != q {
        return false;
    }
    let mut seen = vec![false; q];
    p.iter().all(|&x| (x as usize) < q && !std::mem::replace(&mut seen[x as usize], true))
}

/// A permutation group on `0..q` with its elements materialized in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupDoc", into = "GroupDoc")]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

#[derive(Serialize, Deserialize)]
struct GroupDoc {
    degree: usize,
    generators: Vec<Perm>,
}

impl TryFrom<GroupDoc> for PermGroup {
    type Error = Error;
    fn try_from(d: GroupDoc) -> Result<Self> {
        PermGroup::from_generators(d.degree, d.generators)
    }
}

impl From<PermGroup> for GroupDoc {
    fn from(g: PermGroup) -> Self {
        GroupDoc { degree: g.degree, generators: g.generators }
    }
}

impl PermGroup {
    /// Closure of the generators under composition.
    pub fn from_generators(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        for g in &generators {
            if !is_perm(degree, g) {
                return Err(Error::Invalid(format!("{g:?} is not a permutation of 0..{degree}")));
            }
        }
        let mut seen: BTreeSet<Perm> = BTreeSet::new();
        let id = identity(degree);
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &generators {
                let next = compose(g, &p);
                if seen.insert(next.clone()) {
                    if seen.len() > MAX_GROUP_ORDER {
                        return Err(Error::BudgetExceeded(format!("group order exceeds {MAX_GROUP_ORDER}")));
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(PermGroup { degree, generators, elements: seen.into_iter().collect() })
    }

    /// Builds from an explicit element list, verifying closure.
    pub fn from_elements(degree: usize, elements: Vec<Perm>) -> Result<Self> {
        let set: BTreeSet<Perm> = elements.into_iter().collect();
        for p in &set {
            if !is_perm(degree, p) {
                return Err(Error::Invalid(format!("{p:?} is not a permutation of 0..{degree}")));
            }
        }
        if !set.contains(&identity(degree)) {
            return Err(Error::Invalid("element list lacks the identity".into()));
        }
        for a in &set {
            for b in &set {
                if !set.contains(&compose(a, b)) {
                    return Err(Error::Invalid("element list is not closed under composition".into()));
                }
            }
        }
        let elements: Vec<Perm> = set.into_iter().collect();
        Ok(PermGroup { degree, generators: elements.clone(), elements })
    }

    pub fn trivial(q: usize) -> Self {
        PermGroup { degree: q, generators: Vec::new(), elements: vec![identity(q)] }
    }

    pub fn symmetric(q: usize) -> Result<Self> {
        let mut gens = Vec::new();
        if q >= 2 {
            let mut t = identity(q);
            t.swap(0, 1);
            gens.push(t);
            gens.push((0..q as u32).map(|i| (i + 1) % q as u32).collect());
        }
        Self::from_generators(q, gens)
    }

    /// The stabilizer of every part of `p`, a partition of `0..q`.
    pub fn part_stabilizer(p: &Partition) -> Result<Self> {
        let q = p.vertex_count();
        let mut gens = Vec::new();
        for part in p.parts() {
            if part.len() >= 2 {
                let mut t = identity(q);
                t.swap(part[0] as usize, part[1] as usize);
                gens.push(t);
                let mut c = identity(q);
                for (k, &x) in part.iter().enumerate() {
                    c[x as usize] = part[(k + 1) % part.len()];
                }
                gens.push(c);
            }
        }
        Self::from_generators(q, gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn contains(&self, p: &[u32]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(p)).is_ok()
    }

    /// `Σ^{B'}_B` as sorted, deduplicated lists of `(x, σ(x))` for `x ∈ B`; domains are bitmasks.
    pub fn restrictions(&self, b: u32, b_prime: u32) -> Vec<Vec<(u32, u32)>> {
        let dom: Vec<u32> = bits(b);
        let mut out: BTreeSet<Vec<(u32, u32)>> = BTreeSet::new();
        for s in &self.elements {
            let img = dom.iter().fold(0u32, |m, &x| m | (1 << s[x as usize]));
            if img == b_prime {
                out.insert(dom.iter().map(|&x| (x, s[x as usize])).collect());
            }
        }
        out.into_iter().collect()
    }
}

/// The elements of a bitmask in increasing order.
pub fn bits(mask: u32) -> Vec<u32> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn mask_of(labels: &[u32]) -> u32 {
    labels.iter().fold(0, |m, &x| m | (1 << x))
}

/// All elements of `S_q` (for exact-adaptedness checks on small `q`).
pub fn symmetric_elements(q: usize) -> Vec<Perm> {
    permutations(q)
}
