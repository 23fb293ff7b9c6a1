use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::{compose_map, inverse_pairs, masks_of_size, EdgeVector, GammaSystem, TypeTable};
use crate::complex::{LabelledComplex, LabelledEdge};
use crate::error::{Error, Result};
use crate::lattice::{to_big, LatticeBasis};

/// Complexes larger than this many labelled edges are refused.
pub const MAX_COMPLEX_EDGES: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MembershipOptions {
    /// Also enumerate the orbits above level `r` (where `J♯` vanishes identically).
    pub include_upper_levels: bool,
    /// Return integer witnesses for every checked orbit.
    pub witnesses: bool,
    /// Verify that the complex is `Σ`-adapted before checking.
    pub check_adapted: bool,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        MembershipOptions { include_upper_levels: false, witnesses: true, check_adapted: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailingOrbit {
    pub representative: LabelledEdge,
    pub level: usize,
    pub orbit_size: usize,
    /// `(J♯)^O`, flattened B-major, then orbit member, then colour.
    pub target: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitWitness {
    pub representative: LabelledEdge,
    /// Generators as `(family member, θ')` with `θ'` defined on the representative's labels.
    pub generators: Vec<(usize, LabelledEdge)>,
    pub coefficients: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    pub orbits_checked: usize,
    pub upper_orbits_checked: usize,
    pub failing: Option<FailingOrbit>,
    pub witnesses: Vec<OrbitWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomTerm {
    pub representative: LabelledEdge,
    /// Index into the block's nonzero types.
    pub type_index: usize,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionOutcome {
    pub terms: Vec<AtomTerm>,
    pub failing: Option<LabelledEdge>,
}

impl DecompositionOutcome {
    pub fn succeeded(&self) -> bool {
        self.failing.is_none()
    }
}

struct Shape {
    basis: LatticeBasis,
    generators: Vec<(usize, LabelledEdge)>,
    memo: HashMap<Vec<i64>, bool>,
}

/// Reusable `L_γ(Φ)` checker; lattices are cached per orbit shape across queries.
pub struct LgammaChecker<'a> {
    gamma: &'a GammaSystem,
    phi: &'a LabelledComplex,
    opts: MembershipOptions,
    q_index: HashMap<u32, usize>,
    blocks: usize,
    top: HashSet<LabelledEdge>,
    gsharp: HashMap<(usize, LabelledEdge), Vec<(usize, Vec<i64>)>>,
    upper: HashMap<u32, Vec<Vec<(u32, u32)>>>,
    lower: HashMap<u32, Vec<LabelledEdge>>,
    shapes: HashMap<(u32, Vec<bool>), Shape>,
    types: TypeTable,
    atom_shapes: HashMap<(u32, Vec<bool>), LatticeBasis>,
}

impl<'a> LgammaChecker<'a> {
    pub fn new(gamma: &'a GammaSystem, phi: &'a LabelledComplex, opts: MembershipOptions) -> Result<Self> {
        let q = gamma.label_count();
        if phi.label_count() != q {
            return Err(Error::DimensionMismatch { expected: q, got: phi.label_count() });
        }
        if phi.len() > MAX_COMPLEX_EDGES {
            return Err(Error::BudgetExceeded(format!("complex has more than {MAX_COMPLEX_EDGES} labelled edges")));
        }
        if opts.check_adapted && !phi.is_adapted(gamma.group()) {
            return Err(Error::Invalid("complex is not adapted to the group of the weight system".into()));
        }
        let q_masks = masks_of_size(q, gamma.uniformity());
        let q_index = q_masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let full = (1u32 << q) - 1;
        let mut top = HashSet::new();
        for e in phi.level(q) {
            let mut sub = full;
            loop {
                top.insert(e.restrict(sub));
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & full;
            }
        }
        let mut acc: HashMap<(usize, LabelledEdge), BTreeMap<usize, Vec<i64>>> = HashMap::new();
        for (a, m) in gamma.members().iter().enumerate() {
            for (theta, v) in m.weights() {
                let b = theta.domain_mask();
                let qi = q_index_of(&q_masks, b);
                let mut sub = b;
                loop {
                    let slot =
                        acc.entry((a, theta.restrict(sub))).or_default().entry(qi).or_insert_with(|| vec![0; v.len()]);
                    for (s, x) in slot.iter_mut().zip(v) {
                        *s += x;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & b;
                }
            }
        }
        let gsharp = acc.into_iter().map(|(k, m)| (k, m.into_iter().collect())).collect();
        Ok(LgammaChecker {
            gamma,
            phi,
            opts,
            q_index,
            blocks: q_masks.len(),
            top,
            gsharp,
            upper: HashMap::new(),
            lower: HashMap::new(),
            shapes: HashMap::new(),
            types: gamma.compute_types(),
            atom_shapes: HashMap::new(),
        })
    }

    fn upper_of(&mut self, b: u32) -> &Vec<Vec<(u32, u32)>> {
        let g = self.gamma;
        self.upper.entry(b).or_insert_with(|| g.upper(b))
    }

    fn lower_of(&mut self, b: u32) -> &Vec<LabelledEdge> {
        let g = self.gamma;
        self.lower.entry(b).or_insert_with(|| g.lower(b))
    }

    /// True when `ψ∘θ^{-1}` extends to some `φ ∈ Φ_q`.
    fn realizable(&self, psi: &LabelledEdge, theta: &LabelledEdge) -> bool {
        self.top.contains(&compose_map(psi, &inverse_pairs(theta)))
    }

    fn check_support(&self, j: &EdgeVector) -> Result<()> {
        if j.dim() != self.gamma.dim() {
            return Err(Error::DimensionMismatch { expected: self.gamma.dim(), got: j.dim() });
        }
        if !j.supported_in(self.phi, self.gamma.uniformity()) {
            return Err(Error::Invalid("edge vector has support outside Φ_r".into()));
        }
        Ok(())
    }

    /// Decides `J ∈ L_γ(Φ)`, stopping at the first failing orbit (orbits in canonical order).
    pub fn check(&mut self, j: &EdgeVector) -> Result<MembershipReport> {
        self.check_support(j)?;
        let d = self.gamma.dim();
        let width = self.blocks * d;
        // J♯ at every restriction of a support edge
        let mut sharp: HashMap<LabelledEdge, Vec<i64>> = HashMap::new();
        for (psi, v) in j.iter() {
            let b = psi.domain_mask();
            let qi = self.q_index[&b];
            let mut sub = b;
            loop {
                let slot = sharp.entry(psi.restrict(sub)).or_insert_with(|| vec![0; width]);
                for (s, x) in slot[qi * d..(qi + 1) * d].iter_mut().zip(v) {
                    *s += x;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & b;
            }
        }
        let group = self.gamma.group().clone();
        let mut reps: BTreeSet<(usize, LabelledEdge)> = BTreeSet::new();
        let mut seen: HashSet<LabelledEdge> = HashSet::new();
        for (e, v) in &sharp {
            if seen.contains(e) || v.iter().all(|&x| x == 0) {
                continue;
            }
            let orbit = e.orbit(&group);
            let rep = orbit[0].clone();
            seen.extend(orbit);
            reps.insert((rep.len(), rep));
        }
        let mut report = MembershipReport {
            member: true,
            orbits_checked: 0,
            upper_orbits_checked: 0,
            failing: None,
            witnesses: Vec::new(),
        };
        for (level, rep) in reps {
            let b0 = rep.domain_mask();
            let coords = self.upper_of(b0).clone();
            let m = coords.len();
            let mut target = vec![0i64; width * m];
            for (ti, tau) in coords.iter().enumerate() {
                if let Some(v) = sharp.get(&compose_map(&rep, tau)) {
                    for qi in 0..self.blocks {
                        for c in 0..d {
                            target[(qi * m + ti) * d + c] = v[qi * d + c];
                        }
                    }
                }
            }
            report.orbits_checked += 1;
            let key = self.shape_key(&rep);
            let witnesses = self.opts.witnesses;
            let shape = self.shape(&rep, key, &coords)?;
            let ok = if witnesses {
                match shape.basis.solve(&to_big(&target))? {
                    Some(coeffs) => {
                        report.witnesses.push(OrbitWitness {
                            representative: rep.clone(),
                            generators: shape.generators.clone(),
                            coefficients: coeffs.iter().map(|c| c.to_string()).collect(),
                        });
                        true
                    }
                    None => false,
                }
            } else if let Some(&hit) = shape.memo.get(&target) {
                hit
            } else {
                let hit = shape.basis.contains(&to_big(&target))?;
                shape.memo.insert(target.clone(), hit);
                hit
            };
            if !ok {
                report.member = false;
                report.failing = Some(FailingOrbit { representative: rep, level, orbit_size: m, target });
                return Ok(report);
            }
        }
        if self.opts.include_upper_levels {
            for k in self.gamma.uniformity() + 1..=self.gamma.label_count() {
                report.upper_orbits_checked += self.phi.orbits(k, &group).len();
            }
        }
        Ok(report)
    }

    fn shape_key(&mut self, rep: &LabelledEdge) -> (u32, Vec<bool>) {
        let b0 = rep.domain_mask();
        let lower = self.lower_of(b0).clone();
        let mut valid = Vec::with_capacity(lower.len() * self.gamma.members().len());
        for _ in 0..self.gamma.members().len() {
            for theta in &lower {
                valid.push(self.realizable(rep, theta));
            }
        }
        (b0, valid)
    }

    fn shape(&mut self, rep: &LabelledEdge, key: (u32, Vec<bool>), coords: &[Vec<(u32, u32)>]) -> Result<&mut Shape> {
        if !self.shapes.contains_key(&key) {
            let d = self.gamma.dim();
            let m = coords.len();
            let lower = self.lower_of(rep.domain_mask()).clone();
            let mut basis = LatticeBasis::new(self.blocks * m * d, self.opts.witnesses);
            let mut generators = Vec::new();
            let mut k = 0;
            for a in 0..self.gamma.members().len() {
                for theta in &lower {
                    let valid = key.1[k];
                    k += 1;
                    if !valid {
                        continue;
                    }
                    let mut v = vec![0i64; self.blocks * m * d];
                    for (ti, tau) in coords.iter().enumerate() {
                        if let Some(list) = self.gsharp.get(&(a, compose_map(theta, tau))) {
                            for (qi, x) in list {
                                for c in 0..d {
                                    v[(qi * m + ti) * d + c] = x[c];
                                }
                            }
                        }
                    }
                    if v.iter().any(|&x| x != 0) {
                        basis.insert(to_big(&v))?;
                        generators.push((a, theta.clone()));
                    }
                }
            }
            self.shapes.insert(key.clone(), Shape { basis, generators, memo: HashMap::new() });
        }
        Ok(self.shapes.get_mut(&key).expect("inserted"))
    }

    /// Atom coefficients `J^t_ψ` at base `ψ ∈ Φ_r`, one per nonzero type of the block
    /// (zero for types not realized at `ψ`), or `None` when `J^{ψΣ}` is not an atom combination.
    pub fn coefficients_at(&mut self, psi: &LabelledEdge, j: &EdgeVector) -> Result<Option<Vec<BigInt>>> {
        let b = psi.domain_mask();
        let coords = self.upper_of(b).clone();
        let block = self.types.block(b).ok_or_else(|| Error::Invalid(format!("{psi} is not at level r")))?.clone();
        let mut target = Vec::with_capacity(coords.len() * self.gamma.dim());
        for tau in &coords {
            target.extend(j.value(&compose_map(psi, tau)));
        }
        let realized: Vec<bool> =
            block.types.iter().map(|t| t.members.iter().any(|(_, th)| self.realizable(psi, th))).collect();
        let key = (b, realized.clone());
        if !self.atom_shapes.contains_key(&key) {
            let mut basis = LatticeBasis::new(target.len(), true);
            for (t, &ok) in block.types.iter().zip(&realized) {
                if ok {
                    basis.insert(to_big(&t.vector))?;
                }
            }
            self.atom_shapes.insert(key.clone(), basis);
        }
        let basis = &self.atom_shapes[&key];
        let Some(sol) = basis.solve(&to_big(&target))? else { return Ok(None) };
        let mut out = vec![BigInt::zero(); block.types.len()];
        let mut k = 0;
        for (slot, &ok) in out.iter_mut().zip(&realized) {
            if ok {
                *slot = sol[k].clone();
                k += 1;
            }
        }
        Ok(Some(out))
    }

    pub fn types(&self) -> &TypeTable {
        &self.types
    }

    pub fn complex(&self) -> &LabelledComplex {
        self.phi
    }

    pub fn gamma(&self) -> &GammaSystem {
        self.gamma
    }

    /// The atom decomposition over canonical orbit representatives of `Φ_r`.
    pub fn decompose(&mut self, j: &EdgeVector) -> Result<DecompositionOutcome> {
        if !self.gamma.is_elementary() {
            return Err(Error::Invalid("atom decompositions need an elementary weight system".into()));
        }
        self.check_support(j)?;
        let group = self.gamma.group().clone();
        let reps: BTreeSet<LabelledEdge> = j.iter().map(|(e, _)| e.canonical(&group)).collect();
        let mut terms = Vec::new();
        for rep in reps {
            match self.coefficients_at(&rep, j)? {
                None => return Ok(DecompositionOutcome { terms, failing: Some(rep) }),
                Some(c) => {
                    for (t, x) in c.into_iter().enumerate() {
                        if !x.is_zero() {
                            terms.push(AtomTerm {
                                representative: rep.clone(),
                                type_index: t,
                                coefficient: x.to_string(),
                            });
                        }
                    }
                }
            }
        }
        Ok(DecompositionOutcome { terms, failing: None })
    }
}

fn q_index_of(masks: &[u32], b: u32) -> usize {
    masks.iter().position(|&m| m == b).expect("r-set mask")
}

/// One-shot `J ∈ L_γ(Φ)` with witnesses.
pub fn lattice_membership_lgamma(
    j: &EdgeVector,
    gamma: &GammaSystem,
    phi: &LabelledComplex,
) -> Result<MembershipReport> {
    LgammaChecker::new(gamma, phi, MembershipOptions::default())?.check(j)
}

/// One-shot atom decomposition over orbit representatives.
pub fn atom_decomposition(j: &EdgeVector, gamma: &GammaSystem, phi: &LabelledComplex) -> Result<DecompositionOutcome> {
    LgammaChecker::new(gamma, phi, MembershipOptions { witnesses: false, ..Default::default() })?.decompose(j)
}
