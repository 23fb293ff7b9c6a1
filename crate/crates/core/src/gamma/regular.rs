use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::membership::{LgammaChecker, MembershipOptions};
use super::{compose_map, masks_of_size, EdgeVector, GammaSystem};
use crate::complex::{LabelledComplex, LabelledEdge};
use crate::error::{Error, Result};
use crate::lattice::rational::{feasible_point, SparseRow};

/// Weights `y_φ` on molecules, keyed by (family member, `φ ∈ Φ_q`).
pub type MoleculeWeights = BTreeMap<(usize, LabelledEdge), BigRational>;

/// Largest molecule count accepted by the witness search.
pub const SEARCH_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub passes: bool,
    /// `J` is a nonnegative combination of atoms (otherwise no molecule is admissible).
    pub nonnegative: bool,
    pub admissible: usize,
    pub box_ok: bool,
    /// Molecule with the weight furthest outside the box.
    pub worst_box: Option<(usize, LabelledEdge, String)>,
    /// Smallest `c` that the `∂^t y_ψ` bands need; `None` when some zero target is hit.
    pub needed_c: Option<String>,
    /// Edge and type with the largest relative deviation, with value and target.
    pub worst_edge: Option<(LabelledEdge, usize, String, String)>,
    pub checked: usize,
}

struct Admissible {
    molecules: Vec<(usize, LabelledEdge)>,
    incidences: Vec<Vec<(LabelledEdge, usize)>>,
    targets: BTreeMap<(LabelledEdge, usize), BigInt>,
    nonnegative: bool,
}

fn admissible(gamma: &GammaSystem, phi: &LabelledComplex, j: &EdgeVector) -> Result<Admissible> {
    let mut checker = LgammaChecker::new(gamma, phi, MembershipOptions { witnesses: false, ..Default::default() })?;
    if !gamma.is_elementary() {
        return Err(Error::Invalid("regularity needs an elementary weight system".into()));
    }
    let r = gamma.uniformity();
    let mut targets = BTreeMap::new();
    let mut nonnegative = true;
    for psi in phi.level(r) {
        match checker.coefficients_at(&psi, j)? {
            None => nonnegative = false,
            Some(c) => {
                for (t, x) in c.into_iter().enumerate() {
                    if x.is_negative() {
                        nonnegative = false;
                    }
                    targets.insert((psi.clone(), t), x);
                }
            }
        }
    }
    let types = checker.types().clone();
    let mut type_index: HashMap<(usize, LabelledEdge), usize> = HashMap::new();
    for block in &types.blocks {
        for (t, class) in block.types.iter().enumerate() {
            for (a, theta) in &class.members {
                type_index.insert((*a, theta.clone()), t);
            }
        }
    }
    let mut molecules = Vec::new();
    let mut incidences = Vec::new();
    if nonnegative {
        let thetas: Vec<LabelledEdge> =
            masks_of_size(gamma.label_count(), r).into_iter().flat_map(|b| gamma.lower(b)).collect();
        for a in 0..gamma.members().len() {
            for phi_e in phi.level(gamma.label_count()) {
                let mut inc = Vec::new();
                let mut ok = true;
                for theta in &thetas {
                    if let Some(&t) = type_index.get(&(a, theta.clone())) {
                        let pairs: Vec<(u32, u32)> = theta.pairs().collect();
                        let psi = compose_map(&phi_e, &pairs);
                        if targets.get(&(psi.clone(), t)).is_none_or(|x| *x < BigInt::one()) {
                            ok = false;
                            break;
                        }
                        inc.push((psi, t));
                    }
                }
                if ok {
                    molecules.push((a, phi_e));
                    incidences.push(inc);
                }
            }
        }
    }
    Ok(Admissible { molecules, incidences, targets, nonnegative })
}

fn box_bounds(phi: &LabelledComplex, gamma: &GammaSystem, omega: &BigRational) -> (BigRational, BigRational) {
    let n = BigInt::from(phi.vertex_bound());
    let base = BigRational::new(BigInt::one(), num_traits::pow(n, gamma.label_count() - gamma.uniformity()));
    (omega * &base, &base / omega)
}

/// Checks the box `y_φ ∈ [ωn^{r−q}, ω^{-1}n^{r−q}]` on `𝒜(Φ,J)` and `∂^t y_ψ = (1±c)J^t_ψ` everywhere.
pub fn verify_regularity_witness(
    y: &MoleculeWeights,
    j: &EdgeVector,
    gamma: &GammaSystem,
    phi: &LabelledComplex,
    c: &BigRational,
    omega: &BigRational,
) -> Result<RegularityReport> {
    if !omega.is_positive() || *omega > BigRational::one() || c.is_negative() {
        return Err(Error::Invalid("need 0 < ω <= 1 and c >= 0".into()));
    }
    let adm = admissible(gamma, phi, j)?;
    let index: HashMap<&(usize, LabelledEdge), usize> = adm.molecules.iter().enumerate().map(|(k, m)| (m, k)).collect();
    if let Some(((a, e), _)) = y.iter().find(|(k, _)| !index.contains_key(k)) {
        return Err(Error::Invalid(format!("weight given for molecule ({a}, {e}) outside 𝒜(Φ,J)")));
    }
    let (lo, hi) = box_bounds(phi, gamma, omega);
    let zero = BigRational::zero();
    let mut box_ok = true;
    let mut worst_box: Option<(BigRational, usize)> = None;
    let mut sums: HashMap<(LabelledEdge, usize), BigRational> = HashMap::new();
    for (k, m) in adm.molecules.iter().enumerate() {
        let w = y.get(m).unwrap_or(&zero);
        let gap = if *w < lo {
            &lo - w
        } else if *w > hi {
            w - &hi
        } else {
            BigRational::zero()
        };
        if gap.is_positive() {
            box_ok = false;
            if worst_box.as_ref().is_none_or(|(g, _)| gap > *g) {
                worst_box = Some((gap, k));
            }
        }
        if !w.is_zero() {
            for key in &adm.incidences[k] {
                *sums.entry(key.clone()).or_insert_with(BigRational::zero) += w;
            }
        }
    }
    let mut needed: Option<BigRational> = Some(BigRational::zero());
    let mut worst_edge: Option<(LabelledEdge, usize, BigRational, BigRational)> = None;
    let mut worst_dev = BigRational::from_integer((-1).into());
    let mut checked = 0;
    let mut keys: Vec<&(LabelledEdge, usize)> = adm.targets.keys().chain(sums.keys()).collect();
    keys.sort();
    keys.dedup();
    for key in keys {
        checked += 1;
        let target = BigRational::from_integer(adm.targets.get(key).cloned().unwrap_or_default());
        let value = sums.get(key).cloned().unwrap_or_default();
        let dev = if target.is_zero() {
            if value.is_zero() {
                continue;
            }
            needed = None;
            BigRational::from_integer(1_000_000_000.into())
        } else {
            let d = (&value - &target).abs() / target.abs();
            if let Some(n) = &mut needed {
                if d > *n {
                    *n = d.clone();
                }
            }
            d
        };
        if dev > worst_dev {
            worst_dev = dev;
            worst_edge = Some((key.0.clone(), key.1, value, target));
        }
    }
    let bands_ok = needed.as_ref().is_some_and(|n| n <= c);
    Ok(RegularityReport {
        passes: adm.nonnegative && box_ok && bands_ok,
        nonnegative: adm.nonnegative,
        admissible: adm.molecules.len(),
        box_ok,
        worst_box: worst_box.map(|(_, k)| {
            let (a, e) = adm.molecules[k].clone();
            let w = y.get(&(a, e.clone())).cloned().unwrap_or_default();
            (a, e, w.to_string())
        }),
        needed_c: needed.map(|n| n.to_string()),
        worst_edge: worst_edge
            .filter(|_| !worst_dev.is_negative())
            .map(|(e, t, v, tg)| (e, t, v.to_string(), tg.to_string())),
        checked,
    })
}

/// Searches for a witness by exact rational linear feasibility; `None` when none exists.
pub fn find_regularity_witness(
    j: &EdgeVector,
    gamma: &GammaSystem,
    phi: &LabelledComplex,
    c: &BigRational,
    omega: &BigRational,
) -> Result<Option<MoleculeWeights>> {
    if !omega.is_positive() || *omega > BigRational::one() || c.is_negative() {
        return Err(Error::Invalid("need 0 < ω <= 1 and c >= 0".into()));
    }
    let adm = admissible(gamma, phi, j)?;
    if !adm.nonnegative {
        return Ok(None);
    }
    if adm.molecules.len() > SEARCH_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "{} molecules exceed the search limit {SEARCH_LIMIT}",
            adm.molecules.len()
        )));
    }
    let mut row_of: BTreeMap<(LabelledEdge, usize), usize> = BTreeMap::new();
    for key in adm.targets.keys() {
        let n = row_of.len();
        row_of.insert(key.clone(), n);
    }
    let mut rows: Vec<SparseRow> = vec![Vec::new(); row_of.len()];
    for (k, inc) in adm.incidences.iter().enumerate() {
        for key in inc {
            rows[row_of[key]].push((k, BigRational::one()));
        }
    }
    let one = BigRational::one();
    let bands: Vec<(BigRational, BigRational)> = row_of
        .keys()
        .map(|key| {
            let t = BigRational::from_integer(adm.targets[key].clone());
            (&t * (&one - c), &t * (&one + c))
        })
        .collect();
    let (lo, hi) = box_bounds(phi, gamma, omega);
    let vars = vec![(lo, hi); adm.molecules.len()];
    Ok(feasible_point(&rows, &bands, &vars)?.map(|x| adm.molecules.into_iter().zip(x).collect()))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{encode_arcs, encode_coloured};
    use super::*;
    use crate::combinatorics::util::falling;
    use crate::combinatorics::{ColouredMultigraph, Digraph, Hypergraph, Partition};
    use crate::complex::PermGroup;
    use crate::lattice::rational::{rat, ratio};

    fn uniform(gamma: &GammaSystem, phi: &LabelledComplex, w: &BigRational) -> MoleculeWeights {
        let mut y = MoleculeWeights::new();
        for a in 0..gamma.members().len() {
            for e in phi.level(gamma.label_count()) {
                y.insert((a, e), w.clone());
            }
        }
        y
    }

    #[test]
    fn complete_digraph_closed_form_is_exact() {
        let h = cyclic_triangle();
        let g = GammaSystem::digraph(&h).unwrap();
        for n in [4usize, 5, 6] {
            let phi = LabelledComplex::complete(3, n).unwrap();
            let j = encode_arcs(&Digraph::complete(n, 2), &phi, 1).unwrap();
            let num = BigInt::from(falling(n as u64, 2));
            let den = BigInt::from(falling(n as u64, 3)) * BigInt::from(h.len());
            let y = uniform(&g, &phi, &BigRational::new(num, den));
            let rep = verify_regularity_witness(&y, &j, &g, &phi, &rat(0), &ratio(1, 10)).unwrap();
            assert!(rep.passes, "n={n}: {rep:?}");
            assert_eq!(rep.needed_c.as_deref(), Some("0"));
            assert_eq!(rep.admissible, n * (n - 1) * (n - 2));
            let zero = uniform(&g, &phi, &rat(0));
            assert!(!verify_regularity_witness(&zero, &j, &g, &phi, &rat(0), &ratio(1, 10)).unwrap().passes);
        }
    }

    #[test]
    fn complete_blowup_uniform_weights() {
        // triangle pattern with singleton parts: H(n) is the complete tripartite graph
        let tri = ColouredMultigraph::monochromatic(&Hypergraph::complete(3, 2), 1, 0).unwrap();
        let g = GammaSystem::coloured(&[tri], PermGroup::trivial(3)).unwrap();
        let n = 3;
        let phi =
            LabelledComplex::complete_partite(&Partition::singletons(3), &Partition::from_sizes(&[n, n, n])).unwrap();
        let host = Hypergraph::complete(3, 2).uniform_blowup(n).unwrap().0;
        let j = encode_coloured(&ColouredMultigraph::monochromatic(&host, 1, 0).unwrap(), &phi).unwrap();
        // each edge lies in n triangles, one per vertex of the third class
        let y = uniform(&g, &phi, &ratio(1, n as i64));
        let rep = verify_regularity_witness(&y, &j, &g, &phi, &rat(0), &ratio(1, 3)).unwrap();
        assert!(rep.passes, "{rep:?}");
    }

    #[test]
    fn off_support_weights_are_rejected() {
        let g = GammaSystem::digraph(&cyclic_triangle()).unwrap();
        let phi = LabelledComplex::complete(3, 4).unwrap();
        let j = encode_arcs(&Digraph::new(4, 2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap(), &phi, 1).unwrap();
        let y = uniform(&g, &phi, &rat(1));
        assert!(verify_regularity_witness(&y, &j, &g, &phi, &rat(0), &rat(1)).is_err());
    }

    #[test]
    fn search_recovers_a_witness() {
        let g = GammaSystem::digraph(&cyclic_triangle()).unwrap();
        let phi = LabelledComplex::complete(3, 4).unwrap();
        let j = encode_arcs(&Digraph::complete(4, 2), &phi, 1).unwrap();
        let y = find_regularity_witness(&j, &g, &phi, &ratio(1, 10), &ratio(1, 10)).unwrap().unwrap();
        let rep = verify_regularity_witness(&y, &j, &g, &phi, &ratio(1, 10), &ratio(1, 10)).unwrap();
        assert!(rep.passes, "{rep:?}");
        // the single-triangle host needs total weight 1 on three molecules pinned at 1/4
        let one = encode_arcs(&Digraph::new(4, 2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap(), &phi, 1).unwrap();
        assert!(find_regularity_witness(&one, &g, &phi, &rat(0), &rat(1)).unwrap().is_none());
    }
}
