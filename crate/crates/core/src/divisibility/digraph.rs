use std::collections::HashMap;

use super::{failure_u64, sorted, DivisibilityReport, Span};
use crate::combinatorics::util::injections;
use crate::combinatorics::Digraph;
use crate::error::{Error, Result};

/// Degree vectors `G(ψ)*` over `I^i_r` of every increasing `ψ` met by an arc; one
/// representative per `i`-set, since the vectors of other orderings permute coordinates.
pub(crate) fn representative_vectors(g: &Digraph, i: usize) -> HashMap<Vec<u32>, Vec<u64>> {
    let pis = injections(i, g.uniformity());
    let mut map: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
    for e in g.arcs() {
        for (k, pi) in pis.iter().enumerate() {
            let psi: Vec<u32> = pi.iter().map(|&p| e[p as usize]).collect();
            if psi.windows(2).all(|w| w[0] < w[1]) {
                map.entry(psi).or_insert_with(|| vec![0; pis.len()])[k] += 1;
            }
        }
    }
    map
}

/// `G(ψ)* ∈ ⟨H(θ)* : θ ∈ I^i_q⟩` for all levels `0 ≤ i ≤ r`.
pub fn digraph_divisible(g: &Digraph, h: &Digraph) -> Result<DivisibilityReport> {
    let r = g.uniformity();
    if h.uniformity() != r {
        return Err(Error::DimensionMismatch { expected: r, got: h.uniformity() });
    }
    if !h.is_simple() {
        return Err(Error::NonSimple("two pattern arcs share an image".into()));
    }
    let mut rep = DivisibilityReport::start(0..=r);
    for i in 0..=r {
        let pis = injections(i, r);
        let mut gens: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
        for e in h.arcs() {
            for (k, pi) in pis.iter().enumerate() {
                let theta: Vec<u32> = pi.iter().map(|&p| e[p as usize]).collect();
                gens.entry(theta).or_insert_with(|| vec![0; pis.len()])[k] += 1;
            }
        }
        let mut span = Span::new(pis.len());
        for v in sorted(gens).values() {
            span.add_u64(v)?;
        }
        let mut vecs = sorted(representative_vectors(g, i));
        if i == 0 {
            vecs.entry(Vec::new()).or_insert_with(|| vec![0]);
        }
        for (psi, v) in vecs {
            if !span.contains_u64(&v)? {
                rep.record(failure_u64(i, psi, &span, &v));
                break;
            }
        }
    }
    Ok(rep)
}

/// `G(ψ)*_θ = G(ψ)*_θ'` whenever `θ' = θ + c` pointwise (no wrap-around), at every level.
pub fn shift_regular(g: &Digraph) -> bool {
    let r = g.uniformity();
    for i in 1..=r {
        let pis = injections(i, r);
        let pos: HashMap<&Vec<u32>, usize> = pis.iter().enumerate().map(|(k, p)| (p, k)).collect();
        // pairs (θ, θ+1) generate the relation
        let steps: Vec<(usize, usize)> = pis
            .iter()
            .enumerate()
            .filter_map(|(k, p)| {
                let shifted: Vec<u32> = p.iter().map(|&x| x + 1).collect();
                pos.get(&shifted).map(|&k2| (k, k2))
            })
            .collect();
        for v in representative_vectors(g, i).values() {
            if steps.iter().any(|&(a, b)| v[a] != v[b]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::util::{falling, k_subsets};
    use rand::{Rng, SeedableRng};

    fn tight(q: u32, r: u32) -> Digraph {
        Digraph::new(q as usize, r as usize, (0..q).map(|j| (0..r).map(|i| (i + j) % q).collect::<Vec<_>>())).unwrap()
    }

    #[test]
    fn complete_digraph_and_cycle() {
        let c = tight(3, 2);
        assert!(digraph_divisible(&Digraph::complete(4, 2), &c).unwrap().verdict);
        let one = Digraph::new(3, 2, vec![vec![0, 1]]).unwrap();
        let rep = digraph_divisible(&one, &c).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.failures[0].level, 0);
        let bad = Digraph::new(3, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(digraph_divisible(&one, &bad), Err(Error::NonSimple(_))));
    }

    #[test]
    fn complete_digraph_is_shift_regular_with_constant() {
        for (n, r) in [(4usize, 2usize), (5, 3), (5, 2)] {
            let kd = Digraph::complete(n, r);
            assert!(shift_regular(&kd));
            let verts: Vec<u32> = (0..n as u32).collect();
            for i in 0..=r {
                let want = falling(n as u64, r as u64) / falling(n as u64, i as u64);
                for psi in k_subsets(&verts, i) {
                    let v = kd.digraph_degree_vector(&psi).unwrap();
                    assert!(v.iter().all(|&x| num_bigint::BigUint::from(x) == want));
                }
            }
        }
    }

    #[test]
    fn cyclic_condition_exhaustive_on_kd4() {
        let c = tight(3, 2);
        let all = Digraph::complete(4, 2).arcs().to_vec();
        for mask in 0u32..1 << all.len() {
            let arcs: Vec<_> = (0..all.len()).filter(|b| mask >> b & 1 == 1).map(|b| all[b].clone()).collect();
            let g = Digraph::new(4, 2, arcs).unwrap();
            let want = shift_regular(&g) && g.len().is_multiple_of(3);
            assert_eq!(digraph_divisible(&g, &c).unwrap().verdict, want, "mask {mask:b}");
        }
    }

    #[test]
    fn cyclic_condition_seeded_three_uniform() {
        let c = tight(4, 3);
        let all = Digraph::complete(5, 3).arcs().to_vec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut agree_true = 0;
        for k in 0..400 {
            // mix dense random subsets with unions of cycle copies so both verdicts occur
            let arcs: Vec<Vec<u32>> = if k % 2 == 0 {
                all.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
            } else {
                let mut s = std::collections::BTreeSet::new();
                for _ in 0..rng.gen_range(1..4) {
                    let mut perm: Vec<u32> = (0..5).collect();
                    for i in (1..5).rev() {
                        perm.swap(i, rng.gen_range(0..=i));
                    }
                    for a in c.arcs() {
                        s.insert(a.iter().map(|&x| perm[x as usize]).collect::<Vec<_>>());
                    }
                }
                s.into_iter().collect()
            };
            let g = Digraph::new(5, 3, arcs).unwrap();
            let want = shift_regular(&g) && g.len().is_multiple_of(4);
            agree_true += want as usize;
            assert_eq!(digraph_divisible(&g, &c).unwrap().verdict, want);
        }
        assert!(agree_true > 0);
    }
}
