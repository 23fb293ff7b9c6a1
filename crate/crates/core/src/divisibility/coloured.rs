use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{failure_u64, sorted, DivisibilityReport, Span};
use crate::combinatorics::util::{binomial, k_subsets};
use crate::combinatorics::ColouredMultigraph;
use crate::error::{Error, Result};
use crate::lattice::rational::{feasible_point, SparseRow};

fn check_family(g: &ColouredMultigraph, family: &[ColouredMultigraph]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::Invalid("empty pattern family".into()));
    }
    for h in family {
        if h.uniformity() != g.uniformity() {
            return Err(Error::DimensionMismatch { expected: g.uniformity(), got: h.uniformity() });
        }
        if h.colour_count() != g.colour_count() {
            return Err(Error::DimensionMismatch { expected: g.colour_count(), got: h.colour_count() });
        }
        if h.vertex_count() != family[0].vertex_count() {
            return Err(Error::Invalid("patterns must share a vertex set".into()));
        }
    }
    Ok(())
}

/// Each coloured degree vector `G(e)*` lies in `⟨H(f)* : |f| = |e|, H ∈ 𝓗⟩`.
pub fn coloured_divisible(g: &ColouredMultigraph, family: &[ColouredMultigraph]) -> Result<DivisibilityReport> {
    check_family(g, family)?;
    let (r, dim) = (g.uniformity(), g.colour_count());
    let q = family[0].vertex_count() as u32;
    let hv: Vec<u32> = (0..q).collect();
    let mut rep = DivisibilityReport::start(0..=r);
    for i in 0..=r {
        let mut span = Span::new(dim);
        for h in family {
            let map = h.degree_vector_map(i);
            for f in k_subsets(&hv, i) {
                if let Some(v) = map.get(&f) {
                    span.add_u64(v)?;
                }
            }
        }
        let mut vecs = sorted(g.degree_vector_map(i));
        if i == 0 {
            vecs.entry(Vec::new()).or_insert_with(|| vec![0; dim]);
        }
        for (e, v) in vecs {
            if !span.contains_u64(&v)? {
                rep.record(failure_u64(i, e, &span, &v));
                break;
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub balanced: bool,
    /// Pattern weights `p_H` as reduced fractions.
    pub weights: Option<Vec<String>>,
    /// For the rainbow-triangle family: every colour density is at most a third of the total.
    pub rainbow_cone: Option<bool>,
    /// For the rainbow-triangle family: each `bD² < d(G^α) < d(G)/3 − bD³`.
    pub rainbow_sufficient: Option<bool>,
    /// The exact verdict is consistent with both closed-form statements.
    pub agreement: Option<bool>,
}

fn density(g: &ColouredMultigraph) -> Vec<BigRational> {
    let denom = BigRational::from_integer(binomial(g.vertex_count() as u64, g.uniformity() as u64).into());
    g.colour_totals().iter().map(|&x| BigRational::from_integer(x.into()) / &denom).collect()
}

fn is_rainbow_family(family: &[ColouredMultigraph]) -> bool {
    let d = family[0].colour_count();
    let expected = d * d.saturating_sub(1) * d.saturating_sub(2);
    family.len() == expected
        && family.iter().all(|h| {
            let t = h.colour_totals();
            h.vertex_count() == 3 && h.uniformity() == 2 && h.total() == 3 && t.iter().all(|&x| x <= 1)
        })
}

/// `(b,c)`-balance: some `p ∈ [b, 1/b]^𝓗` with `d(G)* = (1 ± c) Σ p_H d(H)*`, decided exactly.
pub fn coloured_balanced(
    g: &ColouredMultigraph,
    family: &[ColouredMultigraph],
    b: &BigRational,
    c: &BigRational,
) -> Result<BalanceReport> {
    check_family(g, family)?;
    if !(*b > BigRational::zero() && *b <= BigRational::one()) || c < &BigRational::zero() {
        return Err(Error::Invalid("need 0 < b ≤ 1 and c ≥ 0".into()));
    }
    let dg = density(g);
    let dh: Vec<Vec<BigRational>> = family.iter().map(density).collect();
    let (lo, hi) = (b.clone(), b.recip());
    let var_bounds = vec![(lo.clone(), hi.clone()); family.len()];
    let one = BigRational::one();
    let mut rows: Vec<SparseRow> = Vec::new();
    let mut bounds = Vec::new();
    // (1-c)·S_α ≤ d_α ≤ (1+c)·S_α with S_α = Σ p_H d(H)_α
    for (alpha, d) in dg.iter().enumerate() {
        for (factor, upper) in [(&one - c, true), (&one + c, false)] {
            let row: SparseRow = dh
                .iter()
                .enumerate()
                .filter(|(_, v)| !v[alpha].is_zero())
                .map(|(k, v)| (k, &factor * &v[alpha]))
                .collect();
            let (mut rmin, mut rmax) = (BigRational::zero(), BigRational::zero());
            for (_, a) in &row {
                let (x, y) = (a * &lo, a * &hi);
                if x <= y {
                    rmin += x;
                    rmax += y;
                } else {
                    rmin += y;
                    rmax += x;
                }
            }
            if upper {
                if rmin > *d {
                    return Ok(closed_forms(family, &dg, b, c, false));
                }
                bounds.push((rmin, d.clone()));
            } else {
                if rmax < *d {
                    return Ok(closed_forms(family, &dg, b, c, false));
                }
                bounds.push((d.clone(), rmax));
            }
            rows.push(row);
        }
    }
    let point = feasible_point(&rows, &bounds, &var_bounds)?;
    let balanced = point.is_some();
    let mut rep = closed_forms(family, &dg, b, c, balanced);
    rep.weights = point.map(|p| p.iter().map(|x| x.to_string()).collect());
    Ok(rep)
}

fn closed_forms(
    family: &[ColouredMultigraph],
    dg: &[BigRational],
    b: &BigRational,
    c: &BigRational,
    balanced: bool,
) -> BalanceReport {
    let mut rep =
        BalanceReport { balanced, weights: None, rainbow_cone: None, rainbow_sufficient: None, agreement: None };
    if is_rainbow_family(family) {
        let total: BigRational = dg.iter().sum();
        let third = &total / BigRational::from_integer(3.into());
        let d = BigRational::from_integer((dg.len() as i64).into());
        let cone = dg.iter().all(|x| *x <= third);
        let sufficient = dg.iter().all(|x| b * &d * &d < *x && *x < &third - b * &d * &d * &d);
        rep.rainbow_cone = Some(cone);
        rep.rainbow_sufficient = Some(sufficient);
        let exact = c.is_zero();
        rep.agreement = Some((!sufficient || balanced) && (!exact || cone || !balanced));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Hypergraph;
    use crate::gamma::fixtures::rainbow_family;
    use crate::lattice::rational::ratio;
    use crate::lattice::to_big;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn tridivisible(g: &ColouredMultigraph) -> bool {
        let support = g.support();
        g.total().is_multiple_of(3)
            && (0..g.vertex_count() as u32).all(|v| support.degree(&[v]).unwrap().is_multiple_of(2))
    }

    #[test]
    fn monochromatic_triangle_fails_at_root() {
        let g = ColouredMultigraph::monochromatic(&Hypergraph::complete(3, 2), 3, 0).unwrap();
        let rep = coloured_divisible(&g, &rainbow_family(3)).unwrap();
        assert!(!rep.verdict);
        let f = rep.failure_at(0).unwrap();
        assert_eq!(f.vector, to_big(&[3, 0, 0]));
        assert!(rep.failure_at(1).is_none());
        assert!(rep.failure_at(2).is_none());
    }

    #[test]
    fn odd_degree_fails_at_vertex_level() {
        let edges = vec![(vec![0, 1], 0), (vec![1, 2], 1), (vec![2, 3], 2)];
        let g = ColouredMultigraph::from_coloured_edges(4, 2, 4, edges).unwrap();
        let rep = coloured_divisible(&g, &rainbow_family(4)).unwrap();
        assert!(rep.failure_at(1).is_some());
    }

    #[test]
    fn rainbow_k7_is_divisible() {
        let mut edges = Vec::new();
        for (k, e) in Hypergraph::complete(7, 2).edges().iter().enumerate() {
            edges.push((e.clone(), k % 4));
        }
        let g = ColouredMultigraph::from_coloured_edges(7, 2, 4, edges).unwrap();
        assert!(tridivisible(&g));
        assert!(coloured_divisible(&g, &rainbow_family(4)).unwrap().verdict);
    }

    #[test]
    fn tridivisibility_equivalence_seeded() {
        let fam = rainbow_family(4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(3..=6u32);
            let mut edges = Vec::new();
            for e in Hypergraph::complete(n as usize, 2).edges() {
                if rng.gen_bool(0.5) {
                    edges.push((e.clone(), rng.gen_range(0..4)));
                }
            }
            let g = ColouredMultigraph::from_coloured_edges(n as usize, 2, 4, edges).unwrap();
            assert_eq!(coloured_divisible(&g, &fam).unwrap().verdict, tridivisible(&g));
        }
    }

    fn uniform_k(n: usize, d: usize) -> ColouredMultigraph {
        let edges =
            Hypergraph::complete(n, 2).edges().iter().enumerate().map(|(k, e)| (e.clone(), k % d)).collect::<Vec<_>>();
        ColouredMultigraph::from_coloured_edges(n, 2, d, edges).unwrap()
    }

    #[test]
    fn balance_examples() {
        let fam = rainbow_family(4);
        // K_9 has 36 edges: 9 per colour
        let g = uniform_k(9, 4);
        let rep = coloured_balanced(&g, &fam, &ratio(1, 100), &ratio(0, 1)).unwrap();
        assert!(rep.balanced);
        assert_eq!(rep.rainbow_cone, Some(true));
        assert_eq!(rep.agreement, Some(true));
        // one colour holds more than a third
        let edges = Hypergraph::complete(6, 2)
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| (e.clone(), if k < 10 { 0 } else { 1 + k % 3 }))
            .collect::<Vec<_>>();
        let heavy = ColouredMultigraph::from_coloured_edges(6, 2, 4, edges).unwrap();
        let rep = coloured_balanced(&heavy, &fam, &ratio(1, 100), &ratio(0, 1)).unwrap();
        assert!(!rep.balanced);
        assert_eq!(rep.rainbow_cone, Some(false));
        assert_eq!(rep.agreement, Some(true));
        // exactly one pattern
        let single =
            ColouredMultigraph::from_coloured_edges(3, 2, 3, vec![(vec![0, 1], 0), (vec![0, 2], 1), (vec![1, 2], 2)])
                .unwrap();
        let rep = coloured_balanced(&single, std::slice::from_ref(&single), &ratio(1, 1), &ratio(0, 1)).unwrap();
        assert!(rep.balanced);
        assert_eq!(rep.weights, Some(vec!["1".to_string()]));
        // K_9 has density 1, so 24 weights of at least 1/2 overshoot even with slack
        assert!(coloured_balanced(&g, &fam, &ratio(1, 30), &ratio(1, 2)).unwrap().balanced);
        assert!(!coloured_balanced(&g, &fam, &ratio(1, 2), &ratio(1, 2)).unwrap().balanced);
        assert!(coloured_balanced(&g, &fam, &ratio(0, 1), &ratio(0, 1)).is_err());
    }

    proptest! {
        #[test]
        fn rainbow_agreement_holds(colours in proptest::collection::vec(0usize..4, 15), b in 1i64..40) {
            let edges: Vec<_> = Hypergraph::complete(6, 2).edges().iter().cloned().zip(colours).collect();
            let g = ColouredMultigraph::from_coloured_edges(6, 2, 4, edges).unwrap();
            let rep = coloured_balanced(&g, &rainbow_family(4), &ratio(1, 40 * b), &ratio(0, 1)).unwrap();
            prop_assert_eq!(rep.agreement, Some(true));
        }
    }
}
