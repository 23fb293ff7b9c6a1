//! Seeded properties across the solver, the matching process and the lattice framework.

use std::time::Duration;

use proptest::prelude::*;

use decomp_lab::combinatorics::{Digraph, Hypergraph};
use decomp_lab::complex::LabelledComplex;
use decomp_lab::divisibility::{digraph_divisible, h_divisible};
use decomp_lab::encodings::{tight_cycle, triangle};
use decomp_lab::gamma::{EdgeVector, GammaSystem, LgammaChecker, MembershipOptions};
use decomp_lab::nibble::{random_greedy, AuxiliaryMatchingInstance, StopReason, StopRule};
use decomp_lab::solver::{
    count_decompositions, find_decomposition, verify_certificate, Family, Host, Outcome, SolveConfig, DEFAULT_BUDGET,
};

fn cfg() -> SolveConfig {
    SolveConfig { budget: DEFAULT_BUDGET, timeout: Some(Duration::from_secs(20)) }
}

fn subgraph(n: usize, mask: u32) -> Hypergraph {
    let edges = Hypergraph::complete(n, 2)
        .edges()
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, e)| e.clone())
        .collect::<Vec<_>>();
    Hypergraph::new(n, 2, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_is_deterministic_sound_and_count_consistent(n in 3usize..=7, mask in any::<u32>()) {
        let host = Host::Hypergraph(subgraph(n, mask));
        let fam = Family::Hypergraph(vec![triangle()]);
        let a = find_decomposition(&host, &fam, None, &cfg()).unwrap();
        let b = find_decomposition(&host, &fam, None, &cfg()).unwrap();
        prop_assert_eq!(&a.outcome, &b.outcome);
        let count = count_decompositions(&host, &fam, None, &cfg()).unwrap();
        match &a.outcome {
            Outcome::Found(cert) => {
                prop_assert!(count >= 1u32.into());
                prop_assert!(verify_certificate(&host, &fam, None, cert).valid);
                let Host::Hypergraph(g) = &host else { unreachable!() };
                prop_assert!(h_divisible(g, &triangle()).unwrap().verdict);
            }
            Outcome::ProvenNone => prop_assert_eq!(count, 0u32.into()),
            Outcome::Timeout => prop_assert!(false, "timeout at desk scale"),
        }
    }

    #[test]
    fn directed_success_implies_divisibility(mask in 0u32..1 << 12) {
        let arcs = Digraph::complete(4, 2).arcs().to_vec();
        let g = Digraph::new(4, 2, (0..12).filter(|b| mask >> b & 1 == 1).map(|b| arcs[b].clone())).unwrap();
        let h = tight_cycle(3, 2).unwrap();
        let host = Host::Digraph(g.clone());
        let fam = Family::Digraph(vec![h.clone()]);
        if let Outcome::Found(cert) = find_decomposition(&host, &fam, None, &cfg()).unwrap().outcome {
            prop_assert!(verify_certificate(&host, &fam, None, &cert).valid);
            prop_assert!(digraph_divisible(&g, &h).unwrap().verdict);
        }
    }

    #[test]
    fn matching_is_reproducible_disjoint_and_maximal(
        vertices in 3usize..40,
        raw in prop::collection::vec(prop::collection::btree_set(0u32..40, 3), 1..60),
        seed in any::<u64>(),
    ) {
        let edges: Vec<Vec<u32>> = raw
            .into_iter()
            .map(|s| s.into_iter().map(|v| v % vertices as u32).collect::<std::collections::BTreeSet<_>>())
            .filter(|e| e.len() == 3)
            .map(|e| e.into_iter().collect())
            .collect();
        prop_assume!(!edges.is_empty());
        let a = AuxiliaryMatchingInstance::from_edges(vertices, edges).unwrap();
        let full = StopRule { density: None, steps: None };
        let (m, t) = random_greedy(&a, full, seed);
        prop_assert_eq!(random_greedy(&a, full, seed), (m.clone(), t.clone()));
        let mut covered = vec![false; vertices];
        for &e in &m {
            for &v in &a.edges[e] {
                prop_assert!(!covered[v as usize]);
                covered[v as usize] = true;
            }
        }
        prop_assert_eq!(t.stop, StopReason::Exhausted);
        prop_assert!(a.edges.iter().all(|e| e.iter().any(|&v| covered[v as usize])));
        for s in &t.steps {
            prop_assert_eq!(s.covered, (s.step + 1) * 3);
            prop_assert!(s.covered <= vertices);
        }
    }

    #[test]
    fn integer_combinations_of_molecules_are_members(coeffs in prop::collection::vec(-3i64..=3, 60)) {
        let g = GammaSystem::digraph(&tight_cycle(3, 2).unwrap()).unwrap();
        let phi = LabelledComplex::complete(3, 5).unwrap();
        let mut checker = LgammaChecker::new(&g, &phi, MembershipOptions { witnesses: false, ..Default::default() }).unwrap();
        let mut sum = EdgeVector::new(1);
        for (e, &k) in phi.level(3).iter().zip(&coeffs) {
            sum.add_vector(&g.molecule(0, e).unwrap(), k).unwrap();
        }
        prop_assert!(checker.check(&sum).unwrap().member);
    }
}
