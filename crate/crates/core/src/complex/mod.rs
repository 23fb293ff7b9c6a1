//! Labelled complexes: restriction-closed sets of injections from label sets
//! `B ⊆ [q]` into a vertex set, with permutation groups acting on labels,
//! orbits, extensions and typicality checks.

pub mod edge;
pub mod extension;
pub mod group;
pub mod labelled;
pub mod typical;

pub use edge::LabelledEdge;
pub use extension::{CountMode, CountResult, ExtendabilityReport, Extension, RestrictionTarget, TemplateLibrary};
pub use group::{Perm, PermGroup};
pub use labelled::{ComplexParts, LabelledComplex, Orbit};
pub use typical::{TypicalityMode, TypicalityReport};

#[cfg(test)]
mod props {
    use std::collections::{BTreeMap, BTreeSet};

    use super::extension::{extension_count, CountMode};
    use super::*;
    use crate::combinatorics::Partition;
    use proptest::prelude::*;

    fn arb_complex() -> impl Strategy<Value = LabelledComplex> {
        (2usize..4, 3usize..6).prop_flat_map(|(q, n)| {
            let full = LabelledComplex::complete(q, n).unwrap().level(q);
            let m = full.len();
            proptest::collection::vec(any::<bool>(), m).prop_map(move |keep| {
                let edges = full.iter().zip(&keep).filter(|(_, &k)| k).map(|(e, _)| e.clone());
                LabelledComplex::from_maximal(q, n, edges).unwrap()
            })
        })
    }

    fn groups(q: usize) -> Vec<PermGroup> {
        let mut out = vec![PermGroup::trivial(q), PermGroup::symmetric(q).unwrap()];
        let p = Partition::new(vec![(0..q as u32 - 1).collect(), vec![q as u32 - 1]]).unwrap();
        out.push(PermGroup::part_stabilizer(&p).unwrap());
        out
    }

    proptest! {
        #[test]
        fn closure_constructors_are_restriction_closed(c in arb_complex()) {
            prop_assert!(c.is_restriction_closed());
            let back = LabelledComplex::from_json(&c.to_json()).unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn orbits_partition_levels(c in arb_complex(), k in 0usize..4) {
            let q = c.label_count();
            for g in groups(q) {
                let orbits = c.orbits(k.min(q), &g);
                let total: usize = orbits.iter().map(|o| o.members.len()).sum();
                prop_assert_eq!(total, c.level(k.min(q)).len());
                for o in &orbits {
                    let rep = &o.representative;
                    prop_assert_eq!(&rep.canonical(&g), rep);
                    for s in g.elements() {
                        let moved = rep.compose_perm(s);
                        prop_assert_eq!(&moved.canonical(&g), rep);
                    }
                }
            }
        }

        #[test]
        fn complete_counts_are_falling_factorials(n in 3usize..8, new in 1usize..3) {
            let phi = LabelledComplex::complete(2, n).unwrap();
            let verts: Vec<(u32, u32)> =
                std::iter::once((0, 0)).chain((0..new as u32).map(|x| (1, x))).collect();
            let mut template = BTreeSet::new();
            for &v in &verts {
                template.insert(vec![v]);
                if v.0 == 1 {
                    template.insert(vec![(0, 0), v]);
                }
            }
            template.insert(Vec::new());
            let roots: BTreeMap<(u32, u32), u32> = [((0, 0), 0)].into();
            let e = Extension::new(2, 2, template, roots, Vec::new()).unwrap();
            let got = extension_count(&phi, &e, &[], CountMode::Exact { limit: 4 }).unwrap();
            let expect: u128 = (0..new as u128).map(|j| (n as u128 - 1) - j).product();
            prop_assert_eq!(got.exact, Some(expect));
        }
    }
}
