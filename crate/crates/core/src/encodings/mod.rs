//! Design equivalences and pattern constructors.
//!
//! Partite hosts lay their parts out as consecutive vertex ranges: for `K_3(n)` rows are
//! `0..n`, columns `n..2n` and symbols `2n..3n`; blowups place class `x` at `x*n..(x+1)*n`.

mod designs;
mod latin;
mod sudoku;

pub use designs::{
    extract_large_set, extract_resolvable, large_set_instance, resolvable_sts_instance, verify_design,
    DesignCertificate, DesignKind, PartiteInstance,
};
pub use latin::{latin_decode, latin_encode, mols_decode, mols_encode, LatinSquare};
pub use sudoku::{sudoku_decode, sudoku_encode, sudoku_host, sudoku_pattern, SudokuGrid};

use crate::combinatorics::util::{injections, k_subsets};
use crate::combinatorics::{ColouredMultigraph, Digraph, Hypergraph};
use crate::complex::LabelledEdge;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftMode {
    /// `e` is a set; every injection `π: e -> [q]` gives the labelled edge `π^{-1}`.
    Unordered,
    /// `e` is an arc; every order-preserving `π: [r] -> [q]` gives `π(j) ↦ e(j)`.
    Ordered,
}

/// The labelled edges over `[q]` that represent `e`.
pub fn lift_edge(e: &[u32], q: usize, mode: LiftMode) -> Result<Vec<LabelledEdge>> {
    let r = e.len();
    if r > q {
        return Err(Error::Invalid(format!("edge of size {r} cannot be lifted to {q} labels")));
    }
    let mut out = Vec::new();
    match mode {
        LiftMode::Unordered => {
            for labels in injections(r, q) {
                out.push(LabelledEdge::new(labels.into_iter().zip(e.iter().copied()))?);
            }
        }
        LiftMode::Ordered => {
            let all: Vec<u32> = (0..q as u32).collect();
            for labels in k_subsets(&all, r) {
                out.push(LabelledEdge::new(labels.into_iter().zip(e.iter().copied()))?);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Disjoint union of the lifts of every edge (or arc) of a host.
pub fn lift_all<'a>(
    edges: impl IntoIterator<Item = &'a Vec<u32>>,
    q: usize,
    mode: LiftMode,
) -> Result<Vec<LabelledEdge>> {
    let mut out = Vec::new();
    for e in edges {
        out.extend(lift_edge(e, q, mode)?);
    }
    out.sort();
    Ok(out)
}

/// The tight cycle `⟳^r_q` with arcs `φ_j(i) = i + j mod q`.
pub fn tight_cycle(q: usize, r: usize) -> Result<Digraph> {
    if q <= r || r < 1 {
        return Err(Error::Invalid(format!("tight cycle needs q > r ≥ 1, got q={q}, r={r}")));
    }
    let arcs = (0..q as u32).map(|j| (0..r as u32).map(|i| (i + j) % q as u32).collect::<Vec<_>>());
    Digraph::new(q, r, arcs)
}

/// Every `[D]`-edge-coloured rainbow triangle on `{0,1,2}`, `(D)_3` patterns in lexicographic
/// order of the colours of `01, 02, 12`.
pub fn rainbow_family(d: usize) -> Result<Vec<ColouredMultigraph>> {
    if d < 3 {
        return Err(Error::Invalid(format!("rainbow triangles need at least 3 colours, got {d}")));
    }
    let mut out = Vec::new();
    for cols in injections(3, d) {
        let edges =
            vec![(vec![0, 1], cols[0] as usize), (vec![0, 2], cols[1] as usize), (vec![1, 2], cols[2] as usize)];
        out.push(ColouredMultigraph::from_coloured_edges(3, 2, d, edges)?);
    }
    Ok(out)
}

/// The triangle `K^2_3`.
pub fn triangle() -> Hypergraph {
    Hypergraph::complete(3, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::util::{binomial_u64, falling};

    #[test]
    fn lift_sizes() {
        assert_eq!(lift_edge(&[4, 7], 3, LiftMode::Unordered).unwrap().len(), 6);
        assert_eq!(lift_edge(&[4, 7], 3, LiftMode::Ordered).unwrap().len(), 3);
        assert_eq!(lift_edge(&[1, 0, 2], 3, LiftMode::Ordered).unwrap().len(), 1);
        assert!(lift_edge(&[0, 1, 2], 2, LiftMode::Unordered).is_err());
        for q in 1..=6usize {
            for r in 1..=q {
                let e: Vec<u32> = (10..10 + r as u32).collect();
                let u = lift_edge(&e, q, LiftMode::Unordered).unwrap();
                assert_eq!(num_bigint::BigUint::from(u.len()), falling(q as u64, r as u64));
                assert_eq!(lift_edge(&e, q, LiftMode::Ordered).unwrap().len() as u64, binomial_u64(q as u64, r as u64));
                assert!(u.iter().all(|l| l.image() == e));
            }
        }
        let ordered = lift_edge(&[5, 2], 3, LiftMode::Ordered).unwrap();
        assert!(ordered.contains(&LabelledEdge::new([(0, 5), (2, 2)]).unwrap()));
    }

    #[test]
    fn cycles_and_rainbows() {
        let c = tight_cycle(3, 2).unwrap();
        assert_eq!(c.arcs(), &[vec![0, 1], vec![1, 2], vec![2, 0]]);
        let c4 = tight_cycle(4, 2).unwrap();
        assert_eq!(c4.len(), 4);
        for q in 3..8 {
            for r in 2..q {
                let t = tight_cycle(q, r).unwrap();
                assert_eq!(t.len(), q);
                assert!(t.is_simple());
            }
        }
        assert!(tight_cycle(2, 2).is_err());
        let fam = rainbow_family(4).unwrap();
        assert_eq!(fam.len(), 24);
        for h in rainbow_family(3).unwrap() {
            assert_eq!(h.colour_totals(), vec![1, 1, 1]);
        }
        assert!(rainbow_family(2).is_err());
    }
}
