use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::combinatorics::util::{binomial_u64, k_subsets};
use crate::combinatorics::{Hypergraph, Partition};
use crate::error::{Error, Result};

/// A pattern with a vertex partition and a host with a matching partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartiteInstance {
    pub pattern: Hypergraph,
    pub pattern_partition: Partition,
    pub host: Hypergraph,
    pub host_partition: Partition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignKind {
    #[serde(rename = "STS")]
    Sts,
    #[serde(rename = "resolvable-STS")]
    ResolvableSts,
    #[serde(rename = "large-set")]
    LargeSet,
    #[serde(rename = "rainbow")]
    Rainbow,
    #[serde(rename = "cycle-decomposition")]
    CycleDecomposition,
}

/// Blocks plus optional classes (parallel classes or member systems) as block-index lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignCertificate {
    pub kind: DesignKind,
    pub blocks: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<Vec<usize>>>,
}

impl DesignCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn k4_apex(r: usize) -> (Hypergraph, Partition) {
    (Hypergraph::complete(4, r), Partition::new(vec![vec![0, 1, 2], vec![3]]).expect("fixed partition"))
}

/// `K_4` with parts `([3], {4})` and the host on `P'_1 ∪ P'_2`, `|P'_1| = n`, `|P'_2| = (n-1)/2`,
/// whose edges are the pairs not inside `P'_2`.
pub fn resolvable_sts_instance(n: usize) -> Result<PartiteInstance> {
    if n % 6 != 3 {
        return Err(Error::Invalid(format!("resolvable triple systems need n ≡ 3 mod 6, got {n}")));
    }
    let m = (n - 1) / 2;
    let p1: Vec<u32> = (0..n as u32).collect();
    let p2: Vec<u32> = (n as u32..(n + m) as u32).collect();
    let mut edges = k_subsets(&p1, 2);
    for &x in &p1 {
        for &y in &p2 {
            edges.push(vec![x, y]);
        }
    }
    let (pattern, pattern_partition) = k4_apex(2);
    Ok(PartiteInstance {
        pattern,
        pattern_partition,
        host: Hypergraph::new(n + m, 2, edges)?,
        host_partition: Partition::new(vec![p1, p2])?,
    })
}

/// The 3-graph `K_4` with parts `([3], {4})` and the host of all triples with at least two
/// vertices in `P'_1`, `|P'_1| = n`, `|P'_2| = n - 2`.
pub fn large_set_instance(n: usize) -> Result<PartiteInstance> {
    if n % 6 != 1 && n % 6 != 3 {
        return Err(Error::Invalid(format!("large sets need n ≡ 1 or 3 mod 6, got {n}")));
    }
    let p1: Vec<u32> = (0..n as u32).collect();
    let p2: Vec<u32> = (n as u32..(2 * n - 2) as u32).collect();
    let mut edges = k_subsets(&p1, 3);
    for pair in k_subsets(&p1, 2) {
        for &y in &p2 {
            edges.push(vec![pair[0], pair[1], y]);
        }
    }
    let (pattern, pattern_partition) = k4_apex(3);
    Ok(PartiteInstance {
        pattern,
        pattern_partition,
        host: Hypergraph::new(2 * n - 2, 3, edges)?,
        host_partition: Partition::new(vec![p1, p2])?,
    })
}

/// Groups partite copies `[φ(1), φ(2), φ(3), φ(4)]` by apex `φ(4)` into triple systems.
fn group_by_apex(n: usize, apexes: usize, copies: &[Vec<u32>]) -> Result<(Vec<Vec<u32>>, Vec<Vec<usize>>)> {
    let mut by_apex: BTreeMap<u32, Vec<Vec<u32>>> = BTreeMap::new();
    for c in copies {
        if c.len() != 4 || c[..3].iter().any(|&v| v as usize >= n) || !(n..n + apexes).contains(&(c[3] as usize)) {
            return Err(Error::Invalid(format!("copy {c:?} is not partite")));
        }
        let mut t = c[..3].to_vec();
        t.sort_unstable();
        by_apex.entry(c[3]).or_default().push(t);
    }
    if by_apex.len() != apexes {
        return Err(Error::Invalid(format!("expected {apexes} apex classes, found {}", by_apex.len())));
    }
    let mut blocks = Vec::new();
    let mut classes = Vec::new();
    for (_, mut ts) in by_apex {
        ts.sort();
        classes.push((blocks.len()..blocks.len() + ts.len()).collect());
        blocks.extend(ts);
    }
    Ok((blocks, classes))
}

/// Each apex `y` collects the triples `φ([3])` of its copies into parallel class `T_y`.
pub fn extract_resolvable(n: usize, copies: &[Vec<u32>]) -> Result<DesignCertificate> {
    let (blocks, classes) = group_by_apex(n, (n - 1) / 2, copies)?;
    let cert = DesignCertificate { kind: DesignKind::ResolvableSts, blocks, classes: Some(classes) };
    verify_design(&cert, n)?;
    Ok(cert)
}

/// Each apex `y` collects the triples `φ([3])` of its copies into triple system `T_y`.
pub fn extract_large_set(n: usize, copies: &[Vec<u32>]) -> Result<DesignCertificate> {
    let (blocks, classes) = group_by_apex(n, n - 2, copies)?;
    let cert = DesignCertificate { kind: DesignKind::LargeSet, blocks, classes: Some(classes) };
    verify_design(&cert, n)?;
    Ok(cert)
}

fn check_sts(n: usize, blocks: &[&Vec<u32>]) -> Result<()> {
    let mut pairs = HashSet::new();
    for b in blocks {
        let mut s = (*b).clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != 3 || s[2] as usize >= n {
            return Err(Error::Invalid(format!("block {b:?} is not a triple of points in 0..{n}")));
        }
        for p in k_subsets(&s, 2) {
            if !pairs.insert(p.clone()) {
                return Err(Error::Invalid(format!("pair {p:?} covered twice")));
            }
        }
    }
    if pairs.len() as u64 != binomial_u64(n as u64, 2) {
        return Err(Error::Invalid(format!("{} of {} pairs covered", pairs.len(), binomial_u64(n as u64, 2))));
    }
    Ok(())
}

fn check_classes(cert: &DesignCertificate, count: usize) -> Result<&Vec<Vec<usize>>> {
    let classes = cert.classes.as_ref().ok_or_else(|| Error::Invalid("classes missing".into()))?;
    if classes.len() != count {
        return Err(Error::Invalid(format!("expected {count} classes, got {}", classes.len())));
    }
    let mut seen = vec![false; cert.blocks.len()];
    for &k in classes.iter().flatten() {
        if k >= seen.len() || std::mem::replace(&mut seen[k], true) {
            return Err(Error::Invalid(format!("block index {k} missing or repeated across classes")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Invalid("some block belongs to no class".into()));
    }
    Ok(classes)
}

/// Kind-specific validity on the point set `0..n`, independent of any host.
pub fn verify_design(cert: &DesignCertificate, n: usize) -> Result<()> {
    match cert.kind {
        DesignKind::Sts => check_sts(n, &cert.blocks.iter().collect::<Vec<_>>()),
        DesignKind::ResolvableSts => {
            check_sts(n, &cert.blocks.iter().collect::<Vec<_>>())?;
            for (k, class) in check_classes(cert, (n - 1) / 2)?.iter().enumerate() {
                let mut pts: Vec<u32> = class.iter().flat_map(|&b| cert.blocks[b].iter().copied()).collect();
                pts.sort_unstable();
                if pts != (0..n as u32).collect::<Vec<_>>() {
                    return Err(Error::Invalid(format!("class {k} is not a perfect matching of the points")));
                }
            }
            Ok(())
        }
        DesignKind::LargeSet => {
            let classes = check_classes(cert, n.saturating_sub(2))?;
            for (k, class) in classes.iter().enumerate() {
                check_sts(n, &class.iter().map(|&b| &cert.blocks[b]).collect::<Vec<_>>())
                    .map_err(|e| Error::Invalid(format!("system {k}: {e}")))?;
            }
            let triples: HashSet<Vec<u32>> = cert
                .blocks
                .iter()
                .map(|b| {
                    let mut s = b.clone();
                    s.sort_unstable();
                    s
                })
                .collect();
            if triples.len() != cert.blocks.len() || triples.len() as u64 != binomial_u64(n as u64, 3) {
                return Err(Error::Invalid("systems are not pairwise disjoint or miss some triple".into()));
            }
            Ok(())
        }
        DesignKind::Rainbow => {
            let mut pairs = HashSet::new();
            for b in &cert.blocks {
                let mut s = b.clone();
                s.sort_unstable();
                s.dedup();
                if s.len() != 3 || s[2] as usize >= n {
                    return Err(Error::Invalid(format!("block {b:?} is not a triangle on 0..{n}")));
                }
                for p in k_subsets(&s, 2) {
                    if !pairs.insert(p.clone()) {
                        return Err(Error::Invalid(format!("edge {p:?} used twice")));
                    }
                }
            }
            Ok(())
        }
        DesignKind::CycleDecomposition => {
            for b in &cert.blocks {
                let s: HashSet<&u32> = b.iter().collect();
                if s.len() != b.len() || b.iter().any(|&v| v as usize >= n) {
                    return Err(Error::Invalid(format!("block {b:?} is not an injection into 0..{n}")));
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> Vec<Vec<u32>> {
        vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6], vec![1, 3, 5], vec![1, 4, 6], vec![2, 3, 6], vec![2, 4, 5]]
    }

    #[test]
    fn instance_sizes() {
        let r = resolvable_sts_instance(9).unwrap();
        assert_eq!(r.host.len(), 72);
        assert_eq!(r.host_partition.sizes(), vec![9, 4]);
        let t = resolvable_sts_instance(3).unwrap();
        assert_eq!(t.host.len(), 6);
        assert!(resolvable_sts_instance(7).is_err());
        let l = large_set_instance(9).unwrap();
        assert_eq!(l.host.len(), 84 + 252);
        assert_eq!(l.host_partition.sizes(), vec![9, 7]);
        assert!(large_set_instance(7).is_ok());
        assert!(large_set_instance(8).is_err());
    }

    #[test]
    fn sts_verifier() {
        let c = DesignCertificate { kind: DesignKind::Sts, blocks: fano(), classes: None };
        verify_design(&c, 7).unwrap();
        let mut bad = c.clone();
        bad.blocks[0] = vec![0, 1, 3];
        assert!(verify_design(&bad, 7).is_err());
        assert_eq!(DesignCertificate::from_json(&c.to_json()).unwrap(), c);
        assert!(c.to_json().starts_with(r#"{"kind":"STS","blocks":"#));
    }

    #[test]
    fn trivial_resolvable_extraction() {
        let cert = extract_resolvable(3, &[vec![2, 0, 1, 3]]).unwrap();
        assert_eq!(cert.blocks, vec![vec![0, 1, 2]]);
        assert_eq!(cert.classes, Some(vec![vec![0]]));
        assert!(extract_resolvable(3, &[vec![0, 1, 3, 2]]).is_err());
    }

    /// Affine plane AG(2,3): four parallel classes of lines.
    fn ag23() -> Vec<Vec<Vec<u32>>> {
        let p = |x: u32, y: u32| x * 3 + y;
        let mut classes = Vec::new();
        for (a, b) in [(0u32, 1u32), (1, 0), (1, 1), (1, 2)] {
            let mut lines: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
            for x in 0..3 {
                for y in 0..3 {
                    let key = if a == 0 { x } else { (y + 3 - (b * x) % 3) % 3 };
                    lines.entry(key).or_default().push(p(x, y));
                }
            }
            classes.push(lines.into_values().collect());
        }
        classes
    }

    #[test]
    fn resolvable_nine_round_trip() {
        let copies: Vec<Vec<u32>> = ag23()
            .into_iter()
            .enumerate()
            .flat_map(|(k, class)| {
                class.into_iter().map(move |mut t| {
                    t.push(9 + k as u32);
                    t
                })
            })
            .collect();
        let cert = extract_resolvable(9, &copies).unwrap();
        assert_eq!(cert.blocks.len(), 12);
        let mut reordered = cert.clone();
        reordered.classes.as_mut().unwrap().swap(0, 1);
        verify_design(&reordered, 9).unwrap();
        let mut wrong = cert.clone();
        let cls = wrong.classes.as_mut().unwrap();
        let moved = cls[0].pop().unwrap();
        cls[1].push(moved);
        assert!(verify_design(&wrong, 9).is_err());
    }

    #[test]
    fn synthetic_large_set_is_rejected_when_not_disjoint() {
        let f: Vec<_> = fano();
        let copies: Vec<Vec<u32>> =
            (0..5u32).flat_map(|y| f.iter().map(move |t| vec![t[0], t[1], t[2], 7 + y])).collect();
        assert!(extract_large_set(7, &copies).is_err());
    }
}
