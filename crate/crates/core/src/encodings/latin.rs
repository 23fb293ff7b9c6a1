use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Latin square of order `n` over symbols `0..n`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatinDoc", into = "LatinDoc")]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct LatinDoc {
    rows: Vec<Vec<u32>>,
}

impl TryFrom<LatinDoc> for LatinSquare {
    type Error = Error;
    fn try_from(d: LatinDoc) -> Result<Self> {
        LatinSquare::from_rows(d.rows)
    }
}

impl From<LatinSquare> for LatinDoc {
    fn from(l: LatinSquare) -> Self {
        LatinDoc { rows: l.rows() }
    }
}

pub(crate) fn check_latin(n: usize, cells: &[u32]) -> Result<()> {
    if cells.len() != n * n {
        return Err(Error::Invalid(format!("expected {} cells, got {}", n * n, cells.len())));
    }
    if let Some(&s) = cells.iter().find(|&&s| s as usize >= n) {
        return Err(Error::Invalid(format!("symbol {s} outside 0..{n}")));
    }
    for i in 0..n {
        let mut row = vec![false; n];
        let mut col = vec![false; n];
        for j in 0..n {
            let a = cells[i * n + j] as usize;
            if std::mem::replace(&mut row[a], true) {
                return Err(Error::Invalid(format!("symbol {a} repeated in row {i}")));
            }
            let b = cells[j * n + i] as usize;
            if std::mem::replace(&mut col[b], true) {
                return Err(Error::Invalid(format!("symbol {b} repeated in column {i}")));
            }
        }
    }
    Ok(())
}

pub(crate) fn parse_grid(text: &str) -> Result<Vec<Vec<u32>>> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .enumerate()
            .map(|(c, t)| {
                t.parse::<u32>()
                    .map_err(|_| Error::Invalid(format!("line {}, column {}: bad symbol {t:?}", k + 1, c + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub(crate) fn grid_text(n: usize, cells: &[u32]) -> String {
    let mut s = String::new();
    for row in cells.chunks(n.max(1)) {
        s.push_str(&row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
        s.push('\n');
    }
    s
}

impl LatinSquare {
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Invalid(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        let cells: Vec<u32> = rows.into_iter().flatten().collect();
        check_latin(n, &cells)?;
        Ok(LatinSquare { n, cells })
    }

    /// The cyclic square `L(i,j) = i + j mod n`.
    pub fn cyclic(n: usize) -> Self {
        let cells = (0..n).flat_map(|i| (0..n).map(move |j| ((i + j) % n) as u32)).collect();
        LatinSquare { n, cells }
    }

    /// A random isotope of the cyclic square (rows, columns and symbols permuted).
    pub fn random_isotope(n: usize, rng: &mut impl Rng) -> Self {
        let mut perms: Vec<Vec<u32>> = (0..3).map(|_| (0..n as u32).collect()).collect();
        for p in perms.iter_mut() {
            p.shuffle(rng);
        }
        let mut cells = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                cells[perms[0][i] as usize * n + perms[1][j] as usize] = perms[2][(i + j) % n];
            }
        }
        LatinSquare { n, cells }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_rows(parse_grid(text)?)
    }

    pub fn to_text(&self) -> String {
        grid_text(self.n, &self.cells)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.cells[row * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.cells.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_orthogonal_to(&self, other: &LatinSquare) -> bool {
        let pairs: HashSet<(u32, u32)> = self.cells.iter().copied().zip(other.cells.iter().copied()).collect();
        self.n == other.n && pairs.len() == self.n * self.n
    }
}

/// Cell `(i, j)` with symbol `s` becomes the triangle `{i, n+j, 2n+s}` of `K_3(n)`.
pub fn latin_encode(l: &LatinSquare) -> Vec<Vec<u32>> {
    let n = l.n as u32;
    let mut out = Vec::with_capacity(l.n * l.n);
    for i in 0..n {
        for j in 0..n {
            out.push(vec![i, n + j, 2 * n + l.get(i as usize, j as usize)]);
        }
    }
    out
}

fn partite_blocks(n: usize, parts: usize, blocks: &[Vec<u32>]) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::with_capacity(blocks.len());
    for b in blocks {
        let mut s = b.clone();
        s.sort_unstable();
        if s.len() != parts || s.iter().enumerate().any(|(k, &v)| v as usize / n != k || v as usize >= parts * n) {
            return Err(Error::Invalid(format!("block {b:?} does not meet each of the {parts} parts once")));
        }
        out.push(s.iter().enumerate().map(|(k, &v)| v - (k * n) as u32).collect());
    }
    Ok(out)
}

/// Inverse of [`latin_encode`]: the triangles must decompose `K_3(n)`.
pub fn latin_decode(n: usize, triangles: &[Vec<u32>]) -> Result<LatinSquare> {
    let local = partite_blocks(n, 3, triangles)?;
    if local.len() != n * n {
        return Err(Error::Invalid(format!("expected {} triangles, got {}", n * n, local.len())));
    }
    let mut cells = vec![u32::MAX; n * n];
    for t in &local {
        let slot = &mut cells[t[0] as usize * n + t[1] as usize];
        if *slot != u32::MAX {
            return Err(Error::Invalid(format!("cell ({}, {}) covered twice", t[0], t[1])));
        }
        *slot = t[2];
    }
    check_latin(n, &cells)?;
    Ok(LatinSquare { n, cells })
}

/// A pair of orthogonal squares becomes the `K_4`-decomposition of `K_4(n)` with copies
/// `{i, n+j, 2n+A(i,j), 3n+B(i,j)}`.
pub fn mols_encode(a: &LatinSquare, b: &LatinSquare) -> Result<Vec<Vec<u32>>> {
    if !a.is_orthogonal_to(b) {
        return Err(Error::Invalid("squares are not orthogonal".into()));
    }
    let n = a.n as u32;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            out.push(vec![i, n + j, 2 * n + a.get(i as usize, j as usize), 3 * n + b.get(i as usize, j as usize)]);
        }
    }
    Ok(out)
}

pub fn mols_decode(n: usize, copies: &[Vec<u32>]) -> Result<(LatinSquare, LatinSquare)> {
    let local = partite_blocks(n, 4, copies)?;
    if local.len() != n * n {
        return Err(Error::Invalid(format!("expected {} copies, got {}", n * n, local.len())));
    }
    let mut a = vec![u32::MAX; n * n];
    let mut b = vec![u32::MAX; n * n];
    for t in &local {
        let k = t[0] as usize * n + t[1] as usize;
        if a[k] != u32::MAX {
            return Err(Error::Invalid(format!("cell ({}, {}) covered twice", t[0], t[1])));
        }
        a[k] = t[2];
        b[k] = t[3];
    }
    check_latin(n, &a)?;
    check_latin(n, &b)?;
    let (a, b) = (LatinSquare { n, cells: a }, LatinSquare { n, cells: b });
    if !a.is_orthogonal_to(&b) {
        return Err(Error::Invalid("decoded squares are not orthogonal".into()));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn small_cases() {
        let one = LatinSquare::cyclic(1);
        assert_eq!(latin_encode(&one), vec![vec![0, 1, 2]]);
        let four = LatinSquare::cyclic(4);
        let t = latin_encode(&four);
        assert_eq!(t.len(), 16);
        assert_eq!(latin_decode(4, &t).unwrap(), four);
        assert!(LatinSquare::from_rows(vec![vec![0, 0], vec![1, 1]]).is_err());
        let mut bad = t.clone();
        bad[0] = vec![0, 4, 9];
        assert!(latin_decode(4, &bad).is_err());
        assert!(latin_decode(4, &t[1..]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let l = LatinSquare::cyclic(3);
        assert_eq!(l.to_text(), "0 1 2\n1 2 0\n2 0 1\n");
        assert_eq!(LatinSquare::from_text(&l.to_text()).unwrap(), l);
        let err = LatinSquare::from_text("0 x\n1 0\n").unwrap_err().to_string();
        assert!(err.contains("line 1, column 2"));
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(serde_json::from_str::<LatinSquare>(&json).unwrap(), l);
    }

    #[test]
    fn orthogonal_pair_of_order_three() {
        let a = LatinSquare::cyclic(3);
        let b = LatinSquare::from_rows(vec![vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0]]).unwrap();
        let copies = mols_encode(&a, &b).unwrap();
        assert_eq!(mols_decode(3, &copies).unwrap(), (a.clone(), b));
        assert!(mols_encode(&a, &a).is_err());
    }

    proptest! {
        #[test]
        fn encode_decode_bijection(n in 1usize..8, seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let l = LatinSquare::random_isotope(n, &mut rng);
            let t = latin_encode(&l);
            prop_assert_eq!(latin_decode(n, &t).unwrap(), l.clone());
            prop_assert_eq!(latin_encode(&latin_decode(n, &t).unwrap()), t);
        }
    }
}
