use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::latin::{check_latin, grid_text, parse_grid};
use crate::combinatorics::{Hypergraph, Partition};
use crate::error::{Error, Result};

/// A generalised Sudoku square: order `n²`, boxes of size `n × n`, symbols `0..n²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SudokuDoc", into = "SudokuDoc")]
pub struct SudokuGrid {
    n: usize,
    cells: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SudokuDoc {
    box_order: usize,
    rows: Vec<Vec<u32>>,
}

impl TryFrom<SudokuDoc> for SudokuGrid {
    type Error = Error;
    fn try_from(d: SudokuDoc) -> Result<Self> {
        let g = SudokuGrid::from_rows(d.rows)?;
        if g.n != d.box_order {
            return Err(Error::Invalid(format!(
                "box order {} does not match a grid of side {}",
                d.box_order,
                g.n * g.n
            )));
        }
        Ok(g)
    }
}

impl From<SudokuGrid> for SudokuDoc {
    fn from(g: SudokuGrid) -> Self {
        SudokuDoc { box_order: g.n, rows: g.rows() }
    }
}

fn isqrt(m: usize) -> Option<usize> {
    let n = (m as f64).sqrt().round() as usize;
    (n * n == m).then_some(n)
}

fn check_boxes(n: usize, cells: &[u32]) -> Result<()> {
    let side = n * n;
    for a in 0..n {
        for b in 0..n {
            let mut seen = vec![false; side];
            for i in 0..n {
                for j in 0..n {
                    let s = cells[(a * n + i) * side + b * n + j] as usize;
                    if std::mem::replace(&mut seen[s], true) {
                        return Err(Error::Invalid(format!("symbol {s} repeated in box ({a}, {b})")));
                    }
                }
            }
        }
    }
    Ok(())
}

impl SudokuGrid {
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let side = rows.len();
        let n = isqrt(side).ok_or_else(|| Error::Invalid(format!("grid side {side} is not a perfect square")))?;
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != side) {
            return Err(Error::Invalid(format!("row {i} has {} entries, expected {side}", r.len())));
        }
        let cells: Vec<u32> = rows.into_iter().flatten().collect();
        check_latin(side, &cells)?;
        check_boxes(n, &cells)?;
        Ok(SudokuGrid { n, cells })
    }

    /// The standard pattern `(n·(r mod n) + ⌊r/n⌋ + c) mod n²`.
    pub fn pattern(n: usize) -> Self {
        let side = n * n;
        let mut cells = Vec::with_capacity(side * side);
        for r in 0..side {
            for c in 0..side {
                cells.push(((n * (r % n) + r / n + c) % side) as u32);
            }
        }
        SudokuGrid { n, cells }
    }

    /// The pattern with symbols, bands, stacks and lines within them shuffled.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let side = n * n;
        let base = Self::pattern(n);
        let order = |rng: &mut _| -> Vec<usize> {
            let mut bands: Vec<usize> = (0..n).collect();
            bands.shuffle(rng);
            let mut out = Vec::with_capacity(side);
            for b in bands {
                let mut inner: Vec<usize> = (0..n).collect();
                inner.shuffle(rng);
                out.extend(inner.into_iter().map(|i| b * n + i));
            }
            out
        };
        let rows = order(rng);
        let cols = order(rng);
        let mut sym: Vec<u32> = (0..side as u32).collect();
        sym.shuffle(rng);
        let mut cells = vec![0; side * side];
        for (r, &rr) in rows.iter().enumerate() {
            for (c, &cc) in cols.iter().enumerate() {
                cells[r * side + c] = sym[base.cells[rr * side + cc] as usize];
            }
        }
        SudokuGrid { n, cells }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_rows(parse_grid(text)?)
    }

    pub fn to_text(&self) -> String {
        grid_text(self.n * self.n, &self.cells)
    }

    pub fn box_order(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.cells[row * self.n * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.cells.chunks(self.n * self.n).map(|r| r.to_vec()).collect()
    }
}

/// The 4-graph on `x1 x2 y1 y2 z1 z2` (vertices `0..6`) with edges
/// `x1x2y1y2, x1x2z1z2, y1y2z1z2, x1y1z1z2`.
pub fn sudoku_pattern() -> Hypergraph {
    Hypergraph::new(6, 4, vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5], vec![2, 3, 4, 5], vec![0, 2, 4, 5]])
        .expect("fixed pattern")
}

/// The complete `n`-blowup `H(n)` of [`sudoku_pattern`] with its class partition.
pub fn sudoku_host(n: usize) -> Result<(Hypergraph, Partition)> {
    sudoku_pattern().uniform_blowup(n)
}

/// Cell at row `a1·n + a2`, column `b1·n + b2` with symbol `c1·n + c2` becomes the copy
/// `[a1, n+a2, 2n+b1, 3n+b2, 4n+c1, 5n+c2]` (listed in pattern-vertex order).
pub fn sudoku_encode(s: &SudokuGrid) -> Vec<Vec<u32>> {
    let n = s.n as u32;
    let side = s.n * s.n;
    let mut out = Vec::with_capacity(side * side);
    for r in 0..side as u32 {
        for c in 0..side as u32 {
            let v = s.get(r as usize, c as usize);
            out.push(vec![r / n, n + r % n, 2 * n + c / n, 3 * n + c % n, 4 * n + v / n, 5 * n + v % n]);
        }
    }
    out
}

/// Inverse of [`sudoku_encode`]: the copies must form an `H`-decomposition of `H(n)`.
pub fn sudoku_decode(n: usize, copies: &[Vec<u32>]) -> Result<SudokuGrid> {
    let side = n * n;
    if copies.len() != side * side {
        return Err(Error::Invalid(format!("expected {} copies, got {}", side * side, copies.len())));
    }
    let pattern = sudoku_pattern();
    let mut covered: HashSet<Vec<u32>> = HashSet::new();
    let mut cells = vec![u32::MAX; side * side];
    for copy in copies {
        if copy.len() != 6 || copy.iter().enumerate().any(|(k, &v)| v as usize / n != k || v as usize >= 6 * n) {
            return Err(Error::Invalid(format!("copy {copy:?} does not map pattern vertex x into class x")));
        }
        for e in pattern.edges() {
            let mut img: Vec<u32> = e.iter().map(|&x| copy[x as usize]).collect();
            img.sort_unstable();
            if !covered.insert(img.clone()) {
                return Err(Error::Invalid(format!("host edge {img:?} covered twice")));
            }
        }
        let l: Vec<usize> = copy.iter().enumerate().map(|(k, &v)| v as usize - k * n).collect();
        cells[(l[0] * n + l[1]) * side + l[2] * n + l[3]] = (l[4] * n + l[5]) as u32;
    }
    let cells_rows: Vec<Vec<u32>> = cells.chunks(side).map(|r| r.to_vec()).collect();
    SudokuGrid::from_rows(cells_rows)
}
