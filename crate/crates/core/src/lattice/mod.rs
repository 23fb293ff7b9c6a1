//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! [`hermite_normal_form`] computes the row-style Hermite normal form together
//! with a unimodular transform. [`LatticeBasis`] maintains an echelon basis of a
//! row lattice incrementally and answers membership queries with integer
//! witnesses; [`span_membership`] is the one-shot form used by every checker.

pub mod integral;
pub mod rational;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of big integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc", into = "MatrixDoc")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl TryFrom<MatrixDoc> for IntMatrix {
    type Error = Error;
    fn try_from(doc: MatrixDoc) -> Result<Self> {
        if doc.entries.len() != doc.rows {
            return Err(Error::DimensionMismatch { expected: doc.rows, got: doc.entries.len() });
        }
        let mut data = Vec::with_capacity(doc.rows * doc.cols);
        for row in &doc.entries {
            if row.len() != doc.cols {
                return Err(Error::DimensionMismatch { expected: doc.cols, got: row.len() });
            }
            for s in row {
                data.push(s.parse::<BigInt>().map_err(|e| Error::Invalid(format!("bad integer {s:?}: {e}")))?);
            }
        }
        Ok(IntMatrix { rows: doc.rows, cols: doc.cols, data })
    }
}

impl From<IntMatrix> for MatrixDoc {
    fn from(m: IntMatrix) -> Self {
        let entries = (0..m.rows).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect();
        MatrixDoc { rows: m.rows, cols: m.cols, entries }
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds from rows; every row must have length `cols`.
    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    fn swap_combine(&mut self, p: usize, i: usize, coeffs: &[BigInt; 4]) {
        // row_p <- c0*row_p + c1*row_i ; row_i <- c2*row_p + c3*row_i
        for j in 0..self.cols {
            let a = self.data[p * self.cols + j].clone();
            let b = self.data[i * self.cols + j].clone();
            if a.is_zero() && b.is_zero() {
                continue;
            }
            self.data[p * self.cols + j] = &coeffs[0] * &a + &coeffs[1] * &b;
            self.data[i * self.cols + j] = &coeffs[2] * &a + &coeffs[3] * &b;
        }
    }

    fn add_multiple(&mut self, target: usize, source: usize, q: &BigInt) {
        for j in 0..self.cols {
            let s = self.data[source * self.cols + j].clone();
            if !s.is_zero() {
                self.data[target * self.cols + j] -= q * s;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U * M = H`, `U` unimodular,
/// pivots positive and strictly moving right, entries above each pivot reduced
/// into `[0, pivot)`, zero rows last.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pr = 0;
    for col in 0..m.cols {
        if pr == m.rows {
            break;
        }
        for i in pr + 1..m.rows {
            let b = h.get(i, col).clone();
            if b.is_zero() {
                continue;
            }
            let a = h.get(pr, col).clone();
            let (g, s, t) = ext_gcd(&a, &b);
            let coeffs = [s, t, -(&b / &g), &a / &g];
            h.swap_combine(pr, i, &coeffs);
            u.swap_combine(pr, i, &coeffs);
        }
        if h.get(pr, col).is_zero() {
            continue;
        }
        if h.get(pr, col).is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        let p = h.get(pr, col).clone();
        for i in 0..pr {
            let q = h.get(i, col).div_floor(&p);
            if !q.is_zero() {
                h.add_multiple(i, pr, &q);
                u.add_multiple(i, pr, &q);
            }
        }
        pr += 1;
    }
    (h, u)
}

/// Echelon basis of a row lattice, built one generator at a time.
///
/// Each basis row remembers its expression in terms of the inserted
/// generators, so membership queries return integer witnesses. Expressions
/// are materialized only when the basis changes.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    dim: usize,
    generators: usize,
    track: bool,
    rows: Vec<BasisRow>,
}

#[derive(Clone, Debug)]
struct BasisRow {
    pivot: usize,
    vec: Vec<BigInt>,
    expr: Option<Vec<BigInt>>,
}

impl LatticeBasis {
    /// `track` enables witness bookkeeping.
    pub fn new(dim: usize, track: bool) -> Self {
        LatticeBasis { dim, generators: 0, track, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Product of the pivots (the lattice determinant when full rank).
    pub fn pivot_product(&self) -> BigInt {
        self.rows.iter().fold(BigInt::one(), |acc, r| acc * &r.vec[r.pivot])
    }

    fn expr_of(&self, base: usize, ops: &[(usize, BigInt)], len: usize) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); len];
        e[base] = BigInt::one();
        for (k, q) in ops {
            let src = self.rows[*k].expr.as_ref().expect("tracked");
            for (j, x) in src.iter().enumerate() {
                if !x.is_zero() {
                    e[j] -= q * x;
                }
            }
        }
        e
    }

    fn grow_exprs(&mut self) {
        let len = self.generators;
        for r in &mut self.rows {
            if let Some(e) = r.expr.as_mut() {
                e.resize(len, BigInt::zero());
            }
        }
    }

    /// Adds a generator; returns its index.
    pub fn insert(&mut self, v: Vec<BigInt>) -> Result<usize> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let idx = self.generators;
        self.generators += 1;
        if self.track {
            self.grow_exprs();
        }
        let mut v = v;
        let mut ops: Vec<(usize, BigInt)> = Vec::new();
        let mut expr: Option<Vec<BigInt>> = None;
        let mut start = 0;
        loop {
            let Some(c) = (start..self.dim).find(|&j| !v[j].is_zero()) else {
                return Ok(idx);
            };
            start = c;
            let pos = self.rows.binary_search_by_key(&c, |r| r.pivot);
            match pos {
                Err(at) => {
                    let mut e = if self.track {
                        Some(expr.take().unwrap_or_else(|| self.materialize(idx, &mut ops)))
                    } else {
                        None
                    };
                    if v[c].is_negative() {
                        negate(&mut v);
                        if let Some(e) = e.as_mut() {
                            negate(e);
                        }
                    }
                    self.rows.insert(at, BasisRow { pivot: c, vec: v, expr: e });
                    self.reduce_above(at);
                    return Ok(idx);
                }
                Ok(k) => {
                    let p = self.rows[k].vec[c].clone();
                    let (q, rem) = v[c].div_mod_floor(&p);
                    if rem.is_zero() {
                        sub_scaled(&mut v, &self.rows[k].vec, &q, c);
                        if self.track {
                            match expr.as_mut() {
                                Some(e) => {
                                    let src = self.rows[k].expr.as_ref().expect("tracked");
                                    sub_scaled(e, src, &q, 0);
                                }
                                None => ops.push((k, q)),
                            }
                        }
                        continue;
                    }
                    // gcd step changes basis row k
                    if self.track && expr.is_none() {
                        expr = Some(self.materialize(idx, &mut ops));
                    }
                    let a = p;
                    let b = v[c].clone();
                    let (g, s, t) = ext_gcd(&a, &b);
                    let (c2, c3) = (-(&b / &g), &a / &g);
                    let row = &mut self.rows[k];
                    let new_row: Vec<BigInt> = row.vec.iter().zip(&v).map(|(x, y)| &s * x + &t * y).collect();
                    let new_v: Vec<BigInt> = row.vec.iter().zip(&v).map(|(x, y)| &c2 * x + &c3 * y).collect();
                    if let (Some(re), Some(ve)) = (row.expr.as_mut(), expr.as_mut()) {
                        let ne: Vec<BigInt> = re.iter().zip(ve.iter()).map(|(x, y)| &s * x + &t * y).collect();
                        let nv: Vec<BigInt> = re.iter().zip(ve.iter()).map(|(x, y)| &c2 * x + &c3 * y).collect();
                        *re = ne;
                        *ve = nv;
                    }
                    row.vec = new_row;
                    v = new_v;
                    self.reduce_above(k);
                }
            }
        }
    }

    fn materialize(&self, idx: usize, ops: &mut Vec<(usize, BigInt)>) -> Vec<BigInt> {
        let e = self.expr_of(idx, ops, self.generators);
        ops.clear();
        e
    }

    fn reduce_above(&mut self, k: usize) {
        let c = self.rows[k].pivot;
        let p = self.rows[k].vec[c].clone();
        let (src_vec, src_expr) = (self.rows[k].vec.clone(), self.rows[k].expr.clone());
        for i in 0..k {
            let q = self.rows[i].vec[c].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            sub_scaled(&mut self.rows[i].vec, &src_vec, &q, c);
            if let (Some(dst), Some(src)) = (self.rows[i].expr.as_mut(), src_expr.as_ref()) {
                sub_scaled(dst, src, &q, 0);
            }
        }
    }

    /// Integer coefficients over the inserted generators expressing `v`, or `None`
    /// when `v` is not in the lattice. Without tracking, a member yields an empty vector.
    pub fn solve(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let mut w = v.to_vec();
        let mut coeffs = vec![BigInt::zero(); if self.track { self.generators } else { 0 }];
        for row in &self.rows {
            // entries left of this pivot must already vanish
            if w[..row.pivot].iter().any(|x| !x.is_zero()) {
                return Ok(None);
            }
            let (q, rem) = w[row.pivot].div_mod_floor(&row.vec[row.pivot]);
            if !rem.is_zero() {
                return Ok(None);
            }
            if q.is_zero() {
                continue;
            }
            sub_scaled(&mut w, &row.vec, &q, row.pivot);
            if let Some(e) = &row.expr {
                for (j, x) in e.iter().enumerate() {
                    if !x.is_zero() {
                        coeffs[j] += &q * x;
                    }
                }
            }
        }
        if w.iter().all(|x| x.is_zero()) {
            Ok(Some(coeffs))
        } else {
            Ok(None)
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        Ok(self.solve(v)?.is_some())
    }

    /// The reduced basis rows: the nonzero rows of the Hermite normal form of the generators.
    pub fn hnf_rows(&self) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<Vec<BigInt>> = self.rows.iter().map(|r| r.vec.clone()).collect();
        for k in 0..rows.len() {
            let c = self.rows[k].pivot;
            let (head, tail) = rows.split_at_mut(k);
            let src = &tail[0];
            for dst in head.iter_mut() {
                let q = dst[c].div_floor(&src[c]);
                if !q.is_zero() {
                    sub_scaled(dst, src, &q, c);
                }
            }
        }
        rows
    }
}

fn negate(v: &mut [BigInt]) {
    for x in v.iter_mut() {
        *x = -std::mem::take(x);
    }
}

fn sub_scaled(dst: &mut [BigInt], src: &[BigInt], q: &BigInt, from: usize) {
    for j in from..dst.len() {
        if !src[j].is_zero() {
            dst[j] -= q * &src[j];
        }
    }
}

/// Integer coefficients `c` with `sum_i c_i * generators[i] = v`, or `None` when `v` is
/// outside the row lattice. A `None` is a proof of non-membership.
pub fn span_membership(v: &[BigInt], generators: &IntMatrix) -> Result<Option<Vec<BigInt>>> {
    if v.len() != generators.cols() {
        return Err(Error::DimensionMismatch { expected: generators.cols(), got: v.len() });
    }
    let mut basis = LatticeBasis::new(generators.cols(), true);
    for i in 0..generators.rows() {
        basis.insert(generators.row(i).to_vec())?;
    }
    basis.solve(v)
}

/// Convenience wrapper over `i64` data.
pub fn span_membership_i64(v: &[i64], generators: &[Vec<i64>]) -> Result<Option<Vec<BigInt>>> {
    let m = IntMatrix::from_rows(v.len(), generators)?;
    let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    span_membership(&v, &m)
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
