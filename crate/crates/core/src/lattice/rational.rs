//! Exact rational linear feasibility.
//!
//! Decides whether some `x` satisfies `lo ≤ x ≤ hi` and `L_i ≤ a_i·x ≤ U_i` for every row,
//! using a phase-one bounded-variable simplex over `BigRational` with Bland's rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A sparse row `(variable, coefficient)`.
pub type SparseRow = Vec<(usize, BigRational)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic(usize),
    Lower,
    Upper,
}

/// A point inside the box and row bands, or `None` when the system is infeasible.
pub fn feasible_point(
    rows: &[SparseRow],
    row_bounds: &[(BigRational, BigRational)],
    var_bounds: &[(BigRational, BigRational)],
) -> Result<Option<Vec<BigRational>>> {
    if rows.len() != row_bounds.len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), got: row_bounds.len() });
    }
    let nx = var_bounds.len();
    for (lo, hi) in var_bounds.iter().chain(row_bounds) {
        if lo > hi {
            return Ok(None);
        }
    }
    for row in rows {
        if let Some(&(j, _)) = row.iter().find(|(j, _)| *j >= nx) {
            return Err(Error::DimensionMismatch { expected: nx, got: j + 1 });
        }
    }
    let m = rows.len();
    if m == 0 {
        return Ok(Some(var_bounds.iter().map(|(lo, _)| lo.clone()).collect()));
    }
    // columns: x (nx), row values s (m), artificials (m)
    let ncols = nx + 2 * m;
    let zero = BigRational::zero();
    let mut lo: Vec<BigRational> = Vec::with_capacity(ncols);
    let mut hi: Vec<Option<BigRational>> = Vec::with_capacity(ncols);
    for (l, h) in var_bounds.iter().chain(row_bounds) {
        lo.push(l.clone());
        hi.push(Some(h.clone()));
    }
    for _ in 0..m {
        lo.push(zero.clone());
        hi.push(None);
    }
    let mut tab: Vec<Vec<BigRational>> = vec![vec![zero.clone(); ncols]; m];
    let mut beta: Vec<BigRational> = Vec::with_capacity(m);
    let mut state = vec![State::Lower; ncols];
    for (i, row) in rows.iter().enumerate() {
        // a_i·x − s_i + sign·art_i = 0 with every non-artificial at its lower bound
        let mut resid = lo[nx + i].clone();
        for (j, a) in row {
            tab[i][*j] += a;
            resid -= a * &lo[*j];
        }
        tab[i][nx + i] = -BigRational::one();
        let flip = resid.is_negative();
        if flip {
            for x in tab[i].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        tab[i][nx + m + i] = BigRational::one();
        state[nx + m + i] = State::Basic(i);
        beta.push(resid.abs());
    }
    let mut basis: Vec<usize> = (0..m).map(|i| nx + m + i).collect();
    // reduced costs for minimizing the artificial sum
    let mut cost = vec![zero.clone(); ncols];
    for j in 0..nx + m {
        for row in &tab {
            cost[j] -= &row[j];
        }
    }
    let mut retired = vec![false; ncols];
    loop {
        let entering = (0..ncols).find(|&j| {
            if retired[j] {
                return false;
            }
            match state[j] {
                State::Basic(_) => false,
                State::Lower => cost[j].is_negative() && hi[j].as_ref().is_none_or(|h| *h > lo[j]),
                State::Upper => cost[j].is_positive(),
            }
        });
        let Some(j) = entering else { break };
        let up = state[j] == State::Lower;
        // step length t ≥ 0; basic value changes by −dir·T_ij·t
        let mut best: Option<(BigRational, usize, Option<usize>)> = hi[j].as_ref().map(|h| (h - &lo[j], j, None));
        for i in 0..m {
            let t_ij = &tab[i][j];
            if t_ij.is_zero() {
                continue;
            }
            let b = basis[i];
            let decreasing = t_ij.is_positive() == up;
            let limit = if decreasing {
                Some((&beta[i] - &lo[b]) / t_ij.abs())
            } else {
                hi[b].as_ref().map(|h| (h - &beta[i]) / t_ij.abs())
            };
            if let Some(t) = limit {
                let better = match &best {
                    None => true,
                    Some((bt, bv, _)) => t < *bt || (t == *bt && b < *bv),
                };
                if better {
                    best = Some((t, b, Some(i)));
                }
            }
        }
        let Some((t, _, row)) = best else {
            return Err(Error::Invalid("unbounded phase-one direction".into()));
        };
        let signed_t = if up { t.clone() } else { -t.clone() };
        for i in 0..m {
            if !tab[i][j].is_zero() {
                let d = &tab[i][j] * &signed_t;
                beta[i] -= d;
            }
        }
        let entering_value = if up { &lo[j] + &t } else { hi[j].clone().expect("upper state has bound") - &t };
        match row {
            None => state[j] = if up { State::Upper } else { State::Lower },
            Some(r) => {
                let leaving = basis[r];
                let at_lower = beta[r] == lo[leaving];
                state[leaving] = if at_lower { State::Lower } else { State::Upper };
                if leaving >= nx + m {
                    retired[leaving] = true;
                }
                pivot(&mut tab, &mut cost, r, j);
                basis[r] = j;
                state[j] = State::Basic(r);
                beta[r] = entering_value;
            }
        }
    }
    let infeasible = (0..m).any(|i| basis[i] >= nx + m && beta[i].is_positive())
        || (nx + m..ncols).any(|j| state[j] == State::Upper);
    if infeasible {
        return Ok(None);
    }
    let mut x = Vec::with_capacity(nx);
    for j in 0..nx {
        x.push(match state[j] {
            State::Basic(i) => beta[i].clone(),
            State::Lower => lo[j].clone(),
            State::Upper => hi[j].clone().expect("bounded"),
        });
    }
    debug_assert!(check_point(rows, row_bounds, var_bounds, &x));
    Ok(Some(x))
}

fn pivot(tab: &mut [Vec<BigRational>], cost: &mut [BigRational], r: usize, j: usize) {
    let p = tab[r][j].clone();
    for x in tab[r].iter_mut() {
        if !x.is_zero() {
            *x /= &p;
        }
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r && !row[j].is_zero() {
            let f = row[j].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    if !cost[j].is_zero() {
        let f = cost[j].clone();
        for (x, y) in cost.iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
}

/// Exact check of a candidate point.
pub fn check_point(
    rows: &[SparseRow],
    row_bounds: &[(BigRational, BigRational)],
    var_bounds: &[(BigRational, BigRational)],
    x: &[BigRational],
) -> bool {
    if x.len() != var_bounds.len() {
        return false;
    }
    let in_box = x.iter().zip(var_bounds).all(|(v, (l, h))| l <= v && v <= h);
    in_box
        && rows.iter().zip(row_bounds).all(|(row, (l, h))| {
            let s: BigRational = row.iter().map(|(j, a)| a * &x[*j]).sum();
            *l <= s && s <= *h
        })
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(rows: &[Vec<i64>]) -> Vec<SparseRow> {
        rows.iter()
            .map(|r| r.iter().enumerate().filter(|(_, &a)| a != 0).map(|(j, &a)| (j, rat(a))).collect())
            .collect()
    }

    #[test]
    fn simple_systems() {
        let rows = dense(&[vec![1, 1]]);
        let vb = vec![(rat(0), rat(1)), (rat(0), rat(1))];
        let x = feasible_point(&rows, &[(rat(2), rat(2))], &vb).unwrap().unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        assert!(feasible_point(&rows, &[(rat(3), rat(5))], &vb).unwrap().is_none());
        let half = feasible_point(&dense(&[vec![2, 0]]), &[(rat(1), rat(1))], &vb).unwrap().unwrap();
        assert_eq!(half[0], ratio(1, 2));
    }

    #[test]
    fn negative_bounds_and_empty_rows() {
        let vb = vec![(rat(-3), rat(-1))];
        let x = feasible_point(&dense(&[vec![-1]]), &[(rat(2), rat(2))], &vb).unwrap().unwrap();
        assert_eq!(x, vec![rat(-2)]);
        assert_eq!(feasible_point(&[], &[], &vb).unwrap().unwrap(), vec![rat(-3)]);
        assert!(feasible_point(&[], &[], &[(rat(1), rat(0))]).unwrap().is_none());
    }

    proptest! {
        // integer grid points witness feasibility; any returned point must check
        #[test]
        fn agrees_with_grid_witness(
            a in proptest::collection::vec(proptest::collection::vec(-3i64..4, 3), 1..4),
            x0 in proptest::collection::vec(-2i64..3, 3),
            slack in 0i64..2,
            shift in 0i64..3,
        ) {
            let rows = dense(&a);
            let vb: Vec<_> = (0..3).map(|_| (rat(-2), rat(2))).collect();
            let vals: Vec<i64> = a.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
            let rb: Vec<_> = vals.iter().map(|&v| (rat(v - slack), rat(v + slack))).collect();
            let x = feasible_point(&rows, &rb, &vb).unwrap();
            prop_assert!(x.is_some());
            prop_assert!(check_point(&rows, &rb, &vb, &x.unwrap()));
            // shifting a band beyond the reachable range makes it infeasible
            let reach: i64 = a[0].iter().map(|c| c.abs() * 2).sum();
            let mut rb2 = rb.clone();
            rb2[0] = (rat(reach + 1 + shift), rat(reach + 2 + shift));
            prop_assert!(feasible_point(&rows, &rb2, &vb).unwrap().is_none());
        }
    }
}
