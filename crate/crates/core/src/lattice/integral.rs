//! Integer row-span decisions for sparse 0/1-style incidence systems.

use num_bigint::BigInt;
use num_traits::Zero;

use super::LatticeBasis;
use crate::error::{Error, Result};

/// Above this many generators witness tracking is skipped and only the verdict is returned.
pub const WITNESS_LIMIT: usize = 20_000;

/// Outcome of an integral decomposition query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralOutcome {
    pub exists: bool,
    /// Integer weight per row, present when tracking was enabled and a solution exists.
    pub witness: Option<Vec<BigInt>>,
    pub rank: usize,
}

/// Decides whether `target` is an integer combination of sparse rows `(column, value)`.
pub fn integral_combination(dim: usize, rows: &[Vec<(usize, i64)>], target: &[i64]) -> Result<IntegralOutcome> {
    if target.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: target.len() });
    }
    let track = rows.len() <= WITNESS_LIMIT;
    let mut basis = LatticeBasis::new(dim, track);
    for row in rows {
        let mut v = vec![BigInt::zero(); dim];
        for &(c, x) in row {
            if c >= dim {
                return Err(Error::DimensionMismatch { expected: dim, got: c + 1 });
            }
            v[c] += x;
        }
        basis.insert(v)?;
    }
    let t: Vec<BigInt> = target.iter().map(|&x| BigInt::from(x)).collect();
    let sol = basis.solve(&t)?;
    Ok(IntegralOutcome { exists: sol.is_some(), witness: sol.filter(|_| track), rank: basis.rank() })
}

/// Checks `sum_i w_i * rows_i == target` exactly.
pub fn verify_combination(dim: usize, rows: &[Vec<(usize, i64)>], weights: &[BigInt], target: &[i64]) -> bool {
    if weights.len() != rows.len() || target.len() != dim {
        return false;
    }
    let mut acc = vec![BigInt::zero(); dim];
    for (row, w) in rows.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        for &(c, x) in row {
            if c >= dim {
                return false;
            }
            acc[c] += w * x;
        }
    }
    acc.iter().zip(target).all(|(a, &t)| *a == BigInt::from(t))
}
