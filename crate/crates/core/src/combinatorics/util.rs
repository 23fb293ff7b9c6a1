//! Small enumeration helpers shared by every module.

use num_bigint::BigUint;
use num_traits::One;

/// All `k`-subsets of `items`, in lexicographic order of positions.
pub fn k_subsets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    let n = items.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All subsets of `items` (every size), ordered by size then lexicographically.
pub fn all_subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..=items.len()).flat_map(|k| k_subsets(items, k)).collect()
}

/// All injections `[i] -> [r]` as value sequences, in lexicographic order.
pub fn injections(i: usize, r: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(i);
    let mut used = vec![false; r];
    fn rec(i: usize, r: usize, cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == i {
            out.push(cur.clone());
            return;
        }
        for v in 0..r {
            if !used[v] {
                used[v] = true;
                cur.push(v as u32);
                rec(i, r, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(i, r, &mut cur, &mut used, &mut out);
    out
}

/// All permutations of `[n]` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u32>> {
    injections(n, n)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

pub fn binomial_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k as u128 {
        acc = acc * (n as u128 - j) / (j + 1);
    }
    acc as u64
}

/// Falling factorial `(n)_k`.
pub fn falling(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for j in 0..k {
        if j >= n {
            return BigUint::from(0u32);
        }
        acc *= n - j;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_counts() {
        let items: Vec<u32> = (0..6).collect();
        for k in 0..=7 {
            assert_eq!(k_subsets(&items, k).len() as u64, binomial_u64(6, k as u64));
        }
        assert_eq!(all_subsets(&items).len(), 64);
        assert_eq!(k_subsets(&items, 2)[0], vec![0, 1]);
        assert_eq!(k_subsets(&items, 2)[14], vec![4, 5]);
    }

    #[test]
    fn empty_subsets() {
        let none: Vec<u32> = vec![];
        assert_eq!(k_subsets(&none, 0), vec![Vec::<u32>::new()]);
        assert!(k_subsets(&none, 1).is_empty());
    }

    #[test]
    fn injection_counts() {
        assert_eq!(injections(2, 3).len(), 6);
        assert_eq!(injections(0, 3), vec![Vec::<u32>::new()]);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(injections(2, 3)[1], vec![0, 2]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 3), BigUint::from(84u32));
        assert_eq!(falling(7, 3), BigUint::from(210u32));
        assert_eq!(falling(2, 3), BigUint::from(0u32));
        assert_eq!(binomial_u64(30, 15), 155117520);
    }
}
