use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::util::{binomial, k_subsets};
use crate::combinatorics::{ColouredMultigraph, Hypergraph, Partition};
use crate::error::{Error, Result};

/// Which typicality condition [`is_typical`] checks.
#[derive(Clone, Copy, Debug)]
pub enum TypicalityMode<'a> {
    /// Common neighbourhoods of up to `s` distinct `(r-1)`-sets against `d(G)^{|A|} n`.
    Plain(&'a Hypergraph),
    /// `G` as an `H`-blowup over `parts` (one part per vertex of `H`).
    Blowup { graph: &'a Hypergraph, pattern: &'a Hypergraph, parts: &'a Partition },
    /// `α`-degrees of coloured `(r-1)`-set vectors against `n Π d(G^{α_i})`.
    Coloured(&'a ColouredMultigraph),
    /// Neighbourhoods inside each part `P'_j` against `|P'_j| Π d_{i(f_k)+e_j}`.
    PartiteIndex { graph: &'a Hypergraph, parts: &'a Partition },
}

#[derive(Clone, Debug)]
pub struct TypicalityOptions {
    /// Largest vertex count checked exhaustively.
    pub exact_n: usize,
    /// Largest number of tuples enumerated exhaustively.
    pub budget: usize,
    /// Tuples sampled per group and size otherwise.
    pub samples: usize,
    pub seed: u64,
}

impl Default for TypicalityOptions {
    fn default() -> Self {
        TypicalityOptions { exact_n: 60, budget: 4_000_000, samples: 20_000, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypicalityReport {
    pub typical: bool,
    /// Smallest `c` making every checked condition hold; `None` if some condition fails for all `c`.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub needed_c: Option<BigRational>,
    pub checked: u64,
    pub sampled: bool,
    pub worst: Option<String>,
}

fn ser_opt_ratio<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Parses `"0.15"`, `"3/20"` or `"2"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("cannot parse {s:?} as a rational number"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let r = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    Ok(if neg { -r } else { r })
}

/// Tuples are drawn within a group; counts are sums over the group's coordinates of
/// elementwise products of the chosen items' vectors.
struct Group {
    label: String,
    base: u64,
    items: Vec<(usize, Vec<u64>)>,
    repetition: bool,
}

struct Tally {
    k: usize,
    min: u64,
    max: u64,
}

fn combos(m: usize, k: usize, rep: bool) -> Option<u128> {
    let (top, k) = if rep { (m + k - 1, k) } else { (m, k) };
    if k > top {
        return Some(0);
    }
    let b = binomial(top as u64, k as u64);
    u128::try_from(b).ok()
}

fn run(
    groups: &[Group],
    densities: &[BigRational],
    s: usize,
    c: &BigRational,
    exact_allowed: bool,
    opts: &TypicalityOptions,
) -> TypicalityReport {
    let total: Option<u128> = groups.iter().try_fold(0u128, |acc, g| {
        (1..=s).try_fold(acc, |a, k| combos(g.items.len(), k, g.repetition).and_then(|x| a.checked_add(x)))
    });
    let exact = exact_allowed && total.is_some_and(|t| t <= opts.budget as u128);
    let mut tallies: HashMap<(usize, Vec<usize>), Tally> = HashMap::new();
    let mut checked = 0u64;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for (gi, g) in groups.iter().enumerate() {
        let m = g.items.len();
        if m == 0 {
            continue;
        }
        let width = g.items[0].1.len();
        let mut record = |idx: &[usize], count: u64| {
            let mut key: Vec<usize> = idx.iter().map(|&i| g.items[i].0).collect();
            key.sort_unstable();
            let t = tallies.entry((gi, key)).or_insert(Tally { k: idx.len(), min: u64::MAX, max: 0 });
            t.min = t.min.min(count);
            t.max = t.max.max(count);
        };
        if exact {
            let mut stack: Vec<Vec<u64>> = vec![vec![1; width]];
            let mut idx: Vec<usize> = Vec::new();
            fn dfs(
                g: &Group,
                s: usize,
                start: usize,
                stack: &mut Vec<Vec<u64>>,
                idx: &mut Vec<usize>,
                record: &mut dyn FnMut(&[usize], u64),
                checked: &mut u64,
            ) {
                if idx.len() == s {
                    return;
                }
                for i in start..g.items.len() {
                    let top = stack.last().expect("nonempty");
                    let next: Vec<u64> = top.iter().zip(&g.items[i].1).map(|(a, b)| a.saturating_mul(*b)).collect();
                    let count = next.iter().fold(0u64, |a, &b| a.saturating_add(b));
                    idx.push(i);
                    *checked += 1;
                    record(idx, count);
                    stack.push(next);
                    dfs(g, s, if g.repetition { i } else { i + 1 }, stack, idx, record, checked);
                    stack.pop();
                    idx.pop();
                }
            }
            dfs(g, s, 0, &mut stack, &mut idx, &mut record, &mut checked);
        } else {
            for k in 1..=s {
                if !g.repetition && k > m {
                    break;
                }
                for _ in 0..opts.samples {
                    let idx: Vec<usize> = if g.repetition {
                        (0..k).map(|_| rng.gen_range(0..m)).collect()
                    } else {
                        rand::seq::index::sample(&mut rng, m, k).into_vec()
                    };
                    let mut acc = vec![1u64; width];
                    for &i in &idx {
                        for (a, b) in acc.iter_mut().zip(&g.items[i].1) {
                            *a = a.saturating_mul(*b);
                        }
                    }
                    checked += 1;
                    record(&idx, acc.iter().fold(0u64, |a, &b| a.saturating_add(b)));
                }
            }
        }
    }
    let mut needed = Some(BigRational::zero());
    let mut worst: Option<(Option<BigRational>, String)> = None;
    let mut keys: Vec<_> = tallies.keys().cloned().collect();
    keys.sort();
    for key in keys {
        let t = &tallies[&key];
        let g = &groups[key.0];
        let mut expected = BigRational::from_integer(BigInt::from(g.base));
        for &d in &key.1 {
            expected *= &densities[d];
        }
        let dev = [t.min, t.max]
            .iter()
            .map(|&x| (BigRational::from_integer(BigInt::from(x)) - &expected).abs())
            .max()
            .expect("two values");
        let this = if expected.is_zero() {
            if dev.is_zero() {
                Some(BigRational::zero())
            } else {
                None
            }
        } else {
            Some(dev / (expected.clone() * BigRational::from_integer(BigInt::from(t.k))))
        };
        let worse = match (&this, &worst) {
            (_, None) => true,
            (None, Some((Some(_), _))) => true,
            (Some(a), Some((Some(b), _))) => a > b,
            _ => false,
        };
        if worse {
            worst = Some((
                this.clone(),
                format!("{}: {} sets, counts {}..{} vs expected {}", g.label, t.k, t.min, t.max, expected),
            ));
        }
        needed = match (needed, this) {
            (Some(a), Some(b)) => Some(if b > a { b } else { a }),
            _ => None,
        };
    }
    let typical = needed.as_ref().is_some_and(|x| x <= c);
    TypicalityReport { typical, needed_c: needed, checked, sampled: !exact, worst: worst.map(|w| w.1) }
}

fn ratio(a: u64, b: &BigInt) -> BigRational {
    if b.is_zero() {
        return BigRational::zero();
    }
    BigRational::new(BigInt::from(a), b.clone())
}

fn indicator(n: usize, verts: &[u32], f: impl Fn(u32) -> bool) -> Vec<u64> {
    let _ = n;
    verts.iter().map(|&v| u64::from(f(v))).collect()
}

/// Checks the selected `(c, s)`-typicality condition; counts are exact, sampled above
/// `opts.exact_n` vertices or `opts.budget` tuples.
pub fn is_typical(
    mode: TypicalityMode<'_>,
    c: &BigRational,
    s: usize,
    opts: &TypicalityOptions,
) -> Result<TypicalityReport> {
    if c.is_negative() {
        return Err(Error::Invalid("c must be nonnegative".into()));
    }
    match mode {
        TypicalityMode::Plain(g) => {
            let n = g.vertex_count();
            let r = g.uniformity();
            let verts: Vec<u32> = (0..n as u32).collect();
            let d = ratio(g.len() as u64, &BigInt::from(binomial(n as u64, r as u64)));
            let items = k_subsets(&verts, r - 1)
                .into_iter()
                .map(|f| {
                    let vec = indicator(n, &verts, |v| {
                        !f.contains(&v) && {
                            let mut e = f.clone();
                            e.push(v);
                            g.contains(&e)
                        }
                    });
                    (0usize, vec)
                })
                .collect();
            let groups = [Group { label: "all vertices".into(), base: n as u64, items, repetition: false }];
            Ok(run(&groups, &[d], s, c, n <= opts.exact_n, opts))
        }
        TypicalityMode::Blowup { graph, pattern, parts } => {
            if parts.part_count() != pattern.vertex_count() || parts.vertex_count() != graph.vertex_count() {
                return Err(Error::NotBlowup("partition does not match pattern and host".into()));
            }
            let r = graph.uniformity();
            if pattern.uniformity() != r {
                return Err(Error::DimensionMismatch { expected: r, got: pattern.uniformity() });
            }
            let mut counts = vec![0u64; pattern.len()];
            for e in graph.edges() {
                let mut f: Vec<u32> = e.iter().map(|&v| parts.part_of(v) as u32).collect();
                f.sort_unstable();
                f.dedup();
                match pattern.edges().binary_search(&f) {
                    Ok(k) if f.len() == r => counts[k] += 1,
                    _ => return Err(Error::NotBlowup(format!("edge {e:?} is not partite over a pattern edge"))),
                }
            }
            let densities: Vec<BigRational> = pattern
                .edges()
                .iter()
                .zip(&counts)
                .map(|(f, &k)| ratio(k, &f.iter().map(|&x| BigInt::from(parts.part(x as usize).len())).product()))
                .collect();
            let mut groups = Vec::new();
            for x in 0..pattern.vertex_count() as u32 {
                let vx = parts.part(x as usize);
                let mut items = Vec::new();
                for (k, h) in pattern.edges().iter().enumerate() {
                    let Ok(pos) = h.binary_search(&x) else { continue };
                    let mut f = h.clone();
                    f.remove(pos);
                    let mut choice = Vec::new();
                    partite_sets(parts, &f, &mut choice, &mut |e| {
                        let vec = indicator(0, vx, |v| {
                            let mut full = e.to_vec();
                            full.push(v);
                            graph.contains(&full)
                        });
                        items.push((k, vec));
                    });
                }
                groups.push(Group { label: format!("part {x}"), base: vx.len() as u64, items, repetition: false });
            }
            let n = graph.vertex_count();
            Ok(run(&groups, &densities, s, c, n <= opts.exact_n, opts))
        }
        TypicalityMode::Coloured(g) => {
            let n = g.vertex_count();
            let r = g.uniformity();
            let dcount = g.colour_count();
            let total = BigInt::from(binomial(n as u64, r as u64));
            let densities: Vec<BigRational> = g.colour_totals().iter().map(|&x| ratio(x, &total)).collect();
            let verts: Vec<u32> = (0..n as u32).collect();
            let mut items = Vec::new();
            for f in k_subsets(&verts, r - 1) {
                for alpha in 0..dcount {
                    let vec = verts
                        .iter()
                        .map(|&v| {
                            if f.contains(&v) {
                                return 0;
                            }
                            let mut e = f.clone();
                            e.push(v);
                            g.multiplicity(&e).map_or(0, |m| m[alpha])
                        })
                        .collect();
                    items.push((alpha, vec));
                }
            }
            let groups = [Group { label: "all vertices".into(), base: n as u64, items, repetition: true }];
            Ok(run(&groups, &densities, s, c, n <= opts.exact_n, opts))
        }
        TypicalityMode::PartiteIndex { graph, parts } => {
            if parts.vertex_count() != graph.vertex_count() {
                return Err(Error::DimensionMismatch { expected: graph.vertex_count(), got: parts.vertex_count() });
            }
            let n = graph.vertex_count();
            let r = graph.uniformity();
            let t = parts.part_count();
            let mut index_ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut index_counts: Vec<u64> = Vec::new();
            let mut index_list: Vec<Vec<usize>> = Vec::new();
            fn id_of(iv: Vec<usize>, ids: &mut HashMap<Vec<usize>, usize>, list: &mut Vec<Vec<usize>>) -> usize {
                *ids.entry(iv.clone()).or_insert_with(|| {
                    list.push(iv);
                    list.len() - 1
                })
            }
            for e in graph.edges() {
                let k = id_of(parts.index_vector(e)?, &mut index_ids, &mut index_list);
                index_counts.resize(index_list.len(), 0);
                index_counts[k] += 1;
            }
            let verts: Vec<u32> = (0..n as u32).collect();
            let mut groups = Vec::new();
            let fs = k_subsets(&verts, r - 1);
            for j in 0..t {
                let pj = parts.part(j);
                let mut items = Vec::with_capacity(fs.len());
                for f in &fs {
                    let mut iv = parts.index_vector(f)?;
                    iv[j] += 1;
                    let k = id_of(iv, &mut index_ids, &mut index_list);
                    let vec = indicator(0, pj, |v| {
                        !f.contains(&v) && {
                            let mut e = f.clone();
                            e.push(v);
                            graph.contains(&e)
                        }
                    });
                    items.push((k, vec));
                }
                groups.push(Group { label: format!("part {j}"), base: pj.len() as u64, items, repetition: false });
            }
            index_counts.resize(index_list.len(), 0);
            let sizes = parts.sizes();
            let densities: Vec<BigRational> = index_list
                .iter()
                .zip(&index_counts)
                .map(|(iv, &cnt)| {
                    let denom: BigInt =
                        iv.iter().zip(&sizes).map(|(&i, &p)| BigInt::from(binomial(p as u64, i as u64))).product();
                    ratio(cnt, &denom)
                })
                .collect();
            Ok(run(&groups, &densities, s, c, n <= opts.exact_n, opts))
        }
    }
}

fn partite_sets(parts: &Partition, f: &[u32], cur: &mut Vec<u32>, emit: &mut dyn FnMut(&[u32])) {
    if cur.len() == f.len() {
        emit(cur);
        return;
    }
    for &v in parts.part(f[cur.len()] as usize) {
        cur.push(v);
        partite_sets(parts, f, cur, emit);
        cur.pop();
    }
}

/// `1` as a rational, for callers building thresholds.
pub fn one() -> BigRational {
    BigRational::one()
}
