//! Random greedy matching on the auxiliary copy hypergraph, with counting bounds.
//!
//! The auxiliary hypergraph has one vertex per host atom and one hyperedge per copy
//! footprint. The density after `i` steps is `d(i) = 1 - iR/N`, the fraction of
//! atoms still uncovered; on a complete blowup `H(n)` this is `1 - i n^{-r}`.
//! The `o(·)` terms of both counting bounds are dropped.

use std::collections::HashMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{Hypergraph, Partition};
use crate::complex::typical::{is_typical, TypicalityMode, TypicalityOptions, TypicalityReport};
use crate::error::{Error, Result};
use crate::solver::{enumerate_copies, Family, Host, PartiteConstraint};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuxiliaryMatchingInstance {
    /// `N`, the number of host atoms.
    pub vertices: usize,
    /// `R`, the footprint size.
    pub edge_size: usize,
    /// Footprints as atom indices.
    #[serde(skip)]
    pub edges: Vec<Vec<u32>>,
    #[serde(skip)]
    pub degrees: Vec<u64>,
    pub min_degree: u64,
    /// `D`, the largest vertex degree.
    pub max_degree: u64,
    pub mean_degree: f64,
    pub max_pair_degree: u64,
}

impl AuxiliaryMatchingInstance {
    /// Builds from explicit footprints on `0..vertices`.
    pub fn from_edges(vertices: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        let r = edges.first().map_or(0, |e| e.len());
        let mut degrees = vec![0u64; vertices];
        let mut pairs: HashMap<(u32, u32), u64> = HashMap::new();
        for e in &edges {
            if e.len() != r {
                return Err(Error::Invalid("auxiliary edges must all have the same size".into()));
            }
            if e.iter().enumerate().any(|(k, a)| e[k + 1..].contains(a)) {
                return Err(Error::Invalid(format!("auxiliary edge {e:?} repeats a vertex")));
            }
            for (k, &a) in e.iter().enumerate() {
                if a as usize >= vertices {
                    return Err(Error::VertexOutOfRange { vertex: a, n: vertices });
                }
                degrees[a as usize] += 1;
                for &b in &e[k + 1..] {
                    *pairs.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
        }
        let min_degree = degrees.iter().copied().min().unwrap_or(0);
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let mean_degree = if vertices == 0 { 0.0 } else { degrees.iter().sum::<u64>() as f64 / vertices as f64 };
        Ok(AuxiliaryMatchingInstance {
            vertices,
            edge_size: r,
            edges,
            degrees,
            min_degree,
            max_degree,
            mean_degree,
            max_pair_degree: pairs.values().copied().max().unwrap_or(0),
        })
    }

    pub fn density(&self, step: usize) -> f64 {
        if self.vertices == 0 {
            return 0.0;
        }
        1.0 - (step * self.edge_size) as f64 / self.vertices as f64
    }
}

/// Vertices are host atoms, hyperedges the distinct copy footprints; multiplicities must be 1.
pub fn build_auxiliary(
    host: &Host,
    family: &Family,
    constraint: Option<&PartiteConstraint>,
    budget: u64,
) -> Result<AuxiliaryMatchingInstance> {
    let table = enumerate_copies(host, family, constraint, budget)?;
    if table.capacity.iter().any(|&c| c != 1) || table.copies.iter().any(|c| c.footprint.iter().any(|&(_, m)| m != 1)) {
        return Err(Error::Invalid("the matching process needs a simple host and simple patterns".into()));
    }
    let edges = table.copies.iter().map(|c| c.footprint.iter().map(|&(a, _)| a as u32).collect()).collect();
    AuxiliaryMatchingInstance::from_edges(table.atoms.len(), edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    /// Stop once `d(i)` falls below this.
    pub density: Option<f64>,
    /// Stop after this many steps.
    pub steps: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Density,
    Steps,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// Auxiliary edge chosen at this step.
    pub chosen: usize,
    /// Surviving auxiliary edges before the choice.
    pub remaining: usize,
    pub density: f64,
    pub covered: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    pub stop: StopReason,
    /// Surviving edges when the process stopped.
    pub final_remaining: usize,
}

impl Trajectory {
    /// One JSON object per step.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("step serializes"));
            out.push('\n');
        }
        out
    }
}

/// Picks a uniformly random surviving edge, deletes every edge meeting it, and repeats.
pub fn random_greedy(a: &AuxiliaryMatchingInstance, stop: StopRule, seed: u64) -> (Vec<usize>, Trajectory) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut incidence: Vec<Vec<u32>> = vec![Vec::new(); a.vertices];
    for (k, e) in a.edges.iter().enumerate() {
        for &v in e {
            incidence[v as usize].push(k as u32);
        }
    }
    let mut pool: Vec<u32> = (0..a.edges.len() as u32).collect();
    let mut pos: Vec<u32> = (0..a.edges.len() as u32).collect();
    let mut alive = vec![true; a.edges.len()];
    let mut covered = vec![false; a.vertices];
    let mut matching = Vec::new();
    let mut steps = Vec::new();
    let reason = loop {
        let i = matching.len();
        if stop.steps.is_some_and(|t| i >= t) {
            break StopReason::Steps;
        }
        let d = a.density(i);
        if stop.density.is_some_and(|t| d < t) {
            break StopReason::Density;
        }
        if pool.is_empty() {
            break StopReason::Exhausted;
        }
        let remaining = pool.len();
        let e = pool[rng.gen_range(0..pool.len())] as usize;
        for &v in &a.edges[e] {
            covered[v as usize] = true;
            for &f in &incidence[v as usize] {
                let f = f as usize;
                if alive[f] {
                    alive[f] = false;
                    let p = pos[f] as usize;
                    let last = pool.pop().expect("alive edge is pooled");
                    if p < pool.len() {
                        pool[p] = last;
                        pos[last as usize] = p as u32;
                    }
                }
            }
        }
        matching.push(e);
        steps.push(StepRecord { step: i, chosen: e, remaining, density: d, covered: (i + 1) * a.edge_size });
    };
    debug_assert_eq!(covered.iter().filter(|&&c| c).count(), matching.len() * a.edge_size);
    let final_remaining = pool.len();
    (matching, Trajectory { seed, steps, stop: reason, final_remaining })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingBounds {
    pub n: usize,
    pub vertices: usize,
    pub edge_size: usize,
    pub max_degree: u64,
    /// `(N/R) log(D e^{1-R})`.
    pub log_upper: f64,
    /// `Σ_j log(remaining_j / (d(j) n^r))` over the seeded trajectory.
    pub log_lower_estimate: f64,
    /// Both bounds per cell, dividing by `N/R`.
    pub upper_rate: f64,
    pub lower_rate: f64,
    pub steps: usize,
    pub seed: u64,
    pub o_terms_dropped: bool,
}

/// Bounds for `H`-decompositions of the blowup `H(n)`.
pub fn counting_bounds(
    pattern: &Hypergraph,
    n: usize,
    stop: StopRule,
    seed: u64,
    budget: u64,
) -> Result<CountingBounds> {
    let (g, parts) = pattern.uniform_blowup(n)?;
    let c = PartiteConstraint { pattern: Partition::singletons(pattern.vertex_count()), host: parts };
    let a = build_auxiliary(&Host::Hypergraph(g), &Family::Hypergraph(vec![pattern.clone()]), Some(&c), budget)?;
    let (_, traj) = random_greedy(&a, stop, seed);
    Ok(bounds_from(&a, &traj, n, pattern.uniformity()))
}

/// Both bounds from an instance and a trajectory on it.
pub fn bounds_from(a: &AuxiliaryMatchingInstance, traj: &Trajectory, n: usize, r: usize) -> CountingBounds {
    let big_r = a.edge_size as f64;
    let cells = a.vertices as f64 / big_r;
    let log_upper = cells * ((a.max_degree as f64).ln() + 1.0 - big_r);
    let scale = (n as f64).powi(r as i32);
    let log_lower_estimate: f64 = traj.steps.iter().map(|s| (s.remaining as f64 / (s.density * scale)).ln()).sum();
    CountingBounds {
        n,
        vertices: a.vertices,
        edge_size: a.edge_size,
        max_degree: a.max_degree,
        log_upper,
        log_lower_estimate,
        upper_rate: log_upper / cells,
        lower_rate: log_lower_estimate / cells,
        steps: traj.steps.len(),
        seed: traj.seed,
        o_terms_dropped: true,
    }
}

/// Typicality of the uncovered host after selected steps of a trajectory.
pub fn typicality_track(
    host: &Hypergraph,
    parts: Option<(&Hypergraph, &Partition)>,
    a: &AuxiliaryMatchingInstance,
    traj: &Trajectory,
    every: usize,
    c: &BigRational,
    s: usize,
    opts: &TypicalityOptions,
) -> Result<Vec<(usize, TypicalityReport)>> {
    if a.vertices != host.len() {
        return Err(Error::DimensionMismatch { expected: host.len(), got: a.vertices });
    }
    let mut covered = vec![false; a.vertices];
    let mut out = Vec::new();
    let every = every.max(1);
    for i in 0..=traj.steps.len() {
        if i % every == 0 || i == traj.steps.len() {
            let edges = host.edges().iter().zip(&covered).filter(|(_, &c)| !c).map(|(e, _)| e.clone());
            let g = Hypergraph::new(host.vertex_count(), host.uniformity(), edges)?;
            let mode = match parts {
                Some((pattern, p)) => TypicalityMode::Blowup { graph: &g, pattern, parts: p },
                None => TypicalityMode::Plain(&g),
            };
            out.push((i, is_typical(mode, c, s, opts)?));
        }
        if let Some(rec) = traj.steps.get(i) {
            for &v in &a.edges[rec.chosen] {
                covered[v as usize] = true;
            }
        }
    }
    Ok(out)
}
