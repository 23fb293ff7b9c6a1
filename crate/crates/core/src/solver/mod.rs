//! Copy enumeration, exact decomposition search, counting, certificate checks and
//! integral decompositions.
//!
//! Hosts and patterns are reduced to atoms: an edge (sorted) or arc (ordered) with a
//! colour, carrying a capacity in the host and a multiplicity in a pattern.

mod cover;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::{ColouredMultigraph, Digraph, Hypergraph, Partition};
use crate::divisibility::MultiDigraph;
use crate::error::{Error, Result};
use crate::lattice::integral::integral_combination;
use cover::{Cover, Stop};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

/// An edge or arc of a host with one colour.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub verts: Vec<u32>,
    pub colour: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Host {
    Hypergraph(Hypergraph),
    Coloured(ColouredMultigraph),
    Digraph(Digraph),
    MultiDigraph(MultiDigraph),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Hypergraph(Vec<Hypergraph>),
    Coloured(Vec<ColouredMultigraph>),
    Digraph(Vec<Digraph>),
}

/// Pattern parts must land in the matching host parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartiteConstraint {
    pub pattern: Partition,
    pub host: Partition,
}

impl Host {
    pub fn vertex_count(&self) -> usize {
        match self {
            Host::Hypergraph(g) => g.vertex_count(),
            Host::Coloured(g) => g.vertex_count(),
            Host::Digraph(g) => g.vertex_count(),
            Host::MultiDigraph(g) => g.vertex_count(),
        }
    }

    pub fn uniformity(&self) -> usize {
        match self {
            Host::Hypergraph(g) => g.uniformity(),
            Host::Coloured(g) => g.uniformity(),
            Host::Digraph(g) => g.uniformity(),
            Host::MultiDigraph(g) => g.uniformity(),
        }
    }

    fn colours(&self) -> usize {
        match self {
            Host::Hypergraph(_) => 1,
            Host::Coloured(g) => g.colour_count(),
            Host::Digraph(g) => g.colour_count(),
            Host::MultiDigraph(g) => g.colour_count(),
        }
    }

    pub fn is_ordered(&self) -> bool {
        matches!(self, Host::Digraph(_) | Host::MultiDigraph(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Host::Hypergraph(_) => "hypergraph",
            Host::Coloured(_) => "coloured",
            Host::Digraph(_) => "digraph",
            Host::MultiDigraph(_) => "multidigraph",
        }
    }

    /// Atoms with positive capacity, in canonical order.
    pub fn atoms(&self) -> BTreeMap<Atom, u64> {
        match self {
            Host::Hypergraph(g) => g.edges().iter().map(|e| (Atom { verts: e.clone(), colour: 0 }, 1)).collect(),
            Host::Coloured(g) => g
                .entries()
                .flat_map(|(e, m)| {
                    m.iter()
                        .enumerate()
                        .filter(|(_, &x)| x > 0)
                        .map(|(d, &x)| (Atom { verts: e.clone(), colour: d }, x))
                })
                .collect(),
            Host::Digraph(g) => g.arcs_with_colours().map(|(a, d)| (Atom { verts: a.clone(), colour: d }, 1)).collect(),
            Host::MultiDigraph(g) => g.arcs().map(|(a, d, m)| (Atom { verts: a.clone(), colour: d }, m)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Host::Hypergraph(g) => serde_json::to_string(g),
            Host::Coloured(g) => serde_json::to_string(g),
            Host::Digraph(g) => serde_json::to_string(g),
            Host::MultiDigraph(g) => {
                let mut v = serde_json::to_value(g).expect("multidigraph serializes");
                v["type"] = "multidigraph".into();
                serde_json::to_string(&v)
            }
        }
        .expect("host serializes")
    }

    /// Dispatches on the `type` field.
    pub fn from_json(s: &str) -> Result<Self> {
        let mut v: serde_json::Value = serde_json::from_str(s)?;
        let kind = v.get("type").and_then(|t| t.as_str()).unwrap_or("").to_string();
        Ok(match kind.as_str() {
            "hypergraph" => Host::Hypergraph(serde_json::from_value(v)?),
            "coloured" => Host::Coloured(serde_json::from_value(v)?),
            "digraph" => Host::Digraph(serde_json::from_value(v)?),
            "multidigraph" => {
                v.as_object_mut().expect("object with type").remove("type");
                Host::MultiDigraph(serde_json::from_value(v)?)
            }
            other => return Err(Error::Invalid(format!("unknown host type {other:?}"))),
        })
    }
}

impl Family {
    pub fn len(&self) -> usize {
        match self {
            Family::Hypergraph(f) => f.len(),
            Family::Coloured(f) => f.len(),
            Family::Digraph(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One pattern object or an array of them, dispatched on the first `type` field.
    pub fn from_json(s: &str) -> Result<Self> {
        let items = match serde_json::from_str::<serde_json::Value>(s)? {
            serde_json::Value::Array(items) => items,
            one => vec![one],
        };
        let kind = items.first().and_then(|x| x.get("type")).and_then(|t| t.as_str()).unwrap_or("").to_string();
        let v = serde_json::Value::Array(items);
        Ok(match kind.as_str() {
            "hypergraph" => Family::Hypergraph(serde_json::from_value(v)?),
            "coloured" => Family::Coloured(serde_json::from_value(v)?),
            "digraph" => Family::Digraph(serde_json::from_value(v)?),
            other => return Err(Error::Invalid(format!("unknown pattern type {other:?}"))),
        })
    }

    pub fn to_json(&self) -> String {
        match self {
            Family::Hypergraph(f) => serde_json::to_string(f),
            Family::Coloured(f) => serde_json::to_string(f),
            Family::Digraph(f) => serde_json::to_string(f),
        }
        .expect("family serializes")
    }

    /// Each pattern's atoms with multiplicities, on its own vertex set.
    fn atom_lists(&self) -> Vec<Vec<(Atom, u64)>> {
        match self {
            Family::Hypergraph(f) => {
                f.iter().map(|h| Host::Hypergraph(h.clone()).atoms().into_iter().collect()).collect()
            }
            Family::Coloured(f) => f.iter().map(|h| Host::Coloured(h.clone()).atoms().into_iter().collect()).collect(),
            Family::Digraph(f) => f.iter().map(|h| Host::Digraph(h.clone()).atoms().into_iter().collect()).collect(),
        }
    }

    fn shape(&self) -> Vec<(usize, usize, usize)> {
        match self {
            Family::Hypergraph(f) => f.iter().map(|h| (h.vertex_count(), h.uniformity(), 1)).collect(),
            Family::Coloured(f) => f.iter().map(|h| (h.vertex_count(), h.uniformity(), h.colour_count())).collect(),
            Family::Digraph(f) => f.iter().map(|h| (h.vertex_count(), h.uniformity(), h.colour_count())).collect(),
        }
    }

    fn matches(&self, host: &Host) -> bool {
        matches!(
            (self, host),
            (Family::Hypergraph(_), Host::Hypergraph(_))
                | (Family::Coloured(_), Host::Coloured(_))
                | (Family::Digraph(_), Host::Digraph(_) | Host::MultiDigraph(_))
        )
    }
}

/// One distinct footprint with a representative embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyRow {
    pub pattern: usize,
    /// Lexicographically least embedding producing this footprint.
    pub embedding: Vec<u32>,
    /// `(atom index, multiplicity)`, ascending.
    pub footprint: Vec<(usize, u64)>,
    /// Number of (pattern, embedding) pairs with this footprint.
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyTable {
    /// Host atoms first (canonical order), then any ambient-only atoms.
    pub atoms: Vec<Atom>,
    /// Host capacity per atom; zero for ambient-only atoms.
    pub capacity: Vec<u64>,
    /// Sorted by footprint.
    pub copies: Vec<CopyRow>,
    /// Partial and complete maps visited.
    pub candidate_maps: u64,
}

impl CopyTable {
    pub fn host_atoms(&self) -> usize {
        self.capacity.iter().take_while(|&&c| c > 0).count()
    }

    pub fn footprint_atoms(&self, k: usize) -> Vec<(Atom, u64)> {
        self.copies[k].footprint.iter().map(|&(a, m)| (self.atoms[a].clone(), m)).collect()
    }
}

fn check_inputs(host: &Host, family: &Family, constraint: Option<&PartiteConstraint>) -> Result<usize> {
    if family.is_empty() {
        return Err(Error::Invalid("pattern family is empty".into()));
    }
    if !family.matches(host) {
        return Err(Error::Invalid(format!("pattern family does not match a {} host", host.kind())));
    }
    let shape = family.shape();
    let q = shape[0].0;
    for &(qq, r, d) in &shape {
        if qq != q {
            return Err(Error::Invalid("patterns must share a vertex set".into()));
        }
        if r != host.uniformity() {
            return Err(Error::DimensionMismatch { expected: host.uniformity(), got: r });
        }
        if d != host.colours() {
            return Err(Error::DimensionMismatch { expected: host.colours(), got: d });
        }
    }
    if let Some(c) = constraint {
        if c.pattern.vertex_count() != q || c.host.vertex_count() != host.vertex_count() {
            return Err(Error::InvalidPartition("partition sizes do not match pattern and host".into()));
        }
        if c.pattern.part_count() != c.host.part_count() {
            return Err(Error::InvalidPartition("pattern and host partitions differ in part count".into()));
        }
    }
    Ok(q)
}

/// Pattern atoms grouped by the pattern vertex completing them in assignment order.
struct Plan {
    by_last: Vec<Vec<(Vec<u32>, usize, u64)>>,
}

fn plan(atoms: &[(Atom, u64)], q: usize) -> Plan {
    let mut by_last = vec![Vec::new(); q];
    for (a, m) in atoms {
        if let Some(&last) = a.verts.iter().max() {
            by_last[last as usize].push((a.verts.clone(), a.colour, *m));
        }
    }
    Plan { by_last }
}

struct Enumerator<'a> {
    ordered: bool,
    allowed: Vec<Vec<u32>>,
    host: &'a HashMap<Atom, u64>,
    ambient: bool,
    budget: u64,
    visited: u64,
}

impl Enumerator<'_> {
    fn image(&self, verts: &[u32], phi: &[u32], colour: usize) -> Atom {
        let mut v: Vec<u32> = verts.iter().map(|&x| phi[x as usize]).collect();
        if !self.ordered {
            v.sort_unstable();
        }
        Atom { verts: v, colour }
    }

    fn walk(&mut self, p: &Plan, phi: &mut Vec<u32>, used: &mut [bool], out: &mut dyn FnMut(&[u32])) -> Result<()> {
        let v = phi.len();
        if v == self.allowed.len() {
            out(phi);
            return Ok(());
        }
        for k in 0..self.allowed[v].len() {
            let w = self.allowed[v][k];
            if used[w as usize] {
                continue;
            }
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::BudgetExceeded(format!("more than {} candidate maps", self.budget)));
            }
            phi.push(w);
            let fits = self.ambient
                || p.by_last[v]
                    .iter()
                    .all(|(verts, d, m)| self.host.get(&self.image(verts, phi, *d)).is_some_and(|c| c >= m));
            if fits {
                used[w as usize] = true;
                self.walk(p, phi, used, out)?;
                used[w as usize] = false;
            }
            phi.pop();
        }
        Ok(())
    }
}

fn build_table(
    host: &Host,
    family: &Family,
    constraint: Option<&PartiteConstraint>,
    budget: u64,
    ambient: bool,
) -> Result<CopyTable> {
    let q = check_inputs(host, family, constraint)?;
    let n = host.vertex_count();
    let host_atoms = host.atoms();
    let mut atoms: Vec<Atom> = host_atoms.keys().cloned().collect();
    let mut capacity: Vec<u64> = host_atoms.values().copied().collect();
    let mut index: HashMap<Atom, usize> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let lookup: HashMap<Atom, u64> = host_atoms.into_iter().collect();
    let allowed: Vec<Vec<u32>> = (0..q)
        .map(|v| match constraint {
            Some(c) => c.host.part(c.pattern.part_of(v as u32)).to_vec(),
            None => (0..n as u32).collect(),
        })
        .collect();
    let mut e = Enumerator { ordered: host.is_ordered(), allowed, host: &lookup, ambient, budget, visited: 0 };
    let mut rows: HashMap<Vec<(usize, u64)>, usize> = HashMap::new();
    let mut copies: Vec<CopyRow> = Vec::new();
    for (pi, pat) in family.atom_lists().iter().enumerate() {
        let p = plan(pat, q);
        let mut found: Vec<Vec<u32>> = Vec::new();
        e.walk(&p, &mut Vec::with_capacity(q), &mut vec![false; n], &mut |phi| found.push(phi.to_vec()))?;
        for phi in found {
            let mut fp: Vec<(usize, u64)> = pat
                .iter()
                .map(|(a, m)| {
                    let img = e.image(&a.verts, &phi, a.colour);
                    let next = index.len();
                    let id = *index.entry(img.clone()).or_insert_with(|| {
                        atoms.push(img);
                        capacity.push(0);
                        next
                    });
                    (id, *m)
                })
                .collect();
            fp.sort_unstable();
            match rows.get(&fp) {
                Some(&k) => copies[k].multiplicity += 1,
                None => {
                    rows.insert(fp.clone(), copies.len());
                    copies.push(CopyRow { pattern: pi, embedding: phi, footprint: fp, multiplicity: 1 });
                }
            }
        }
    }
    copies.sort_by(|a, b| a.footprint.cmp(&b.footprint));
    Ok(CopyTable { atoms, capacity, copies, candidate_maps: e.visited })
}

/// All copies whose footprint fits inside the host, one row per distinct footprint.
pub fn enumerate_copies(
    host: &Host,
    family: &Family,
    constraint: Option<&PartiteConstraint>,
    budget: u64,
) -> Result<CopyTable> {
    build_table(host, family, constraint, budget, false)
}

/// All copies in the ambient complete host on the same vertices and colours.
pub fn enumerate_ambient_copies(
    host: &Host,
    family: &Family,
    constraint: Option<&PartiteConstraint>,
    budget: u64,
) -> Result<CopyTable> {
    build_table(host, family, constraint, budget, true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub pattern: usize,
    pub embedding: Vec<u32>,
}

/// Placements, unit weights unless `weights` is given.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub placements: Vec<Placement>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "weights_out",
        deserialize_with = "weights_in"
    )]
    pub weights: Option<Vec<BigInt>>,
}

fn weights_out<S: Serializer>(w: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match w {
        Some(v) => s.collect_seq(v.iter().map(|x| x.to_string())),
        None => s.serialize_none(),
    }
}

fn weights_in<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<BigInt>>, D::Error> {
    let raw: Option<Vec<String>> = Option::deserialize(d)?;
    raw.map(|v| v.iter().map(|x| x.parse::<BigInt>().map_err(serde::de::Error::custom)).collect()).transpose()
}

impl Certificate {
    /// Copy embeddings, in placement order.
    pub fn embeddings(&self) -> Vec<Vec<u32>> {
        self.placements.iter().map(|p| p.embedding.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Certificate),
    ProvenNone,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub copies: usize,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub budget: u64,
    pub timeout: Option<Duration>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { budget: DEFAULT_BUDGET, timeout: Some(DEFAULT_TIMEOUT) }
    }
}

fn cover_for(table: &CopyTable) -> Cover {
    Cover::new(table.capacity.clone(), table.copies.iter().map(|c| c.footprint.clone()).collect())
}

/// Exact-cover search for a decomposition; the first solution in the fixed order is returned.
pub fn find_decomposition(
    host: &Host,
    family: &Family,
    constraint: Option<&PartiteConstraint>,
    config: &SolveConfig,
) -> Result<SolveReport> {
    let start = Instant::now();
    let table = enumerate_copies(host, family, constraint, config.budget)?;
    let mut cover = cover_for(&table).with_limits(config.timeout.map(|t| start + t), None);
    let mut found: Option<Vec<usize>> = None;
    let stop = cover.run(&mut |s| {
        found = Some(s.to_vec());
        true
    });
    let outcome = match (stop, found) {
        (_, Some(mut rows)) => {
            rows.sort_unstable();
            let placements = rows
                .iter()
                .map(|&k| Placement { pattern: table.copies[k].pattern, embedding: table.copies[k].embedding.clone() })
                .collect();
            Outcome::Found(Certificate { placements, weights: None })
        }
        (Stop::Exhausted, None) => Outcome::ProvenNone,
        _ => Outcome::Timeout,
    };
    Ok(SolveReport { outcome, copies: table.copies.len(), nodes: cover.nodes, elapsed: start.elapsed() })
}

/// Number of distinct decompositions as multisets of footprints.
pub fn count_decompositions(
    host: &Host,
    family: &Family,
    constraint: Option<&PartiteConstraint>,
    config: &SolveConfig,
) -> Result<BigUint> {
    let start = Instant::now();
    let table = enumerate_copies(host, family, constraint, config.budget)?;
    let mut cover = cover_for(&table).with_limits(config.timeout.map(|t| start + t), None);
    let mut count: u64 = 0;
    match cover.run(&mut |_| {
        count += 1;
        false
    }) {
        Stop::Exhausted => Ok(BigUint::from(count)),
        _ => Err(Error::BudgetExceeded(format!("counting stopped after {count} decompositions"))),
    }
}

/// An atom whose certified total differs from the host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomMismatch {
    pub atom: Atom,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deficit: Option<AtomMismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surplus: Option<AtomMismatch>,
}

impl VerifyReport {
    fn fail(msg: String) -> Self {
        VerifyReport { valid: false, error: Some(msg), ..Default::default() }
    }
}

/// Recomputes every footprint and compares the weighted sum with the host atom by atom.
pub fn verify_certificate(
    host: &Host,
    family: &Family,
    constraint: Option<&PartiteConstraint>,
    cert: &Certificate,
) -> VerifyReport {
    let q = match check_inputs(host, family, constraint) {
        Ok(q) => q,
        Err(e) => return VerifyReport::fail(e.to_string()),
    };
    if let Some(w) = &cert.weights {
        if w.len() != cert.placements.len() {
            return VerifyReport::fail(format!("{} weights for {} placements", w.len(), cert.placements.len()));
        }
    }
    let patterns = family.atom_lists();
    let n = host.vertex_count() as u32;
    let mut sum: BTreeMap<Atom, BigInt> = BTreeMap::new();
    for (k, p) in cert.placements.iter().enumerate() {
        let Some(pat) = patterns.get(p.pattern) else {
            return VerifyReport::fail(format!("placement {k}: no pattern {}", p.pattern));
        };
        let phi = &p.embedding;
        let mut seen = phi.clone();
        seen.sort_unstable();
        seen.dedup();
        if phi.len() != q || seen.len() != q || phi.iter().any(|&v| v >= n) {
            return VerifyReport::fail(format!("placement {k}: {phi:?} is not an injection into the host"));
        }
        if let Some(c) = constraint {
            if (0..q).any(|v| c.host.part_of(phi[v]) != c.pattern.part_of(v as u32)) {
                return VerifyReport::fail(format!("placement {k}: {phi:?} violates the partition"));
            }
        }
        let w = cert.weights.as_ref().map_or_else(|| BigInt::from(1), |w| w[k].clone());
        for (a, m) in pat {
            let mut v: Vec<u32> = a.verts.iter().map(|&x| phi[x as usize]).collect();
            if !host.is_ordered() {
                v.sort_unstable();
            }
            *sum.entry(Atom { verts: v, colour: a.colour }).or_default() += &w * BigInt::from(*m);
        }
    }
    let target = host.atoms();
    let mut report = VerifyReport { valid: true, ..Default::default() };
    let keys: std::collections::BTreeSet<&Atom> = sum.keys().chain(target.keys()).collect();
    for a in keys {
        let want = BigInt::from(target.get(a).copied().unwrap_or(0));
        let got = sum.get(a).cloned().unwrap_or_else(BigInt::zero);
        if want != got {
            report.valid = false;
            let m = AtomMismatch { atom: a.clone(), expected: want.to_string(), got: got.to_string() };
            if got < want {
                report.deficit.get_or_insert(m);
            } else {
                report.surplus.get_or_insert(m);
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralReport {
    pub exists: bool,
    pub rank: usize,
    pub copies: usize,
    /// Nonzero signed weights, present when a witness was tracked.
    pub certificate: Option<Certificate>,
}

/// Whether the host is an integer combination of copies in the ambient complete host.
pub fn integral_decomposition_exists(
    host: &Host,
    family: &Family,
    constraint: Option<&PartiteConstraint>,
    budget: u64,
) -> Result<IntegralReport> {
    let table = enumerate_ambient_copies(host, family, constraint, budget)?;
    let rows: Vec<Vec<(usize, i64)>> =
        table.copies.iter().map(|c| c.footprint.iter().map(|&(a, m)| (a, m as i64)).collect()).collect();
    let target: Vec<i64> = table.capacity.iter().map(|&c| c as i64).collect();
    let out = integral_combination(table.atoms.len(), &rows, &target)?;
    let certificate = out.witness.map(|w| {
        let (placements, weights): (Vec<_>, Vec<_>) = w
            .into_iter()
            .zip(&table.copies)
            .filter(|(x, _)| !x.is_zero())
            .map(|(x, c)| (Placement { pattern: c.pattern, embedding: c.embedding.clone() }, x))
            .unzip();
        Certificate { placements, weights: Some(weights) }
    });
    Ok(IntegralReport { exists: out.exists, rank: out.rank, copies: table.copies.len(), certificate })
}
