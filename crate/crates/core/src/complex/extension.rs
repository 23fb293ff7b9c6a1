use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::labelled::LabelledComplex;
use crate::error::{Error, Result};

/// A vertex `(i, x)` of `R(S)`: label `i`, copy `x`.
pub type TemplateVertex = (u32, u32);

/// A partite map `B -> R × S`, stored as `(i, x)` pairs sorted by label `i`; `ψ(i) = (i, x)`.
pub type TemplateEdge = Vec<TemplateVertex>;

/// Vertex budget for exact counting in [`CountMode::Auto`].
pub const DEFAULT_EXACT_LIMIT: usize = 4;

/// A restriction target `Φ^t ⊆ Φ`; edges outside its defined domains are unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RestrictionTarget {
    /// `{φ ∈ Φ : Im φ ∈ G^t}` for a set `G^t` of `size`-sets; defined only on `|B| = size`.
    ByImage { size: usize, images: BTreeSet<Vec<u32>> },
    /// Explicit layers keyed by domain bitmask; values listed in label order.
    Explicit { layers: BTreeMap<u32, BTreeSet<Vec<u32>>> },
}

impl RestrictionTarget {
    pub fn by_image(size: usize, images: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let images = images
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e
            })
            .collect();
        RestrictionTarget::ByImage { size, images }
    }

    pub fn is_defined(&self, mask: u32) -> bool {
        match self {
            RestrictionTarget::ByImage { size, .. } => mask.count_ones() as usize == *size,
            RestrictionTarget::Explicit { layers } => layers.contains_key(&mask),
        }
    }

    /// `None` when undefined on `mask`.
    pub fn contains(&self, mask: u32, values: &[u32]) -> Option<bool> {
        match self {
            RestrictionTarget::ByImage { size, images } => {
                if mask.count_ones() as usize != *size {
                    return None;
                }
                let mut s = values.to_vec();
                s.sort_unstable();
                Some(images.contains(&s))
            }
            RestrictionTarget::Explicit { layers } => layers.get(&mask).map(|l| l.contains(values)),
        }
    }
}

/// A `Φ`-extension `(J, F, φ)` of rank `s` with restriction classes `J' = (J^t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExtensionDoc", into = "ExtensionDoc")]
pub struct Extension {
    q: usize,
    rank: usize,
    template: BTreeSet<TemplateEdge>,
    roots: BTreeSet<TemplateVertex>,
    root_map: BTreeMap<TemplateVertex, u32>,
    restrictions: Vec<BTreeSet<TemplateEdge>>,
}

#[derive(Serialize, Deserialize)]
struct ExtensionDoc {
    q: usize,
    rank: usize,
    roots: Vec<(TemplateVertex, u32)>,
    new_vertices: Vec<TemplateVertex>,
    labelled_edges: Vec<TemplateEdge>,
    #[serde(default)]
    restriction_classes: Vec<Vec<TemplateEdge>>,
}

impl TryFrom<ExtensionDoc> for Extension {
    type Error = Error;
    fn try_from(d: ExtensionDoc) -> Result<Self> {
        let template = closure(d.labelled_edges);
        let vj = vertices_of(&template);
        let declared: BTreeSet<TemplateVertex> =
            d.roots.iter().map(|r| r.0).chain(d.new_vertices.iter().copied()).collect();
        if declared != vj {
            return Err(Error::Invalid("roots and new vertices must partition the template vertices".into()));
        }
        Extension::new(d.q, d.rank, template, d.roots.into_iter().collect(), d.restriction_classes)
    }
}

impl From<Extension> for ExtensionDoc {
    fn from(e: Extension) -> Self {
        let new_vertices = e.new_vertices();
        let labelled_edges = maximal(&e.template);
        ExtensionDoc {
            q: e.q,
            rank: e.rank,
            roots: e.root_map.into_iter().collect(),
            new_vertices,
            labelled_edges,
            restriction_classes: e.restrictions.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }
}

fn closure(edges: impl IntoIterator<Item = TemplateEdge>) -> BTreeSet<TemplateEdge> {
    let mut out = BTreeSet::new();
    for mut e in edges {
        e.sort_unstable();
        let k = e.len();
        for m in 0u32..(1 << k) {
            out.insert((0..k).filter(|&j| m & (1 << j) != 0).map(|j| e[j]).collect());
        }
    }
    out
}

fn maximal(template: &BTreeSet<TemplateEdge>) -> Vec<TemplateEdge> {
    let mut covered = BTreeSet::new();
    for e in template {
        for j in 0..e.len() {
            let mut f = e.clone();
            f.remove(j);
            covered.insert(f);
        }
    }
    template.iter().filter(|e| !covered.contains(*e)).cloned().collect()
}

fn vertices_of(template: &BTreeSet<TemplateEdge>) -> BTreeSet<TemplateVertex> {
    template.iter().flatten().copied().collect()
}

fn edge_mask(e: &TemplateEdge) -> u32 {
    e.iter().fold(0, |m, &(i, _)| m | (1 << i))
}

impl Extension {
    /// `template` must be restriction-closed; `roots` maps `F` to its images under `φ`.
    pub fn new(
        q: usize,
        rank: usize,
        template: BTreeSet<TemplateEdge>,
        roots: BTreeMap<TemplateVertex, u32>,
        restrictions: Vec<Vec<TemplateEdge>>,
    ) -> Result<Self> {
        if q >= 32 {
            return Err(Error::Invalid("label sets are limited to q < 32".into()));
        }
        for e in &template {
            if e.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::Invalid(format!("template edge {e:?} is not sorted by distinct labels")));
            }
            if e.iter().any(|&(i, x)| i as usize >= q || x as usize >= rank) {
                return Err(Error::Invalid(format!("template edge {e:?} leaves [q] × [s]")));
            }
        }
        if closure(template.iter().cloned()) != template {
            return Err(Error::Invalid("template is not restriction-closed".into()));
        }
        let vj = vertices_of(&template);
        if let Some(v) = roots.keys().find(|v| !vj.contains(v)) {
            return Err(Error::Invalid(format!("root {v:?} is not a template vertex")));
        }
        let images: BTreeSet<u32> = roots.values().copied().collect();
        if images.len() != roots.len() {
            return Err(Error::Invalid("root embedding is not injective".into()));
        }
        let root_set: BTreeSet<TemplateVertex> = roots.keys().copied().collect();
        let mut seen: BTreeSet<TemplateEdge> = BTreeSet::new();
        let mut classes = Vec::with_capacity(restrictions.len());
        for class in restrictions {
            let mut set = BTreeSet::new();
            for mut e in class {
                e.sort_unstable();
                if !template.contains(&e) {
                    return Err(Error::Invalid(format!("restricted edge {e:?} is not in the template")));
                }
                if e.iter().all(|v| root_set.contains(v)) {
                    return Err(Error::Invalid(format!("restricted edge {e:?} lies inside the roots")));
                }
                if !seen.insert(e.clone()) {
                    return Err(Error::Invalid(format!("restriction classes overlap at {e:?}")));
                }
                set.insert(e);
            }
            classes.push(set);
        }
        Ok(Extension { q, rank, template, roots: root_set, root_map: roots, restrictions: classes })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn template(&self) -> &BTreeSet<TemplateEdge> {
        &self.template
    }

    pub fn root_map(&self) -> &BTreeMap<TemplateVertex, u32> {
        &self.root_map
    }

    pub fn restrictions(&self) -> &[BTreeSet<TemplateEdge>] {
        &self.restrictions
    }

    /// `V(J) \ F` in sorted order.
    pub fn new_vertices(&self) -> Vec<TemplateVertex> {
        vertices_of(&self.template).into_iter().filter(|v| !self.roots.contains(v)).collect()
    }

    /// `v_E = |V(J) \ F|`.
    pub fn new_vertex_count(&self) -> usize {
        self.new_vertices().len()
    }

    /// Whether `φ` is a `Φ`-embedding of `J[F]`; the empty map always embeds.
    pub fn is_root_embedding(&self, phi: &LabelledComplex) -> bool {
        let verts: BTreeSet<u32> = phi.vertices().into_iter().collect();
        self.root_map.values().all(|v| verts.contains(v))
            && self.template.iter().filter(|e| !e.is_empty() && e.iter().all(|v| self.roots.contains(v))).all(|e| {
                let vals: Vec<u32> = e.iter().map(|v| self.root_map[v]).collect();
                phi.contains_parts(edge_mask(e), &vals)
            })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("extension serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// How `X_{E,J'}` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// Exhaustive backtracking; errors when `v_E` exceeds `limit`.
    Exact { limit: usize },
    /// Uniform sampling of injections of the new vertices.
    MonteCarlo { samples: usize, seed: u64 },
    /// Exact when `v_E ≤ exact_limit`, otherwise sampled.
    Auto { exact_limit: usize, samples: usize, seed: u64 },
}

impl Default for CountMode {
    fn default() -> Self {
        CountMode::Auto { exact_limit: DEFAULT_EXACT_LIMIT, samples: 20_000, seed: 0 }
    }
}

/// An extension count; `exact` is set in exhaustive mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountResult {
    pub exact: Option<u128>,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: Option<u64>,
    /// Some restricted edge met an undefined target and was left unconstrained.
    pub undefined_targets: bool,
}

struct Compiled {
    /// Constraints checked when new vertex `k` is placed: (mask, slots, target) with slots
    /// `Ok(root image)` or `Err(new index)`.
    checks: Vec<Vec<(u32, Vec<std::result::Result<u32, usize>>, Option<usize>)>>,
    pool: Vec<u32>,
    undefined: bool,
}

fn compile(phi: &LabelledComplex, e: &Extension, targets: &[RestrictionTarget]) -> Result<Compiled> {
    if targets.len() != e.restrictions.len() {
        return Err(Error::DimensionMismatch { expected: e.restrictions.len(), got: targets.len() });
    }
    if !e.is_root_embedding(phi) {
        return Err(Error::Invalid("root map is not an embedding of the rooted template".into()));
    }
    let new = e.new_vertices();
    let index: BTreeMap<TemplateVertex, usize> = new.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let mut target_of: BTreeMap<&TemplateEdge, usize> = BTreeMap::new();
    for (t, class) in e.restrictions.iter().enumerate() {
        for edge in class {
            target_of.insert(edge, t);
        }
    }
    let mut checks = vec![Vec::new(); new.len()];
    let mut undefined = false;
    for edge in &e.template {
        let last = edge.iter().filter_map(|v| index.get(v)).max();
        let Some(&last) = last else { continue };
        let mask = edge_mask(edge);
        let slots = edge.iter().map(|v| index.get(v).map_or_else(|| Ok(e.root_map[v]), |&k| Err(k))).collect();
        let t = target_of.get(edge).copied();
        if let Some(t) = t {
            if !targets[t].is_defined(mask) {
                undefined = true;
            }
        }
        checks[last].push((mask, slots, t));
    }
    let used: BTreeSet<u32> = e.root_map.values().copied().collect();
    let pool = phi.vertices().into_iter().filter(|v| !used.contains(v)).collect();
    Ok(Compiled { checks, pool, undefined })
}

fn placement_ok(
    phi: &LabelledComplex,
    targets: &[RestrictionTarget],
    c: &Compiled,
    k: usize,
    assigned: &[u32],
    buf: &mut Vec<u32>,
) -> bool {
    for (mask, slots, t) in &c.checks[k] {
        buf.clear();
        buf.extend(slots.iter().map(|s| match s {
            Ok(v) => *v,
            Err(j) => assigned[*j],
        }));
        if !phi.contains_parts(*mask, buf) {
            return false;
        }
        if let Some(t) = t {
            if targets[*t].contains(*mask, buf) == Some(false) {
                return false;
            }
        }
    }
    true
}

fn count_exact(phi: &LabelledComplex, targets: &[RestrictionTarget], c: &Compiled, v: usize) -> u128 {
    fn rec(
        phi: &LabelledComplex,
        targets: &[RestrictionTarget],
        c: &Compiled,
        v: usize,
        assigned: &mut Vec<u32>,
        used: &mut [bool],
        buf: &mut Vec<u32>,
    ) -> u128 {
        let k = assigned.len();
        if k == v {
            return 1;
        }
        let mut total = 0;
        for (p, &w) in c.pool.iter().enumerate() {
            if used[p] {
                continue;
            }
            assigned.push(w);
            if placement_ok(phi, targets, c, k, assigned, buf) {
                used[p] = true;
                total += rec(phi, targets, c, v, assigned, used, buf);
                used[p] = false;
            }
            assigned.pop();
        }
        total
    }
    let mut used = vec![false; c.pool.len()];
    rec(phi, targets, c, v, &mut Vec::with_capacity(v), &mut used, &mut Vec::new())
}

fn falling_f64(m: usize, v: usize) -> f64 {
    (0..v).map(|j| (m - j) as f64).product()
}

/// `X_{E,J'}(Φ, Φ')`; pass an empty `targets` slice when `E` has no restriction classes.
pub fn extension_count(
    phi: &LabelledComplex,
    e: &Extension,
    targets: &[RestrictionTarget],
    mode: CountMode,
) -> Result<CountResult> {
    let c = compile(phi, e, targets)?;
    let v = e.new_vertex_count();
    let (exact, samples, seed) = match mode {
        CountMode::Exact { limit } => {
            if v > limit {
                return Err(Error::BudgetExceeded(format!("exact count over {v} new vertices exceeds limit {limit}")));
            }
            (true, 0, 0)
        }
        CountMode::MonteCarlo { samples, seed } => (false, samples, seed),
        CountMode::Auto { exact_limit, samples, seed } => (v <= exact_limit, samples, seed),
    };
    if exact {
        let n = count_exact(phi, targets, &c, v);
        return Ok(CountResult {
            exact: Some(n),
            estimate: n as f64,
            std_error: 0.0,
            samples: 0,
            seed: None,
            undefined_targets: c.undefined,
        });
    }
    if samples == 0 {
        return Err(Error::Invalid("Monte-Carlo counting needs a positive sample count".into()));
    }
    let m = c.pool.len();
    if m < v {
        return Ok(CountResult {
            exact: Some(0),
            estimate: 0.0,
            std_error: 0.0,
            samples: 0,
            seed: Some(seed),
            undefined_targets: c.undefined,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = c.pool.clone();
    let mut buf = Vec::new();
    let mut assigned = Vec::with_capacity(v);
    let mut hits = 0usize;
    for _ in 0..samples {
        assigned.clear();
        let mut ok = true;
        for k in 0..v {
            let j = rng.gen_range(k..m);
            pool.swap(k, j);
            assigned.push(pool[k]);
            if ok && !placement_ok(phi, targets, &c, k, &assigned, &mut buf) {
                ok = false;
            }
        }
        if ok {
            hits += 1;
        }
    }
    let total = falling_f64(m, v);
    let p = hits as f64 / samples as f64;
    Ok(CountResult {
        exact: None,
        estimate: p * total,
        std_error: total * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed: Some(seed),
        undefined_targets: c.undefined,
    })
}

/// Which rank-`s` extensions [`is_extendable`] checks.
///
/// Roots are `R × [s-1]`; each template adds new vertices `N ⊆ R × {s-1}` with
/// `1 ≤ |N| ≤ max_new` and takes every partite map with image in the roots and `N`.
/// Every non-root edge is assigned to a target defined on its domain.
#[derive(Clone, Debug)]
pub struct TemplateLibrary {
    pub max_new: usize,
    pub root_budget: usize,
    pub assignment_budget: usize,
    pub seed: u64,
    pub count_mode: CountMode,
    /// Additional templates; their root maps are used as given.
    pub extra: Vec<Extension>,
}

impl Default for TemplateLibrary {
    fn default() -> Self {
        TemplateLibrary {
            max_new: 3,
            root_budget: 16,
            assignment_budget: 32,
            seed: 0,
            count_mode: CountMode::default(),
            extra: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendabilityReport {
    pub extendable: bool,
    pub checked: usize,
    /// Minimum of `X_{E,J'} / |V(Φ)|^{v_E}` over checked extensions.
    pub min_ratio: Option<f64>,
    pub worst: Option<String>,
    pub undefined_targets: bool,
    pub sampled: bool,
}

/// Checks `X_{E,J'} ≥ ω |V(Φ)|^{v_E}` over the template library; extensions adding
/// vertices to a vertex-free complex always fail.
pub fn is_extendable(
    phi: &LabelledComplex,
    targets: &[RestrictionTarget],
    omega: f64,
    s: usize,
    lib: &TemplateLibrary,
) -> Result<ExtendabilityReport> {
    if s == 0 {
        return Err(Error::Invalid("extension rank must be positive".into()));
    }
    let q = phi.label_count();
    let nv = phi.vertices().len();
    let mut rng = ChaCha8Rng::seed_from_u64(lib.seed);
    let mut report = ExtendabilityReport {
        extendable: true,
        checked: 0,
        min_ratio: None,
        worst: None,
        undefined_targets: false,
        sampled: false,
    };
    let mut candidates: Vec<Extension> = Vec::new();
    let roots: Vec<TemplateVertex> = (0..q as u32).flat_map(|i| (0..s as u32 - 1).map(move |x| (i, x))).collect();
    let root_template = partite_maps(q, &roots);
    let root_maps = root_embeddings(phi, &roots, &root_template, lib, &mut rng, &mut report.sampled);
    let top = s as u32 - 1;
    for size in 1..=lib.max_new.min(q) {
        for new in crate::combinatorics::util::k_subsets(&(0..q as u32).collect::<Vec<_>>(), size) {
            let mut verts = roots.clone();
            verts.extend(new.iter().map(|&i| (i, top)));
            let template = partite_maps(q, &verts);
            for rm in &root_maps {
                let map: BTreeMap<TemplateVertex, u32> = roots.iter().copied().zip(rm.iter().copied()).collect();
                for classes in assignments(&template, &roots, targets, lib, &mut rng, &mut report.sampled) {
                    candidates.push(Extension::new(q, s, template.clone(), map.clone(), classes)?);
                }
            }
        }
    }
    candidates.extend(lib.extra.iter().cloned());
    for e in &candidates {
        let v = e.new_vertex_count();
        let res = if e.is_root_embedding(phi) {
            let t: Vec<RestrictionTarget> = if e.restrictions.is_empty() { Vec::new() } else { targets.to_vec() };
            extension_count(phi, e, &t, lib.count_mode)?
        } else {
            continue;
        };
        report.checked += 1;
        report.undefined_targets |= res.undefined_targets;
        report.sampled |= res.exact.is_none();
        let denom = (nv as f64).powi(v as i32);
        let ratio = if denom == 0.0 {
            if res.estimate > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            res.estimate / denom
        };
        let dense = if v > 0 && nv == 0 { false } else { res.estimate >= omega * denom };
        if report.min_ratio.is_none_or(|m| ratio < m) {
            report.min_ratio = Some(ratio);
            report.worst = Some(describe(e, &res));
        }
        if !dense {
            report.extendable = false;
        }
    }
    Ok(report)
}

fn describe(e: &Extension, res: &CountResult) -> String {
    format!(
        "roots {:?}, new vertices {:?}, {} restricted edges, count {}",
        e.root_map.iter().collect::<Vec<_>>(),
        e.new_vertices(),
        e.restrictions.iter().map(|c| c.len()).sum::<usize>(),
        res.exact.map_or_else(|| format!("~{:.1}", res.estimate), |x| x.to_string()),
    )
}

/// Every partite map from some `B ⊆ [q]` into `verts`.
fn partite_maps(q: usize, verts: &[TemplateVertex]) -> BTreeSet<TemplateEdge> {
    let mut out = BTreeSet::new();
    let mut cur = Vec::new();
    fn rec(q: u32, i: u32, verts: &[TemplateVertex], cur: &mut TemplateEdge, out: &mut BTreeSet<TemplateEdge>) {
        if i == q {
            out.insert(cur.clone());
            return;
        }
        rec(q, i + 1, verts, cur, out);
        for &(j, x) in verts {
            if j == i {
                cur.push((i, x));
                rec(q, i + 1, verts, cur, out);
                cur.pop();
            }
        }
    }
    rec(q as u32, 0, verts, &mut cur, &mut out);
    out
}

fn root_embeddings(
    phi: &LabelledComplex,
    roots: &[TemplateVertex],
    template: &BTreeSet<TemplateEdge>,
    lib: &TemplateLibrary,
    rng: &mut ChaCha8Rng,
    sampled: &mut bool,
) -> Vec<Vec<u32>> {
    if roots.is_empty() {
        return vec![Vec::new()];
    }
    let verts = phi.vertices();
    let pos: BTreeMap<TemplateVertex, usize> = roots.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let mut checks: Vec<Vec<(u32, Vec<usize>)>> = vec![Vec::new(); roots.len()];
    for e in template {
        if let Some(last) = e.iter().map(|v| pos[v]).max() {
            checks[last].push((edge_mask(e), e.iter().map(|v| pos[v]).collect()));
        }
    }
    let ok = |k: usize, a: &[u32], buf: &mut Vec<u32>| {
        checks[k].iter().all(|(m, slots)| {
            buf.clear();
            buf.extend(slots.iter().map(|&j| a[j]));
            phi.contains_parts(*m, buf)
        })
    };
    let mut out = Vec::new();
    let mut buf = Vec::new();
    fn dfs(
        verts: &[u32],
        k: usize,
        n: usize,
        a: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        cap: usize,
        ok: &dyn Fn(usize, &[u32], &mut Vec<u32>) -> bool,
        buf: &mut Vec<u32>,
    ) {
        if out.len() > cap {
            return;
        }
        if k == n {
            out.push(a.clone());
            return;
        }
        for &w in verts {
            if a.contains(&w) {
                continue;
            }
            a.push(w);
            if ok(k, a, buf) {
                dfs(verts, k + 1, n, a, out, cap, ok, buf);
            }
            a.pop();
        }
    }
    dfs(&verts, 0, roots.len(), &mut Vec::new(), &mut out, lib.root_budget, &ok, &mut buf);
    if out.len() <= lib.root_budget {
        return out;
    }
    *sampled = true;
    let mut picked = BTreeSet::new();
    let attempts = lib.root_budget.saturating_mul(200);
    for _ in 0..attempts {
        if picked.len() >= lib.root_budget {
            break;
        }
        let mut a: Vec<u32> = Vec::with_capacity(roots.len());
        let mut good = true;
        for k in 0..roots.len() {
            let free: Vec<u32> = verts.iter().copied().filter(|w| !a.contains(w)).collect();
            if free.is_empty() {
                good = false;
                break;
            }
            a.push(free[rng.gen_range(0..free.len())]);
            if !ok(k, &a, &mut buf) {
                good = false;
                break;
            }
        }
        if good {
            picked.insert(a);
        }
    }
    if picked.is_empty() {
        out.truncate(lib.root_budget);
        return out;
    }
    picked.into_iter().collect()
}

fn assignments(
    template: &BTreeSet<TemplateEdge>,
    roots: &[TemplateVertex],
    targets: &[RestrictionTarget],
    lib: &TemplateLibrary,
    rng: &mut ChaCha8Rng,
    sampled: &mut bool,
) -> Vec<Vec<Vec<TemplateEdge>>> {
    if targets.is_empty() {
        return vec![Vec::new()];
    }
    let root_set: BTreeSet<&TemplateVertex> = roots.iter().collect();
    let slots: Vec<(&TemplateEdge, Vec<usize>)> = template
        .iter()
        .filter(|e| !e.iter().all(|v| root_set.contains(v)))
        .map(|e| (e, (0..targets.len()).filter(|&t| targets[t].is_defined(edge_mask(e))).collect::<Vec<_>>()))
        .filter(|(_, ts)| !ts.is_empty())
        .collect();
    let total = slots.iter().try_fold(1usize, |acc, (_, ts)| acc.checked_mul(ts.len()));
    let build = |choice: &[usize]| {
        let mut classes = vec![Vec::new(); targets.len()];
        for ((e, ts), &c) in slots.iter().zip(choice) {
            classes[ts[c]].push((*e).clone());
        }
        classes
    };
    match total {
        Some(t) if t <= lib.assignment_budget => {
            let mut out = Vec::with_capacity(t);
            let mut choice = vec![0usize; slots.len()];
            loop {
                out.push(build(&choice));
                let mut k = 0;
                while k < slots.len() {
                    choice[k] += 1;
                    if choice[k] < slots[k].1.len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == slots.len() {
                    break;
                }
            }
            out
        }
        _ => {
            *sampled = true;
            (0..lib.assignment_budget)
                .map(|_| {
                    let choice: Vec<usize> = slots.iter().map(|(_, ts)| rng.gen_range(0..ts.len())).collect();
                    build(&choice)
                })
                .collect()
        }
    }
}
