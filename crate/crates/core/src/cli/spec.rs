//! Compact host and pattern specs, partitions and JSON inputs.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use decomp_lab::combinatorics::{ColouredMultigraph, Digraph, Hypergraph, Partition};
use decomp_lab::encodings::{
    large_set_instance, rainbow_family, resolvable_sts_instance, sudoku_host, sudoku_pattern, tight_cycle, triangle,
    DesignKind,
};
use decomp_lab::solver::{Family, Host};

/// An input problem, reported with exit code 3.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<decomp_lab::Error> for InputError {
    fn from(e: decomp_lab::Error) -> Self {
        InputError(e.to_string())
    }
}

pub type Input<T> = std::result::Result<T, InputError>;

pub struct HostSpec {
    pub host: Host,
    pub partition: Option<Partition>,
    /// Pattern and pattern partition fixed by the construction.
    pub implied: Option<(Family, Partition)>,
    /// Design kind and order for constructions that extract designs.
    pub design: Option<(DesignKind, usize)>,
}

pub struct PatternSpec {
    pub family: Family,
    pub partition: Option<Partition>,
}

/// Colon-separated tokens with their byte offsets.
struct Tokens<'a> {
    src: &'a str,
    parts: Vec<(usize, &'a str)>,
}

impl<'a> Tokens<'a> {
    fn new(src: &'a str) -> Self {
        let mut parts = Vec::new();
        let mut at = 0;
        for p in src.split(':') {
            parts.push((at, p));
            at += p.len() + 1;
        }
        Tokens { src, parts }
    }

    fn name(&self) -> &'a str {
        self.parts[0].1
    }

    fn err(&self, k: usize, what: &str) -> InputError {
        let pos = self.parts.get(k).map_or(self.src.len(), |p| p.0);
        InputError(format!("spec {:?}, position {pos}: {what}", self.src))
    }

    fn arity(&self, lo: usize, hi: usize) -> Input<()> {
        let got = self.parts.len() - 1;
        if got < lo {
            return Err(self.err(self.parts.len(), &format!("expected {lo} parameter(s)")));
        }
        if got > hi {
            return Err(self.err(hi + 1, "unexpected parameter"));
        }
        Ok(())
    }

    fn num(&self, k: usize) -> Input<usize> {
        let t = self.parts.get(k).ok_or_else(|| self.err(k, "missing integer"))?.1;
        t.parse().map_err(|_| self.err(k, &format!("expected a nonnegative integer, got {t:?}")))
    }

    fn num_or(&self, k: usize, default: usize) -> Input<usize> {
        if k < self.parts.len() {
            self.num(k)
        } else {
            Ok(default)
        }
    }
}

fn read_file(path: &str) -> Input<String> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))
}

fn json_value(path: &str) -> Input<serde_json::Value> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{path}: {e}")))
}

fn from_value<T: serde::de::DeserializeOwned>(path: &str, v: serde_json::Value) -> Input<T> {
    serde_json::from_value(v).map_err(|e| InputError(format!("{path}: {e}")))
}

fn is_file(s: &str) -> bool {
    Path::new(s).is_file()
}

pub fn parse_host(s: &str) -> Input<HostSpec> {
    if is_file(s) {
        let text = read_file(s)?;
        let host = Host::from_json(&text).map_err(|e| InputError(format!("{s}: {e}")))?;
        return Ok(HostSpec { host, partition: None, implied: None, design: None });
    }
    let t = Tokens::new(s);
    let plain = |host| HostSpec { host, partition: None, implied: None, design: None };
    match t.name() {
        "k_n" => {
            t.arity(1, 2)?;
            let n = t.num(1)?;
            let r = t.num_or(2, 2)?;
            if r == 0 {
                return Err(t.err(2, "uniformity must be positive"));
            }
            Ok(plain(Host::Hypergraph(Hypergraph::complete(n, r))))
        }
        "k3n" => {
            t.arity(1, 1)?;
            let (g, p) = triangle().uniform_blowup(t.num(1)?)?;
            Ok(HostSpec {
                host: Host::Hypergraph(g),
                partition: Some(p),
                implied: Some((Family::Hypergraph(vec![triangle()]), Partition::singletons(3))),
                design: None,
            })
        }
        "kqn" => {
            t.arity(2, 2)?;
            let q = t.num(1)?;
            if q < 2 {
                return Err(t.err(1, "need at least 2 parts"));
            }
            let k = Hypergraph::complete(q, 2);
            let (g, p) = k.uniform_blowup(t.num(2)?)?;
            Ok(HostSpec {
                host: Host::Hypergraph(g),
                partition: Some(p),
                implied: Some((Family::Hypergraph(vec![k]), Partition::singletons(q))),
                design: None,
            })
        }
        "kdn" => {
            t.arity(2, 2)?;
            let r = t.num(1)?;
            if r == 0 {
                return Err(t.err(1, "uniformity must be positive"));
            }
            Ok(plain(Host::Digraph(Digraph::complete(t.num(2)?, r))))
        }
        "kcol" => {
            t.arity(3, 3)?;
            let (n, d, seed) = (t.num(1)?, t.num(2)?, t.num(3)?);
            if d == 0 {
                return Err(t.err(2, "colour count must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
            let edges =
                Hypergraph::complete(n, 2).edges().iter().map(|e| (e.clone(), rng.gen_range(0..d))).collect::<Vec<_>>();
            Ok(plain(Host::Coloured(ColouredMultigraph::from_coloured_edges(n, 2, d, edges)?)))
        }
        "sudoku" => {
            t.arity(1, 1)?;
            let (g, p) = sudoku_host(t.num(1)?)?;
            Ok(HostSpec {
                host: Host::Hypergraph(g),
                partition: Some(p),
                implied: Some((Family::Hypergraph(vec![sudoku_pattern()]), Partition::singletons(6))),
                design: None,
            })
        }
        "resolvable" | "largeset" => {
            t.arity(1, 1)?;
            let n = t.num(1)?;
            let (inst, kind) = if t.name() == "resolvable" {
                (resolvable_sts_instance(n), DesignKind::ResolvableSts)
            } else {
                (large_set_instance(n), DesignKind::LargeSet)
            };
            let inst = inst.map_err(|e| t.err(1, &e.to_string()))?;
            Ok(HostSpec {
                host: Host::Hypergraph(inst.host),
                partition: Some(inst.host_partition),
                implied: Some((Family::Hypergraph(vec![inst.pattern]), inst.pattern_partition)),
                design: Some((kind, n)),
            })
        }
        _ => {
            Err(t.err(0, "unknown host spec and no such file (k_n, k3n, kqn, kdn, kcol, sudoku, resolvable, largeset)"))
        }
    }
}

fn family_from_json(path: &str) -> Input<Family> {
    Family::from_json(&read_file(path)?).map_err(|e| InputError(format!("{path}: {e}")))
}

pub fn parse_pattern(s: &str) -> Input<PatternSpec> {
    if is_file(s) {
        return Ok(PatternSpec { family: family_from_json(s)?, partition: None });
    }
    let t = Tokens::new(s);
    let one = |family| PatternSpec { family, partition: None };
    match t.name() {
        "triangle" => {
            t.arity(0, 0)?;
            Ok(one(Family::Hypergraph(vec![triangle()])))
        }
        "k_n" => {
            t.arity(1, 2)?;
            let q = t.num(1)?;
            let r = t.num_or(2, 2)?;
            if r == 0 || r > q {
                return Err(t.err(2, "need 1 <= r <= q"));
            }
            Ok(one(Family::Hypergraph(vec![Hypergraph::complete(q, r)])))
        }
        "cycle" => {
            t.arity(2, 2)?;
            let c = tight_cycle(t.num(1)?, t.num(2)?).map_err(|e| t.err(1, &e.to_string()))?;
            Ok(one(Family::Digraph(vec![c])))
        }
        "rainbow" => {
            t.arity(1, 1)?;
            let f = rainbow_family(t.num(1)?).map_err(|e| t.err(1, &e.to_string()))?;
            Ok(one(Family::Coloured(f)))
        }
        "sudoku" => {
            t.arity(0, 0)?;
            Ok(PatternSpec {
                family: Family::Hypergraph(vec![sudoku_pattern()]),
                partition: Some(Partition::singletons(6)),
            })
        }
        _ => Err(t.err(0, "unknown pattern spec and no such file (triangle, k_n, cycle, rainbow, sudoku)")),
    }
}

/// `"0,1,2|3"`, or a JSON partition file.
pub fn parse_partition(s: &str) -> Input<Partition> {
    if is_file(s) {
        let text = read_file(s)?;
        return Partition::from_json(&text).map_err(|e| InputError(format!("{s}: {e}")));
    }
    let mut parts = Vec::new();
    let mut at = 0;
    for chunk in s.split('|') {
        let mut part = Vec::new();
        let mut pos = at;
        for tok in chunk.split(',') {
            let v = tok
                .trim()
                .parse::<u32>()
                .map_err(|_| InputError(format!("partition {s:?}, position {pos}: expected a vertex, got {tok:?}")))?;
            part.push(v);
            pos += tok.len() + 1;
        }
        parts.push(part);
        at += chunk.len() + 1;
    }
    Ok(Partition::new(parts)?)
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_matrix(s: &str) -> Input<Vec<Vec<i64>>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut at = 0;
    let mut rows = Vec::new();
    for row in s.split(';') {
        rows.push(parse_vector_at(row, s, at)?);
        at += row.len() + 1;
    }
    Ok(rows)
}

pub fn parse_vector(s: &str) -> Input<Vec<i64>> {
    parse_vector_at(s, s, 0)
}

fn parse_vector_at(chunk: &str, whole: &str, offset: usize) -> Input<Vec<i64>> {
    let mut pos = offset;
    let mut out = Vec::new();
    for tok in chunk.split(',') {
        out.push(
            tok.trim()
                .parse::<i64>()
                .map_err(|_| InputError(format!("{whole:?}, position {pos}: expected an integer, got {tok:?}")))?,
        );
        pos += tok.len() + 1;
    }
    Ok(out)
}

pub fn read_json_file(path: &str) -> Input<serde_json::Value> {
    json_value(path)
}

pub fn read_text(path: &str) -> Input<String> {
    read_file(path)
}

pub fn decode<T: serde::de::DeserializeOwned>(path: &str, v: serde_json::Value) -> Input<T> {
    from_value(path, v)
}
