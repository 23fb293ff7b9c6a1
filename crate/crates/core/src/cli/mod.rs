//! `decomp-lab` command line: argument model, dispatch and report rendering.

mod spec;

use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use decomp_lab::combinatorics::{Hypergraph, Partition};
use decomp_lab::complex::typical::{is_typical, parse_rational, TypicalityMode, TypicalityOptions};
use decomp_lab::divisibility::{
    canonical_family_check, coloured_balanced, coloured_divisible, digraph_divisible, h_divisible, hp_divisible,
    master_divisible, shift_regular, steiner_divisible, MultiDigraph,
};
use decomp_lab::encodings::{
    extract_large_set, extract_resolvable, latin_decode, latin_encode, mols_decode, mols_encode, sudoku_decode,
    sudoku_encode, verify_design, DesignCertificate, DesignKind, LatinSquare, SudokuGrid,
};
use decomp_lab::lattice::{hermite_normal_form, span_membership_i64, IntMatrix};
use decomp_lab::nibble::{bounds_from, build_auxiliary, random_greedy, typicality_track, StopRule};
use decomp_lab::solver::{
    count_decompositions, find_decomposition, integral_decomposition_exists, verify_certificate, Certificate, Family,
    Host, Outcome, PartiteConstraint, Placement, SolveConfig, DEFAULT_BUDGET,
};
use spec::{parse_host, parse_matrix, parse_partition, parse_pattern, parse_vector, HostSpec, Input, InputError};

#[derive(Parser, Serialize, Debug)]
#[command(
    name = "decomp-lab",
    version,
    about = "Divisibility checks, exact decomposition search and the random greedy matching process"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Candidate-map budget for copy enumeration (overrides DECOMP_LAB_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Run a divisibility or balance checker.
    Check(CheckArgs),
    /// Search for a decomposition.
    Solve(SolveArgs),
    /// Count decompositions exactly.
    Count(ProblemArgs),
    /// Check a certificate independently of the solver.
    Verify(VerifyArgs),
    /// Turn a Latin square, MOLS pair or Sudoku grid into pattern copies.
    Encode(EncodeArgs),
    /// Turn pattern copies back into a design.
    Decode(DecodeArgs),
    /// Run the random greedy matching process.
    Nibble(NibbleArgs),
    /// Check (c,s)-typicality of a host.
    Typicality(TypicalityArgs),
    /// Integer span membership and Hermite normal form.
    Lattice(LatticeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CheckKind {
    Steiner,
    H,
    Hp,
    Coloured,
    Balanced,
    Digraph,
    Master,
}

#[derive(Args, Serialize, Debug)]
struct CheckArgs {
    #[arg(long, value_enum)]
    kind: CheckKind,
    /// Steiner parameters: n q r [lambda].
    params: Vec<u64>,
    #[arg(long)]
    host: Option<String>,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    host_partition: Option<String>,
    #[arg(long)]
    pattern_partition: Option<String>,
    /// Balance lower weight `b`.
    #[arg(long)]
    b: Option<String>,
    /// Balance or typicality tolerance `c`.
    #[arg(long)]
    c: Option<String>,
}

#[derive(Args, Serialize, Debug, Clone)]
struct ProblemArgs {
    #[arg(long)]
    host: String,
    /// Defaults to the pattern built into the host construction.
    #[arg(long)]
    pattern: Option<String>,
    /// Require copies to respect the host and pattern partitions.
    #[arg(long)]
    partite: bool,
    #[arg(long)]
    host_partition: Option<String>,
    #[arg(long)]
    pattern_partition: Option<String>,
    /// Seconds before stopping the search.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
}

#[derive(Args, Serialize, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Decide integral (signed) decomposability instead of searching.
    #[arg(long)]
    integral: bool,
}

#[derive(Args, Serialize, Debug)]
struct VerifyArgs {
    /// Host; optional for design certificates.
    #[arg(long)]
    host: Option<String>,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    partite: bool,
    #[arg(long)]
    host_partition: Option<String>,
    #[arg(long)]
    pattern_partition: Option<String>,
    #[arg(long)]
    certificate: String,
    /// Point count for design certificates.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Serialize, Debug)]
struct EncodeArgs {
    /// Latin square as a text grid.
    #[arg(long, group = "source")]
    latin: Option<String>,
    /// Sudoku grid as a text grid.
    #[arg(long, group = "source")]
    sudoku: Option<String>,
    /// Two orthogonal Latin squares, comma separated file names.
    #[arg(long, group = "source")]
    mols: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DecodeKind {
    Latin,
    Sudoku,
    Mols,
    Resolvable,
    Largeset,
}

#[derive(Args, Serialize, Debug)]
struct DecodeArgs {
    #[arg(long, value_enum)]
    kind: DecodeKind,
    /// Order of the square, box order of the grid, or point count of the design.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    certificate: String,
}

#[derive(Args, Serialize, Debug)]
struct NibbleArgs {
    #[arg(long)]
    host: String,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    partite: bool,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    stop_density: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Write one JSON line per step here.
    #[arg(long)]
    trajectory_out: Option<String>,
    /// Hand the uncovered remainder to the exact-cover solver for this many seconds.
    #[arg(long)]
    complete_timeout: Option<f64>,
    /// Check typicality of the remainder every this many steps.
    #[arg(long)]
    typicality_every: Option<usize>,
    #[arg(long, default_value = "1/2")]
    c: String,
    #[arg(long, default_value_t = 2)]
    s: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TypMode {
    Plain,
    Blowup,
    Coloured,
    PartiteIndex,
}

#[derive(Args, Serialize, Debug)]
struct TypicalityArgs {
    #[arg(long)]
    host: String,
    #[arg(long)]
    c: String,
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Seed for sampled tuples on large hosts.
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum)]
    mode: Option<TypMode>,
    #[arg(long)]
    pattern: Option<String>,
}

#[derive(Args, Serialize, Debug)]
struct LatticeArgs {
    /// Generator rows, `;`-separated, entries `,`-separated.
    #[arg(long, allow_hyphen_values = true)]
    generators: String,
    #[arg(long, allow_hyphen_values = true)]
    vector: Option<String>,
    /// Also print the Hermite normal form and its transform.
    #[arg(long)]
    hnf: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Verdict {
    True,
    False,
    Found,
    None,
    Timeout,
}

impl Verdict {
    fn exit_code(self) -> i32 {
        match self {
            Verdict::True | Verdict::Found => 0,
            Verdict::False | Verdict::None => 1,
            Verdict::Timeout => 2,
        }
    }

    fn of(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

#[derive(Serialize)]
struct Report {
    command: String,
    verdict: Verdict,
    definitions: Vec<&'static str>,
    config: Value,
    result: Value,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Text => {
                let mut out =
                    format!("command: {}\nverdict: {}\n", self.command, json!(self.verdict).as_str().unwrap_or(""));
                for d in &self.definitions {
                    out.push_str(&format!("definition: {d}\n"));
                }
                out.push_str(&format!("config: {}\n", self.config));
                if let Value::Object(m) = &self.result {
                    for (k, v) in m {
                        match v {
                            Value::String(s) if s.contains('\n') => out.push_str(&format!("{k}:\n{s}")),
                            Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                            other => out.push_str(&format!("{k}: {other}\n")),
                        }
                    }
                }
                out
            }
        }
    }
}

/// Exit code, stdout and stderr for one invocation.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            return if code == 0 { (0, e.to_string(), String::new()) } else { (3, String::new(), e.to_string()) };
        }
    };
    let budget = match resolve_budget(cli.budget) {
        Ok(b) => b,
        Err(e) => return (3, String::new(), format!("error: {e}\n")),
    };
    match dispatch(&cli, budget) {
        Ok(mut report) => {
            let mut config = serde_json::to_value(&cli).expect("config serializes");
            config["budget"] = json!(budget);
            report.config = config;
            (report.verdict.exit_code(), report.render(cli.format), String::new())
        }
        Err(e) => (3, String::new(), format!("error: {e}\n")),
    }
}

fn resolve_budget(flag: Option<u64>) -> Input<u64> {
    let b = match flag {
        Some(b) => b,
        None => match std::env::var("DECOMP_LAB_BUDGET") {
            Ok(s) => s.trim().parse().map_err(|_| InputError(format!("DECOMP_LAB_BUDGET={s:?} is not an integer")))?,
            Err(_) => DEFAULT_BUDGET,
        },
    };
    if b == 0 {
        return Err(InputError("budget must be positive".into()));
    }
    Ok(b)
}

fn report(command: &str, verdict: Verdict, definitions: Vec<&'static str>, result: Value) -> Report {
    Report { command: command.into(), verdict, definitions, config: Value::Null, result }
}

fn dispatch(cli: &Cli, budget: u64) -> Input<Report> {
    match &cli.command {
        Command::Check(a) => check(a),
        Command::Solve(a) => solve(a, budget),
        Command::Count(a) => count(a, budget),
        Command::Verify(a) => verify(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Nibble(a) => nibble(a, budget),
        Command::Typicality(a) => typicality(a),
        Command::Lattice(a) => lattice(a),
    }
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Input<&'a str> {
    v.as_deref().ok_or_else(|| InputError(format!("--{flag} is required here")))
}

fn rational(s: &str) -> Input<BigRational> {
    Ok(parse_rational(s)?)
}

/// Host, family and (when requested) partite constraint of a problem.
struct Problem {
    spec: HostSpec,
    family: Family,
    constraint: Option<PartiteConstraint>,
}

fn problem(
    host: &str,
    pattern: Option<&str>,
    partite: bool,
    host_partition: Option<&str>,
    pattern_partition: Option<&str>,
) -> Input<Problem> {
    let mut spec = parse_host(host)?;
    if let Some(p) = host_partition {
        spec.partition = Some(parse_partition(p)?);
    }
    let (family, implied_partition) = match (pattern, &spec.implied) {
        (Some(p), _) => {
            let ps = parse_pattern(p)?;
            let part = ps.partition.or_else(|| spec.implied.as_ref().map(|i| i.1.clone()));
            (ps.family, part)
        }
        (None, Some((f, p))) => (f.clone(), Some(p.clone())),
        (None, None) => return Err(InputError("--pattern is required for this host".into())),
    };
    let constraint = if partite {
        let host_p = spec.partition.clone().ok_or_else(|| InputError("--partite needs a host partition".into()))?;
        let pattern_p = match pattern_partition {
            Some(p) => parse_partition(p)?,
            None => implied_partition.ok_or_else(|| InputError("--partite needs a pattern partition".into()))?,
        };
        Some(PartiteConstraint { pattern: pattern_p, host: host_p })
    } else {
        None
    };
    Ok(Problem { spec, family, constraint })
}

fn hypergraph_host(h: &Host) -> Input<&Hypergraph> {
    match h {
        Host::Hypergraph(g) => Ok(g),
        other => Err(InputError(format!("expected a hypergraph host, got {}", other.kind()))),
    }
}

fn check(a: &CheckArgs) -> Input<Report> {
    let host = || need(&a.host, "host");
    let pattern = || need(&a.pattern, "pattern");
    match a.kind {
        CheckKind::Steiner => {
            let (n, q, r, lambda) = match a.params.as_slice() {
                [n, q, r] => (*n, *q, *r, 1),
                [n, q, r, l] => (*n, *q, *r, *l),
                _ => return Err(InputError("steiner needs n q r [lambda]".into())),
            };
            let rep = steiner_divisible(n, q, r, lambda)?;
            Ok(report("check", Verdict::of(rep.verdict), vec!["K^r_q-divisibility"], json!(rep)))
        }
        CheckKind::H => {
            let p = problem(host()?, Some(pattern()?), false, None, None)?;
            let Family::Hypergraph(f) = &p.family else {
                return Err(InputError("h needs a hypergraph pattern".into()));
            };
            let rep = h_divisible(hypergraph_host(&p.spec.host)?, &f[0])?;
            Ok(report("check", Verdict::of(rep.verdict), vec!["H-divisibility"], json!(rep)))
        }
        CheckKind::Hp => {
            let p = problem(
                host()?,
                a.pattern.as_deref(),
                true,
                a.host_partition.as_deref(),
                a.pattern_partition.as_deref(),
            )?;
            let Family::Hypergraph(f) = &p.family else {
                return Err(InputError("hp needs a hypergraph pattern".into()));
            };
            let c = p.constraint.expect("partite problem");
            let rep = hp_divisible(hypergraph_host(&p.spec.host)?, &c.host, &f[0], &c.pattern)?;
            Ok(report("check", Verdict::of(rep.verdict), vec!["Def def:HPblowup (H,P)-divisibility"], json!(rep)))
        }
        CheckKind::Coloured | CheckKind::Balanced => {
            let p = problem(host()?, Some(pattern()?), false, None, None)?;
            let (Host::Coloured(g), Family::Coloured(f)) = (&p.spec.host, &p.family) else {
                return Err(InputError("coloured checks need a coloured host and family".into()));
            };
            if a.kind == CheckKind::Coloured {
                let rep = coloured_divisible(g, f)?;
                return Ok(report(
                    "check",
                    Verdict::of(rep.verdict),
                    vec!["Def def:colhyp coloured H-divisibility"],
                    json!(rep),
                ));
            }
            let b = rational(need(&a.b, "b")?)?;
            let c = match &a.c {
                Some(c) => rational(c)?,
                None => BigRational::zero(),
            };
            let rep = coloured_balanced(g, f, &b, &c)?;
            Ok(report("check", Verdict::of(rep.balanced), vec!["Def def:colhyp (b,c)-balance"], json!(rep)))
        }
        CheckKind::Digraph => {
            let p = problem(host()?, Some(pattern()?), false, None, None)?;
            let (Host::Digraph(g), Family::Digraph(f)) = (&p.spec.host, &p.family) else {
                return Err(InputError("digraph checks need a digraph host and pattern".into()));
            };
            let rep = digraph_divisible(g, &f[0])?;
            let mut v = json!(rep);
            v["shift_regular"] = json!(shift_regular(g));
            Ok(report("check", Verdict::of(rep.verdict), vec!["Def didiv directed divisibility"], v))
        }
        CheckKind::Master => {
            let spec = parse_host(host()?)?;
            let g = match spec.host {
                Host::Digraph(d) => MultiDigraph::from_digraph(&d),
                Host::MultiDigraph(m) => m,
                other => return Err(InputError(format!("master needs a digraph host, got {}", other.kind()))),
            };
            let Family::Digraph(f) = parse_pattern(pattern()?)?.family else {
                return Err(InputError("master needs a digraph family".into()));
            };
            let q = f.first().map_or(0, |d| d.vertex_count());
            let pp = match &a.pattern_partition {
                Some(s) => parse_partition(s)?,
                None => Partition::trivial(q),
            };
            let gp = match &a.host_partition {
                Some(s) => parse_partition(s)?,
                None => Partition::trivial(g.vertex_count()),
            };
            let fam = canonical_family_check(&f, &pp)?;
            let rep = master_divisible(&g, &gp, &fam)?;
            Ok(report(
                "check",
                Verdict::of(rep.verdict),
                vec!["Def def:canonical (P,Λ)-canonical family", "Def def:master (P,Λ)-divisibility"],
                json!(rep),
            ))
        }
    }
}

fn solve_config(timeout: f64, budget: u64) -> Input<SolveConfig> {
    if !(timeout.is_finite() && timeout >= 0.0) {
        return Err(InputError("--timeout must be a nonnegative number of seconds".into()));
    }
    Ok(SolveConfig { budget, timeout: Some(Duration::from_secs_f64(timeout)) })
}

fn problem_of(a: &ProblemArgs) -> Input<Problem> {
    problem(&a.host, a.pattern.as_deref(), a.partite, a.host_partition.as_deref(), a.pattern_partition.as_deref())
}

fn design_of(spec: &HostSpec, cert: &Certificate) -> Option<Value> {
    let (kind, n) = spec.design?;
    let extracted = match kind {
        DesignKind::ResolvableSts => extract_resolvable(n, &cert.embeddings()),
        DesignKind::LargeSet => extract_large_set(n, &cert.embeddings()),
        _ => return None,
    };
    Some(match extracted {
        Ok(d) => json!(d),
        Err(e) => json!({ "error": e.to_string() }),
    })
}

fn solve(a: &SolveArgs, budget: u64) -> Input<Report> {
    let p = problem_of(&a.problem)?;
    let c = p.constraint.as_ref();
    if a.integral {
        let rep = integral_decomposition_exists(&p.spec.host, &p.family, c, budget)?;
        let v = json!({ "exists": rep.exists, "rank": rep.rank, "copies": rep.copies, "certificate": rep.certificate });
        return Ok(report("solve", Verdict::of(rep.exists), vec!["integral decomposition lattice"], v));
    }
    let cfg = solve_config(a.problem.timeout, budget)?;
    let rep = find_decomposition(&p.spec.host, &p.family, c, &cfg)?;
    let mut v = json!({ "copies": rep.copies, "nodes": rep.nodes, "elapsed_ms": rep.elapsed.as_millis() as u64 });
    let verdict = match &rep.outcome {
        Outcome::Found(cert) => {
            v["certificate"] = json!(cert);
            v["verified"] = json!(verify_certificate(&p.spec.host, &p.family, c, cert).valid);
            if let Some(d) = design_of(&p.spec, cert) {
                v["design"] = d;
            }
            Verdict::Found
        }
        Outcome::ProvenNone => Verdict::None,
        Outcome::Timeout => Verdict::Timeout,
    };
    Ok(report("solve", verdict, vec!["Def def:colhyp decomposition"], v))
}

fn count(a: &ProblemArgs, budget: u64) -> Input<Report> {
    let p = problem_of(a)?;
    let cfg = solve_config(a.timeout, budget)?;
    match count_decompositions(&p.spec.host, &p.family, p.constraint.as_ref(), &cfg) {
        Ok(n) => {
            let verdict = if n.is_zero() { Verdict::None } else { Verdict::Found };
            Ok(report("count", verdict, vec!["Def def:colhyp decomposition"], json!({ "count": n.to_string() })))
        }
        Err(decomp_lab::Error::BudgetExceeded(m)) => {
            Ok(report("count", Verdict::Timeout, vec!["Def def:colhyp decomposition"], json!({ "stopped": m })))
        }
        Err(e) => Err(e.into()),
    }
}

fn verify(a: &VerifyArgs) -> Input<Report> {
    let raw = spec::read_json_file(&a.certificate)?;
    if raw.get("kind").is_some() {
        let cert: DesignCertificate = spec::decode(&a.certificate, raw)?;
        let n = match (a.n, &a.host) {
            (Some(n), _) => n,
            (None, Some(h)) => {
                parse_host(h)?.design.map(|d| d.1).ok_or_else(|| InputError("--n is required".into()))?
            }
            (None, None) => return Err(InputError("--n is required for design certificates".into())),
        };
        let res = verify_design(&cert, n);
        let v = json!({ "valid": res.is_ok(), "error": res.as_ref().err().map(|e| e.to_string()) });
        return Ok(report("verify", Verdict::of(res.is_ok()), vec!["design verifier"], v));
    }
    let cert: Certificate = spec::decode(&a.certificate, raw)?;
    let p = problem(
        need(&a.host, "host")?,
        a.pattern.as_deref(),
        a.partite,
        a.host_partition.as_deref(),
        a.pattern_partition.as_deref(),
    )?;
    let rep = verify_certificate(&p.spec.host, &p.family, p.constraint.as_ref(), &cert);
    let mut v = json!(rep);
    if rep.valid {
        if let Some(d) = design_of(&p.spec, &cert) {
            v["design"] = d;
        }
    }
    Ok(report("verify", Verdict::of(rep.valid), vec!["Def def:colhyp decomposition"], v))
}

fn placements(copies: Vec<Vec<u32>>) -> Certificate {
    Certificate {
        placements: copies.into_iter().map(|e| Placement { pattern: 0, embedding: e }).collect(),
        weights: None,
    }
}

fn encode(a: &EncodeArgs) -> Input<Report> {
    let (what, cert) = if let Some(f) = &a.latin {
        ("latin", placements(latin_encode(&LatinSquare::from_text(&spec::read_text(f)?)?)))
    } else if let Some(f) = &a.sudoku {
        ("sudoku", placements(sudoku_encode(&SudokuGrid::from_text(&spec::read_text(f)?)?)))
    } else if let Some(pair) = &a.mols {
        let (x, y) = pair.split_once(',').ok_or_else(|| InputError("--mols expects A,B".into()))?;
        let sq = |f: &str| -> Input<LatinSquare> { Ok(LatinSquare::from_text(&spec::read_text(f)?)?) };
        ("mols", placements(mols_encode(&sq(x)?, &sq(y)?)?))
    } else {
        return Err(InputError("one of --latin, --sudoku or --mols is required".into()));
    };
    Ok(report("encode", Verdict::True, vec![], json!({ "source": what, "certificate": cert })))
}

fn decode(a: &DecodeArgs) -> Input<Report> {
    let raw = spec::read_json_file(&a.certificate)?;
    let cert: Certificate = spec::decode(&a.certificate, raw)?;
    let copies = cert.embeddings();
    let out = match a.kind {
        DecodeKind::Latin => json!({ "grid": latin_decode(a.n, &copies)?.to_text() }),
        DecodeKind::Sudoku => json!({ "grid": sudoku_decode(a.n, &copies)?.to_text() }),
        DecodeKind::Mols => {
            let (x, y) = mols_decode(a.n, &copies)?;
            json!({ "first": x.to_text(), "second": y.to_text() })
        }
        DecodeKind::Resolvable => json!({ "design": extract_resolvable(a.n, &copies)? }),
        DecodeKind::Largeset => json!({ "design": extract_large_set(a.n, &copies)? }),
    };
    Ok(report("decode", Verdict::True, vec![], out))
}

fn nibble(a: &NibbleArgs, budget: u64) -> Input<Report> {
    let p = problem(&a.host, a.pattern.as_deref(), a.partite, None, None)?;
    let inst = build_auxiliary(&p.spec.host, &p.family, p.constraint.as_ref(), budget)?;
    let (matching, traj) = random_greedy(&inst, StopRule { density: a.stop_density, steps: a.steps }, a.seed);
    if let Some(path) = &a.trajectory_out {
        std::fs::write(path, traj.to_json_lines()).map_err(|e| InputError(format!("{path}: {e}")))?;
    }
    let mut v = json!({
        "instance": inst,
        "matching_size": matching.len(),
        "stop": traj.stop,
        "final_remaining": traj.final_remaining,
        "uncovered": inst.vertices - matching.len() * inst.edge_size,
    });
    let equal_parts = p.spec.partition.as_ref().and_then(|pt| {
        let s = pt.sizes();
        (s.iter().all(|&x| x == s[0]) && p.spec.implied.is_some()).then_some(s[0])
    });
    if let Some(n) = equal_parts {
        v["bounds"] = json!(bounds_from(&inst, &traj, n, p.spec.host.uniformity()));
    }
    let g = hypergraph_host(&p.spec.host).ok();
    if let (Some(every), Some(g)) = (a.typicality_every, g) {
        let c = rational(&a.c)?;
        let opts = TypicalityOptions { seed: a.seed, ..Default::default() };
        let pattern = match &p.family {
            Family::Hypergraph(f) => Some(&f[0]),
            _ => None,
        };
        let parts = match (pattern, &p.spec.partition) {
            (Some(h), Some(pt)) if pt.part_count() == h.vertex_count() => Some((h, pt)),
            _ => None,
        };
        let track = typicality_track(g, parts, &inst, &traj, every, &c, a.s, &opts)?;
        v["typicality"] = json!(track.iter().map(|(i, r)| json!({ "step": i, "report": r })).collect::<Vec<_>>());
    }
    if let (Some(t), Some(g)) = (a.complete_timeout, g) {
        let mut covered = vec![false; g.len()];
        for &e in &matching {
            for &x in &inst.edges[e] {
                covered[x as usize] = true;
            }
        }
        let rest = g.edges().iter().zip(&covered).filter(|(_, &c)| !c).map(|(e, _)| e.clone());
        let rest = Host::Hypergraph(Hypergraph::new(g.vertex_count(), g.uniformity(), rest)?);
        let rep = find_decomposition(&rest, &p.family, p.constraint.as_ref(), &solve_config(t, budget)?)?;
        v["completion"] = json!(match rep.outcome {
            Outcome::Found(c) => format!("found {} copies", c.placements.len()),
            Outcome::ProvenNone => "none".into(),
            Outcome::Timeout => "timeout".into(),
        });
    }
    Ok(report("nibble", Verdict::True, vec!["random greedy matching", "Theorem luria upper bound"], v))
}

fn typicality(a: &TypicalityArgs) -> Input<Report> {
    let spec = parse_host(&a.host)?;
    let c = rational(&a.c)?;
    let opts = TypicalityOptions { seed: a.seed, ..Default::default() };
    let pattern = match (&a.pattern, &spec.implied) {
        (Some(s), _) => match parse_pattern(s)?.family {
            Family::Hypergraph(f) => Some(f[0].clone()),
            _ => None,
        },
        (None, Some((Family::Hypergraph(f), _))) => Some(f[0].clone()),
        _ => None,
    };
    let mode = a.mode.unwrap_or(match (&spec.host, &spec.partition, &pattern) {
        (Host::Coloured(_), _, _) => TypMode::Coloured,
        (_, Some(p), Some(h)) if p.part_count() == h.vertex_count() => TypMode::Blowup,
        (_, Some(_), _) => TypMode::PartiteIndex,
        _ => TypMode::Plain,
    });
    let parts = spec.partition.clone();
    let rep = match (mode, &spec.host) {
        (TypMode::Coloured, Host::Coloured(g)) => is_typical(TypicalityMode::Coloured(g), &c, a.s, &opts)?,
        (TypMode::Plain, Host::Hypergraph(g)) => is_typical(TypicalityMode::Plain(g), &c, a.s, &opts)?,
        (TypMode::Blowup, Host::Hypergraph(g)) => {
            let parts = parts.as_ref().ok_or_else(|| InputError("blowup mode needs a host partition".into()))?;
            let h = pattern.as_ref().ok_or_else(|| InputError("blowup mode needs a pattern".into()))?;
            is_typical(TypicalityMode::Blowup { graph: g, pattern: h, parts }, &c, a.s, &opts)?
        }
        (TypMode::PartiteIndex, Host::Hypergraph(g)) => {
            let parts = parts.as_ref().ok_or_else(|| InputError("partite-index mode needs a host partition".into()))?;
            is_typical(TypicalityMode::PartiteIndex { graph: g, parts }, &c, a.s, &opts)?
        }
        (m, h) => return Err(InputError(format!("mode {m:?} does not apply to a {} host", h.kind()))),
    };
    Ok(report("typicality", Verdict::of(rep.typical), vec!["Def def:typ (c,s)-typicality"], json!(rep)))
}

fn strings(rows: Vec<Vec<BigInt>>) -> Value {
    json!(rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn lattice(a: &LatticeArgs) -> Input<Report> {
    let gens = parse_matrix(&a.generators)?;
    let dim = gens.first().map_or(0, |r| r.len());
    if gens.iter().any(|r| r.len() != dim) {
        return Err(InputError("generator rows differ in length".into()));
    }
    let mut v = json!({ "dimension": dim, "generators": gens.len() });
    if a.hnf {
        let m = IntMatrix::from_rows(dim, &gens)?;
        let (h, u) = hermite_normal_form(&m);
        v["hnf"] = strings(h.to_rows());
        v["transform"] = strings(u.to_rows());
    }
    let verdict = match &a.vector {
        Some(s) => {
            let x = parse_vector(s)?;
            let w = span_membership_i64(&x, &gens)?;
            v["member"] = json!(w.is_some());
            if let Some(w) = w {
                v["witness"] = json!(w.iter().map(|x| x.to_string()).collect::<Vec<_>>());
            }
            Verdict::of(v["member"] == json!(true))
        }
        None => Verdict::True,
    };
    Ok(report("lattice", verdict, vec!["Hermite normal form lattice membership"], v))
}
