//! Acceptance criteria, one status line each. Lines go straight to stdout so they appear
//! without `--nocapture`. Known failures are reported as such and do not fail the run.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use decomp_lab::combinatorics::{ColouredMultigraph, Digraph, Hypergraph, Partition};
use decomp_lab::complex::group::PermGroup;
use decomp_lab::complex::LabelledComplex;
use decomp_lab::divisibility::{
    coloured_divisible, digraph_divisible, h_divisible, hp_divisible, hp_vectors, shift_regular,
};
use decomp_lab::encodings::{
    extract_large_set, extract_resolvable, large_set_instance, rainbow_family, resolvable_sts_instance, sudoku_host,
    sudoku_pattern, tight_cycle, triangle, verify_design, DesignCertificate, DesignKind,
};
use decomp_lab::gamma::{encode_arcs, encode_coloured, GammaSystem, LgammaChecker, MembershipOptions};
use decomp_lab::lattice::{hermite_normal_form, span_membership_i64, IntMatrix};
use decomp_lab::nibble::{build_auxiliary, counting_bounds, random_greedy, StopRule};
use decomp_lab::solver::{
    count_decompositions, find_decomposition, integral_decomposition_exists, verify_certificate, Certificate, Family,
    Host, Outcome, PartiteConstraint, Placement, SolveConfig, DEFAULT_BUDGET,
};

enum Status {
    Pass,
    Fail,
    KnownFail,
}

struct Verdict {
    status: Status,
    detail: String,
}

fn pass(detail: String) -> Verdict {
    Verdict { status: Status::Pass, detail }
}

fn fail(detail: String) -> Verdict {
    Verdict { status: Status::Fail, detail }
}

fn known(detail: String) -> Verdict {
    Verdict { status: Status::KnownFail, detail }
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn cfg(secs: u64) -> SolveConfig {
    SolveConfig { budget: DEFAULT_BUDGET, timeout: Some(Duration::from_secs(secs)) }
}

/// One solved instance, kept for the soundness chain.
struct Solved {
    name: String,
    host: Host,
    family: Family,
    constraint: Option<PartiteConstraint>,
    cert: Certificate,
}

#[derive(Default)]
struct Corpus {
    solved: Vec<Solved>,
}

impl Corpus {
    fn solve(
        &mut self,
        name: String,
        host: Host,
        family: Family,
        constraint: Option<PartiteConstraint>,
        secs: u64,
    ) -> (Outcome, Duration) {
        let t = Instant::now();
        let rep = find_decomposition(&host, &family, constraint.as_ref(), &cfg(secs)).expect("solver input");
        let elapsed = t.elapsed();
        if let Outcome::Found(cert) = &rep.outcome {
            self.solved.push(Solved { name, host, family, constraint, cert: cert.clone() });
        }
        (rep.outcome, elapsed)
    }
}

fn tag(o: &Outcome) -> &'static str {
    match o {
        Outcome::Found(_) => "found",
        Outcome::ProvenNone => "none",
        Outcome::Timeout => "timeout",
    }
}

fn kn(n: usize) -> Host {
    Host::Hypergraph(Hypergraph::complete(n, 2))
}

fn triangles() -> Family {
    Family::Hypergraph(vec![triangle()])
}

// 1

fn c1_steiner(corpus: &mut Corpus) -> Verdict {
    let bin = env!("CARGO_BIN_EXE_decomp-lab");
    let mut wrong = Vec::new();
    for n in 1..=100u32 {
        let out = Command::new(bin)
            .args(["check", "--kind", "steiner", &n.to_string(), "3", "2", "1"])
            .output()
            .expect("cli runs");
        let said = match out.status.code() {
            Some(0) => true,
            Some(1) => false,
            c => {
                wrong.push(format!("n={n} exit {c:?}"));
                continue;
            }
        };
        if said != matches!(n % 6, 1 | 3) {
            wrong.push(format!("n={n}"));
        }
    }
    let mut notes = Vec::new();
    let mut ok = wrong.is_empty();
    for (n, limit, want) in [
        (7, 10, "found"),
        (9, 10, "found"),
        (13, 10, "found"),
        (15, 60, "found"),
        (5, 10, "none"),
        (6, 10, "none"),
        (8, 10, "none"),
    ] {
        let (o, t) = corpus.solve(format!("STS({n})"), kn(n), triangles(), None, limit);
        ok &= tag(&o) == want && t < Duration::from_secs(limit);
        notes.push(format!("{n}:{} {:.0?}", tag(&o), t));
    }
    check(ok, format!("cli steiner n<=100 mismatches {wrong:?}; solver {}", notes.join(", ")))
}

// 2

fn latin_count(n: usize) -> u64 {
    fn go(n: usize, cell: usize, g: &mut Vec<usize>) -> u64 {
        if cell == n * n {
            return 1;
        }
        let (r, c) = (cell / n, cell % n);
        let mut total = 0;
        for s in 0..n {
            if (0..c).all(|j| g[r * n + j] != s) && (0..r).all(|i| g[i * n + c] != s) {
                g[cell] = s;
                total += go(n, cell + 1, g);
            }
        }
        total
    }
    go(n, 0, &mut vec![0; n * n])
}

fn sudoku4_count() -> u64 {
    fn go(cell: usize, g: &mut [usize; 16]) -> u64 {
        if cell == 16 {
            return 1;
        }
        let (r, c) = (cell / 4, cell % 4);
        let mut total = 0;
        for s in 1..=4 {
            let clash = (0..cell).any(|k| {
                let (i, j) = (k / 4, k % 4);
                g[k] == s && (i == r || j == c || (i / 2 == r / 2 && j / 2 == c / 2))
            });
            if !clash {
                g[cell] = s;
                total += go(cell + 1, g);
            }
        }
        g[cell] = 0;
        total
    }
    go(0, &mut [0; 16])
}

/// Labelled Steiner triple systems on `0..n`, each as its sorted block list.
fn all_sts(n: u32) -> Vec<Vec<[u32; 3]>> {
    fn go(n: u32, used: &mut BTreeSet<(u32, u32)>, blocks: &mut Vec<[u32; 3]>, out: &mut Vec<Vec<[u32; 3]>>) {
        let next = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).find(|p| !used.contains(p));
        let Some((a, b)) = next else {
            let mut s = blocks.clone();
            s.sort_unstable();
            out.push(s);
            return;
        };
        for c in b + 1..n {
            if !used.contains(&(a, c)) && !used.contains(&(b, c)) {
                used.extend([(a, b), (a, c), (b, c)]);
                blocks.push([a, b, c]);
                go(n, used, blocks, out);
                blocks.pop();
                for p in [(a, b), (a, c), (b, c)] {
                    used.remove(&p);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut BTreeSet::new(), &mut Vec::new(), &mut out);
    out
}

fn c2_counts(_: &mut Corpus) -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, frozen) in [(1usize, 1u64), (2, 2), (3, 12), (4, 576)] {
        let oracle = latin_count(n);
        let (g, p) = triangle().uniform_blowup(n).unwrap();
        let c = PartiteConstraint { pattern: Partition::singletons(3), host: p };
        let got = count_decompositions(&Host::Hypergraph(g), &triangles(), Some(&c), &cfg(300)).unwrap();
        ok &= oracle == frozen && got == frozen.into();
        notes.push(format!("K_3({n})={got}"));
    }
    for (n, frozen) in [(7usize, 30u64), (9, 840)] {
        let oracle = all_sts(n as u32).len() as u64;
        let got = count_decompositions(&kn(n), &triangles(), None, &cfg(300)).unwrap();
        ok &= oracle == frozen && got == frozen.into();
        notes.push(format!("STS({n})={got}"));
    }
    let oracle = sudoku4_count();
    let (g, p) = sudoku_host(2).unwrap();
    let c = PartiteConstraint { pattern: Partition::singletons(6), host: p };
    let got =
        count_decompositions(&Host::Hypergraph(g), &Family::Hypergraph(vec![sudoku_pattern()]), Some(&c), &cfg(300))
            .unwrap();
    ok &= oracle == 288 && got == 288u64.into();
    notes.push(format!("H(2)={got}"));
    let el = t.elapsed();
    check(ok && el < Duration::from_secs(300), format!("{} in {el:.1?}", notes.join(", ")))
}

// 3

fn c3_vectors(_: &mut Corpus) -> Verdict {
    let mut bad = Vec::new();
    let mut expect = |what: &str, got: Option<&Vec<Vec<u64>>>, want: Vec<u64>| {
        if got != Some(&vec![want.clone()]) {
            bad.push(format!("{what}: want {want:?}, got {got:?}"));
        }
    };
    let r = resolvable_sts_instance(9).unwrap();
    let rv = hp_divisible(&r.host, &r.host_partition, &r.pattern, &r.pattern_partition).unwrap().verdict;
    let (_, gens, degs) = hp_vectors(&r.host, &r.host_partition, &r.pattern, &r.pattern_partition, 0).unwrap();
    expect("resolvable H_I(∅)", gens.get(&vec![0, 0]), vec![3, 3]);
    expect("resolvable G_I(∅)", degs.get(&vec![0, 0]), vec![36, 36]);
    let (_, gens, degs) = hp_vectors(&r.host, &r.host_partition, &r.pattern, &r.pattern_partition, 1).unwrap();
    expect("resolvable H_I(f), f in [3]", gens.get(&vec![1, 0]), vec![2, 1]);
    expect("resolvable H_I(4)", gens.get(&vec![0, 1]), vec![0, 3]);
    expect("resolvable G_I(e), e in P'_1", degs.get(&vec![1, 0]), vec![8, 4]);
    expect("resolvable G_I(e), e in P'_2", degs.get(&vec![0, 1]), vec![0, 9]);

    let n = 9u64;
    let l = large_set_instance(9).unwrap();
    let lv = hp_divisible(&l.host, &l.host_partition, &l.pattern, &l.pattern_partition).unwrap().verdict;
    let binom = |a: u64, b: u64| -> u64 { (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1)) };
    for a in 0..=2usize {
        let (_, gens, degs) = hp_vectors(&l.host, &l.host_partition, &l.pattern, &l.pattern_partition, a).unwrap();
        let a64 = a as u64;
        expect(&format!("large set H_I(f), index ({a},0)"), gens.get(&vec![a, 0]), vec![1, 3 - a64]);
        let b = binom(n - a64, 3 - a64);
        expect(&format!("large set G_I(e), index ({a},0)"), degs.get(&vec![a, 0]), vec![b, (3 - a64) * b]);
        if a == 1 {
            expect("large set H_I(4)", gens.get(&vec![0, 1]), vec![0, 3]);
            expect("large set G_I(e), e in P'_2", degs.get(&vec![0, 1]), vec![0, binom(n, 2)]);
        }
        if a == 2 {
            expect("large set H_I(a4)", gens.get(&vec![1, 1]), vec![0, 2]);
            expect("large set G_I(e), index (1,1)", degs.get(&vec![1, 1]), vec![0, n - 1]);
        }
    }
    check(
        bad.is_empty() && rv && lv,
        format!("resolvable divisible {rv}, large set divisible {lv}; mismatches {bad:?}"),
    )
}

// 4

fn c4_cdiv(_: &mut Corpus) -> Verdict {
    let t = Instant::now();
    let h = tight_cycle(3, 2).unwrap();
    let arcs = Digraph::complete(4, 2).arcs().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut bad, mut yes) = (0, 0);
    for _ in 0..50_000 {
        let mask: u32 = rng.gen_range(0..1 << arcs.len());
        let sel = (0..arcs.len()).filter(|b| mask >> b & 1 == 1).map(|b| arcs[b].clone());
        let g = Digraph::new(4, 2, sel).unwrap();
        let a = digraph_divisible(&g, &h).unwrap().verdict;
        let b = shift_regular(&g) && g.len().is_multiple_of(3);
        bad += (a != b) as usize;
        yes += a as usize;
    }
    let el = t.elapsed();
    check(
        bad == 0 && el < Duration::from_secs(120),
        format!("50000 samples, {yes} divisible, {bad} discrepancies, {el:.1?}"),
    )
}

// 5

fn c5_tris(_: &mut Corpus) -> Verdict {
    let fam = rainbow_family(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut bad, mut yes) = (0, 0);
    for k in 0..1000 {
        let n = rng.gen_range(1..=6u32);
        let mut present: BTreeSet<(u32, u32)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.5)).collect();
        if k % 2 == 0 {
            // Toggle a path between consecutive odd vertices so every degree is even.
            let odd: Vec<u32> =
                (0..n).filter(|&v| present.iter().filter(|&&(a, b)| a == v || b == v).count() % 2 == 1).collect();
            for w in odd.chunks(2) {
                let p = (w[0].min(w[1]), w[0].max(w[1]));
                if !present.remove(&p) {
                    present.insert(p);
                }
            }
        }
        let edges: Vec<_> = present.iter().map(|&(a, b)| (vec![a, b], rng.gen_range(0..4))).collect();
        let g = ColouredMultigraph::from_coloured_edges(n as usize, 2, 4, edges).unwrap();
        let degrees_even = (0..n).all(|v| present.iter().filter(|&&(a, b)| a == v || b == v).count() % 2 == 0);
        let tri = degrees_even && present.len().is_multiple_of(3);
        let got = coloured_divisible(&g, &fam).unwrap().verdict;
        bad += (got != tri) as usize;
        yes += tri as usize;
    }
    check(bad == 0, format!("1000 samples, {yes} tridivisible, {bad} discrepancies"))
}

// 6

/// Codes of coloured graphs on `n` vertices, one per vertex-relabelling class.
fn coloured_classes(n: usize, d: u32) -> Vec<u64> {
    let pairs = Hypergraph::complete(n, 2).edges().to_vec();
    let index: BTreeMap<Vec<u32>, usize> = pairs.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let perms: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .map(|p| {
            pairs
                .iter()
                .map(|e| {
                    let mut f = vec![p[e[0] as usize] as u32, p[e[1] as usize] as u32];
                    f.sort_unstable();
                    index[&f]
                })
                .collect()
        })
        .collect();
    let base = (d + 1) as u64;
    let total = base.pow(pairs.len() as u32);
    let mut out = Vec::new();
    let mut digits = vec![0u64; pairs.len()];
    'codes: for code in 0..total {
        let mut c = code;
        for x in digits.iter_mut() {
            *x = c % base;
            c /= base;
        }
        for m in &perms {
            let mut image = vec![0u64; pairs.len()];
            for (k, &x) in digits.iter().enumerate() {
                image[m[k]] = x;
            }
            let v = image.iter().rev().fold(0u64, |acc, &x| acc * base + x);
            if v < code {
                continue 'codes;
            }
        }
        out.push(code);
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn decode_coloured(n: usize, d: usize, code: u64) -> ColouredMultigraph {
    let mut c = code;
    let mut edges = Vec::new();
    for e in Hypergraph::complete(n, 2).edges() {
        let x = c % (d as u64 + 1);
        c /= d as u64 + 1;
        if x > 0 {
            edges.push((e.clone(), x as usize - 1));
        }
    }
    ColouredMultigraph::from_coloured_edges(n, 2, d, edges).unwrap()
}

fn c6_framework(_: &mut Corpus) -> Verdict {
    let t = Instant::now();
    let opts = MembershipOptions { witnesses: false, ..Default::default() };
    let fam = rainbow_family(3).unwrap();
    let gamma = GammaSystem::coloured(&fam, PermGroup::symmetric(3).unwrap()).unwrap();
    let (mut checked, mut bad) = (0usize, 0usize);
    for n in 3..=5 {
        let phi = LabelledComplex::complete(3, n).unwrap();
        let mut checker = LgammaChecker::new(&gamma, &phi, opts).unwrap();
        for code in coloured_classes(n, 3) {
            let g = decode_coloured(n, 3, code);
            let a = coloured_divisible(&g, &fam).unwrap().verdict;
            let b = checker.check(&encode_coloured(&g, &phi).unwrap()).unwrap().member;
            bad += (a != b) as usize;
            checked += 1;
        }
    }
    let coloured = checked;
    let transitive = Digraph::new(3, 2, vec![vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
    for h in [tight_cycle(3, 2).unwrap(), transitive] {
        let gamma = GammaSystem::digraph(&h).unwrap();
        for n in 3..=4 {
            let phi = LabelledComplex::complete(3, n).unwrap();
            let mut checker = LgammaChecker::new(&gamma, &phi, opts).unwrap();
            let arcs = Digraph::complete(n, 2).arcs().to_vec();
            for mask in 0u32..1 << arcs.len() {
                let sel = (0..arcs.len()).filter(|b| mask >> b & 1 == 1).map(|b| arcs[b].clone());
                let g = Digraph::new(n, 2, sel).unwrap();
                let a = digraph_divisible(&g, &h).unwrap().verdict;
                let b = checker.check(&encode_arcs(&g, &phi, 1).unwrap()).unwrap().member;
                bad += (a != b) as usize;
                checked += 1;
            }
        }
    }
    check(
        bad == 0,
        format!(
            "{coloured} coloured classes (3..5 vertices, D=3, up to relabelling) and {} digraphs (3..4 vertices, two patterns), {bad} discrepancies, {:.1?}; graphs on fewer than 3 vertices have no triangle positions",
            checked - coloured,
            t.elapsed()
        ),
    )
}

// 7

fn c7_cycles(corpus: &mut Corpus) -> Verdict {
    let h = Family::Digraph(vec![tight_cycle(3, 2).unwrap()]);
    let mut notes = Vec::new();
    let mut unexpected = Vec::new();
    let mut known_gap = Vec::new();
    for n in 2..=7usize {
        let divisible = n * (n - 1) % 3 == 0;
        let (o, t) = corpus.solve(format!("KD({n})"), Host::Digraph(Digraph::complete(n, 2)), h.clone(), None, 60);
        notes.push(format!("{n}:{} {:.0?}", tag(&o), t));
        match (&o, divisible) {
            (Outcome::Found(_), true) | (Outcome::ProvenNone, false) => {}
            (Outcome::ProvenNone, true) if n == 6 => known_gap.push(n),
            _ => unexpected.push(n),
        }
    }
    let detail = format!("{}; divisible but proven none at {known_gap:?}", notes.join(", "));
    if !unexpected.is_empty() {
        fail(format!("{detail}; unexpected at {unexpected:?}"))
    } else if !known_gap.is_empty() {
        known(format!("{detail} (no cyclic triple system of order 6 exists)"))
    } else {
        pass(detail)
    }
}

// 8

fn partite_solve(
    corpus: &mut Corpus,
    name: &str,
    inst: decomp_lab::encodings::PartiteInstance,
    secs: u64,
) -> (Outcome, Duration) {
    let c = PartiteConstraint { pattern: inst.pattern_partition, host: inst.host_partition };
    corpus.solve(name.into(), Host::Hypergraph(inst.host), Family::Hypergraph(vec![inst.pattern]), Some(c), secs)
}

fn c8_resolvable(corpus: &mut Corpus) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, cap) in [(9usize, 60u64), (15, 600)] {
        let (o, t) = partite_solve(corpus, &format!("resolvable({n})"), resolvable_sts_instance(n).unwrap(), cap);
        let verified = match &o {
            Outcome::Found(c) => extract_resolvable(n, &c.embeddings()).and_then(|d| verify_design(&d, n)).is_ok(),
            _ => false,
        };
        if n == 9 {
            ok &= verified && t < Duration::from_secs(60);
        } else {
            ok &= !matches!(o, Outcome::Found(_)) || verified;
        }
        notes.push(format!("n={n}: {} verified={verified} {t:.0?}", tag(&o)));
    }
    check(ok, notes.join("; "))
}

// 9

/// Seven pairwise disjoint STS(9) from the labelled-STS oracle.
fn synthetic_large_set() -> Vec<Vec<[u32; 3]>> {
    fn go(systems: &[Vec<[u32; 3]>], used: &mut BTreeSet<[u32; 3]>, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == 7 {
            return true;
        }
        let first = (0..9u32)
            .flat_map(|a| (a + 1..9).flat_map(move |b| (b + 1..9).map(move |c| [a, b, c])))
            .find(|t| !used.contains(t))
            .expect("uncovered triple");
        for (k, s) in systems.iter().enumerate() {
            if s.contains(&first) && s.iter().all(|t| !used.contains(t)) {
                used.extend(s.iter().copied());
                chosen.push(k);
                if go(systems, used, chosen) {
                    return true;
                }
                chosen.pop();
                for t in s {
                    used.remove(t);
                }
            }
        }
        false
    }
    let systems = all_sts(9);
    let mut chosen = Vec::new();
    assert!(go(&systems, &mut BTreeSet::new(), &mut chosen), "oracle finds a large set");
    chosen.into_iter().map(|k| systems[k].clone()).collect()
}

fn large_set_copies(n: u32, systems: &[Vec<[u32; 3]>]) -> Vec<Vec<u32>> {
    systems.iter().enumerate().flat_map(|(y, s)| s.iter().map(move |t| vec![t[0], t[1], t[2], n + y as u32])).collect()
}

fn systems_of(d: &DesignCertificate) -> BTreeSet<Vec<[u32; 3]>> {
    d.classes
        .as_ref()
        .unwrap()
        .iter()
        .map(|cl| {
            let mut s: Vec<[u32; 3]> = cl.iter().map(|&k| [d.blocks[k][0], d.blocks[k][1], d.blocks[k][2]]).collect();
            s.sort_unstable();
            s
        })
        .collect()
}

fn c9_large_set(corpus: &mut Corpus) -> Verdict {
    let inst = large_set_instance(9).unwrap();
    let host = Host::Hypergraph(inst.host.clone());
    let family = Family::Hypergraph(vec![inst.pattern.clone()]);
    let c = PartiteConstraint { pattern: inst.pattern_partition.clone(), host: inst.host_partition.clone() };
    let as_cert = |copies: &[Vec<u32>]| Certificate {
        placements: copies.iter().map(|e| Placement { pattern: 0, embedding: e.clone() }).collect(),
        weights: None,
    };

    let (o, t) = partite_solve(corpus, "large set(9)", inst.clone(), 600);
    let mut ok = true;
    let solved = match &o {
        Outcome::Found(cert) => match extract_large_set(9, &cert.embeddings()) {
            Ok(d) => {
                let systems = systems_of(&d);
                let triples: BTreeSet<_> = systems.iter().flatten().collect();
                let good = systems.len() == 7 && triples.len() == 84 && systems.iter().all(|s| s.len() == 12);
                ok &= good;
                format!("found, 7 disjoint systems covering 84 triples: {good}")
            }
            Err(e) => {
                ok = false;
                format!("found, extraction failed: {e}")
            }
        },
        other => format!("{} (no certificate)", tag(other)),
    };

    // Large set to decomposition and back, independent of the solver.
    let synth = synthetic_large_set();
    let copies = large_set_copies(9, &synth);
    let forward = verify_certificate(&host, &family, Some(&c), &as_cert(&copies)).valid;
    let back =
        extract_large_set(9, &copies).map(|d| systems_of(&d) == synth.iter().cloned().collect()).unwrap_or(false);
    let design = DesignCertificate {
        kind: DesignKind::LargeSet,
        blocks: synth.iter().flatten().map(|t| t.to_vec()).collect(),
        classes: Some((0..7).map(|y| (12 * y..12 * y + 12).collect()).collect()),
    };
    let checked = verify_design(&design, 9).is_ok();
    // Two systems sharing a triple are rejected on both sides.
    let mut broken = synth.clone();
    broken[1] = broken[0].clone();
    let bad_copies = large_set_copies(9, &broken);
    let rejects = !verify_certificate(&host, &family, Some(&c), &as_cert(&bad_copies)).valid
        && extract_large_set(9, &bad_copies).is_err();
    ok &= forward && back && checked && rejects;
    check(ok, format!("solver {solved} in {t:.0?}; synthetic round trip: to copies {forward}, back {back}, design verifies {checked}, corrupted rejected {rejects}"))
}

// 10

fn brute_member(v: &[i64], gens: &[Vec<i64>], bound: i64) -> bool {
    let k = gens.len();
    let mut c = vec![-bound; k];
    loop {
        if (0..v.len()).all(|j| (0..k).map(|i| c[i] * gens[i][j]).sum::<i64>() == v[j]) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == k {
                return false;
            }
            if c[i] < bound {
                c[i] += 1;
                break;
            }
            c[i] = -bound;
            i += 1;
        }
    }
}

fn c10_lattice(_: &mut Corpus) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut bad, mut members, mut beyond) = (Vec::new(), 0, 0);
    for inst in 0..200 {
        let dim = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=4);
        let gens: Vec<Vec<i64>> = (0..k).map(|_| (0..dim).map(|_| rng.gen_range(-6..=6)).collect()).collect();
        let v: Vec<i64> = if inst % 2 == 0 {
            let c: Vec<i64> = (0..k).map(|_| rng.gen_range(-3..=3)).collect();
            (0..dim).map(|j| (0..k).map(|i| c[i] * gens[i][j]).sum()).collect()
        } else {
            (0..dim).map(|_| rng.gen_range(-6..=6)).collect()
        };
        let got = span_membership_i64(&v, &gens).unwrap();
        if let Some(c) = &got {
            let sound = (0..dim)
                .all(|j| (0..k).map(|i| &c[i] * BigInt::from(gens[i][j])).sum::<BigInt>() == BigInt::from(v[j]));
            if !sound {
                bad.push(format!("instance {inst}: witness does not reproduce the target"));
            }
            members += 1;
        }
        // A member the box misses is still certified by its checked witness.
        match (got.is_some(), brute_member(&v, &gens, 12)) {
            (false, true) => {
                bad.push(format!("instance {inst}: brute force finds a combination the exact solver rejects"))
            }
            (true, false) => beyond += 1,
            _ => {}
        }
    }
    let mut hnf_bad = 0;
    for _ in 0..100 {
        let rows = rng.gen_range(1..=5);
        let cols = rng.gen_range(1..=5);
        let m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let m = IntMatrix::from_rows(cols, &m).unwrap();
        let (h, u) = hermite_normal_form(&m);
        let (h2, _) = hermite_normal_form(&h);
        let unimodular = u.determinant().unwrap().abs().is_one();
        let product = u.mul(&m).unwrap() == h;
        hnf_bad += (h2 != h || !unimodular || !product) as usize;
    }
    check(
        bad.is_empty() && hnf_bad == 0,
        format!("200 membership instances ({members} members, {beyond} with witnesses outside the brute-force box), disagreements {bad:?}; 100 HNF matrices, {hnf_bad} failing idempotence/unimodularity"),
    )
}

// 11

fn c11_nibble(_: &mut Corpus) -> Verdict {
    let full = StopRule { density: None, steps: None };
    let mut problems = Vec::new();

    let (g, p) = triangle().uniform_blowup(30).unwrap();
    let c = PartiteConstraint { pattern: Partition::singletons(3), host: p };
    let a = build_auxiliary(&Host::Hypergraph(g), &triangles(), Some(&c), DEFAULT_BUDGET).unwrap();
    let mut worst = 0f64;
    for seed in 0..10u64 {
        let (m1, t1) = random_greedy(&a, full, seed);
        let (m2, t2) = random_greedy(&a, full, seed);
        if m1 != m2 || t1 != t2 {
            problems.push(format!("seed {seed} not reproducible"));
        }
        // Replay with a naive alive set.
        let mut alive = vec![true; a.edges.len()];
        let mut covered = vec![false; a.vertices];
        for s in &t1.steps {
            let live = alive.iter().filter(|&&x| x).count();
            let e = &a.edges[s.chosen];
            if !alive[s.chosen] || e.iter().any(|&v| covered[v as usize]) {
                problems.push(format!("seed {seed} step {} reuses an atom", s.step));
                break;
            }
            if live != s.remaining || s.covered != covered.iter().filter(|&&x| x).count() + e.len() {
                problems.push(format!("seed {seed} step {} counts drift", s.step));
                break;
            }
            for &v in e {
                covered[v as usize] = true;
            }
            for (k, f) in a.edges.iter().enumerate() {
                if alive[k] && f.iter().any(|&v| covered[v as usize]) {
                    alive[k] = false;
                }
            }
            if s.density >= 0.5 {
                let expected = s.density.powi(3) * 30f64.powi(3);
                worst = worst.max((s.remaining as f64 - expected).abs() / expected);
            }
        }
        if alive.iter().filter(|&&x| x).count() != t1.final_remaining {
            problems.push(format!("seed {seed} final count drift"));
        }
    }
    if worst > 0.15 {
        problems.push(format!("trajectory off by {:.1}%", 100.0 * worst));
    }

    let mut rates = Vec::new();
    let mut violations = 0;
    for n in [20usize, 30, 40] {
        let mut sum = 0.0;
        for seed in 0..10 {
            let b = counting_bounds(&triangle(), n, full, seed, DEFAULT_BUDGET).unwrap();
            sum += b.lower_rate;
            violations += (b.log_lower_estimate > b.log_upper) as usize;
        }
        let mean = sum / 10.0;
        let target = (n as f64).ln() - 2.0;
        if (mean - target).abs() > 1.0 {
            problems.push(format!("n={n} rate {mean:.3} vs {target:.3}"));
        }
        rates.push(format!("n={n} {mean:.3}/{target:.3}"));
    }
    let detail = format!(
        "reproducible, disjoint, conserved; K_3(30) worst deviation {:.1}% while d>=0.5; per-cell rates {}; lower estimate above upper bound on {violations}/30 runs",
        100.0 * worst,
        rates.join(", ")
    );
    if !problems.is_empty() {
        fail(format!("{detail}; {problems:?}"))
    } else if violations > 0 {
        known(format!("{detail} (dropped lower-order terms; the estimate is not a bound at these sizes)"))
    } else {
        pass(detail)
    }
}

// 12

fn divisible(host: &Host, family: &Family, constraint: Option<&PartiteConstraint>) -> bool {
    match (host, family, constraint) {
        (Host::Hypergraph(g), Family::Hypergraph(f), None) => h_divisible(g, &f[0]).unwrap().verdict,
        (Host::Hypergraph(g), Family::Hypergraph(f), Some(c)) => {
            hp_divisible(g, &c.host, &f[0], &c.pattern).unwrap().verdict
        }
        (Host::Digraph(g), Family::Digraph(f), None) => digraph_divisible(g, &f[0]).unwrap().verdict,
        (Host::Coloured(g), Family::Coloured(f), None) => coloured_divisible(g, f).unwrap().verdict,
        _ => panic!("no divisibility checker for this combination"),
    }
}

fn c12_soundness(corpus: &mut Corpus) -> Verdict {
    let t = Instant::now();
    // A coloured instance so every host kind appears.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let fam = rainbow_family(3).unwrap();
    for _ in 0..20 {
        let k7 = Hypergraph::complete(7, 2);
        let edges: Vec<_> = k7.edges().iter().map(|e| (e.clone(), rng.gen_range(0..3))).collect();
        let g = ColouredMultigraph::from_coloured_edges(7, 2, 3, edges).unwrap();
        corpus.solve("coloured K_7".into(), Host::Coloured(g), Family::Coloured(fam.clone()), None, 10);
    }
    let mut broken = Vec::new();
    for s in &corpus.solved {
        let c = s.constraint.as_ref();
        let v = verify_certificate(&s.host, &s.family, c, &s.cert).valid;
        let d = v && divisible(&s.host, &s.family, c);
        let i = d && integral_decomposition_exists(&s.host, &s.family, c, DEFAULT_BUDGET).unwrap().exists;
        if !i {
            broken.push(format!("{} (verify {v}, divisible {d}, integral {i})", s.name));
        }
    }
    check(
        broken.is_empty(),
        format!("{} solved instances, chain broken at {broken:?}, {:.1?}", corpus.solved.len(), t.elapsed()),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn(&mut Corpus) -> Verdict); 12] = [
        ("steiner conditions and small STS", c1_steiner),
        ("exact counts", c2_counts),
        ("worked divisibility vectors", c3_vectors),
        ("cyclic-triangle divisibility on KD_4", c4_cdiv),
        ("rainbow-triangle tridivisibility", c5_tris),
        ("framework cross-check", c6_framework),
        ("directed triangle decompositions of KD_n", c7_cycles),
        ("resolvable STS", c8_resolvable),
        ("large set of STS(9)", c9_large_set),
        ("lattice core", c10_lattice),
        ("nibble properties", c11_nibble),
        ("soundness chain", c12_soundness),
    ];
    let mut corpus = Corpus::default();
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        let v = catch_unwind(AssertUnwindSafe(|| f(&mut corpus))).unwrap_or_else(|e| {
            fail(format!(
                "panicked: {:?}",
                e.downcast_ref::<String>().map(String::as_str).or(e.downcast_ref::<&str>().copied())
            ))
        });
        let label = match v.status {
            Status::Pass => "PASS",
            Status::KnownFail => "FAIL (known)",
            Status::Fail => {
                failed.push(id);
                "FAIL"
            }
        };
        writeln!(out, "acceptance {id:>2} {label:<12} {name}: {}", v.detail).unwrap();
        out.flush().unwrap();
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
