//! The acceptance suites. Each instance draws from its own seeded stream, so
//! a report is replayable from (suite, seed, count) and independent of
//! scheduling.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen::{self, rng_for, GenKind};
use super::io::write_graph;
use crate::alpha;
use crate::connectivity::{self, CutMode};
use crate::decomposition::{self, degrees_within};
use crate::error::{Error, Result};
use crate::factor::{self, StarDecomposition};
use crate::graph::{Dir, Dsu, EdgeId, MultiGraph, Orientation, ResidueMap};
use crate::lifting::{self, LiftMode};
use crate::orientation::{self, BoundSpec, Bounds, Regime, SearchConfig, SearchOutcome};
use crate::tree_packing::{self, BranchingKind, Packing};

pub const SUITE_IDS: [&str; 11] = [
    "mod2-exhaustive",
    "alpha-props",
    "k8-negative",
    "star-equivalence",
    "branchings",
    "eulerian-rule",
    "spanning-eulerian-10-regular",
    "bipartite-correspondence",
    "catlin-and-packing",
    "lifting-preservation",
    "hybrid-vs-oracle",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub detail: String,
    /// The offending graph in `mg` format.
    pub graph: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    /// Individual assertions evaluated across all instances.
    pub checks: u64,
    pub passed: usize,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {}: {}/{} instances, {} checks, seed {}",
            if self.ok() { "PASS" } else { "FAIL" },
            self.suite,
            self.passed,
            self.instances,
            self.checks,
            self.seed
        )
    }

    /// Key-per-line record; everything but `elapsed_ms` is replayable.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "suite {}\nseed {}\ninstances {}\nchecks {}\npassed {}\nfailed {}\n",
            self.suite,
            self.seed,
            self.instances,
            self.checks,
            self.passed,
            self.failures.len()
        );
        for f in &self.failures {
            s.push_str(&format!("failure {} {}\n", f.index, f.detail));
            if let Some(g) = &f.graph {
                for line in g.lines() {
                    s.push_str(&format!("  {line}\n"));
                }
            }
        }
        for n in &self.notes {
            s.push_str(&format!("note {n}\n"));
        }
        s.push_str(&format!("elapsed_ms {}\nstatus {}\n", self.elapsed_ms, if self.ok() { "pass" } else { "fail" }));
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Overrides for suite sizes; `None` keeps the acceptance defaults.
#[derive(Debug, Clone, Default)]
pub struct SuiteParams {
    pub count: Option<usize>,
}

pub fn run_suite(id: &str, seed: u64, params: &SuiteParams) -> Result<SuiteReport> {
    let start = Instant::now();
    let count = |default: usize| params.count.unwrap_or(default);
    let run = match id {
        "mod2-exhaustive" => run_instances(count(500), seed, mod2_instance),
        "alpha-props" => run_instances(count(200), seed, alpha_instance),
        "k8-negative" => run_instances(1, seed, k8_instance),
        "star-equivalence" => run_instances(count(300) + 2, seed, star_instance),
        "branchings" => run_instances(count(200), seed, branching_instance),
        "eulerian-rule" => run_instances(count(300), seed, rule_instance),
        "spanning-eulerian-10-regular" => run_instances(3, seed, eulerian_10_instance),
        "bipartite-correspondence" => run_instances(count(300) + 1, seed, bipartite_instance),
        "catlin-and-packing" => run_instances(count(200), seed, catlin_instance),
        "lifting-preservation" => run_instances(count(500), seed, lifting_instance),
        "hybrid-vs-oracle" => run_instances(count(300), seed, hybrid_instance),
        _ => return Err(Error::domain(format!("unknown suite {id:?}; known: {}", SUITE_IDS.join(", ")))),
    };
    let mut notes: Vec<String> = run.notes.into_iter().collect();
    notes.sort();
    Ok(SuiteReport {
        suite: id.to_string(),
        seed,
        instances: run.instances,
        checks: run.checks,
        passed: run.instances - run.failures.len(),
        failures: run.failures,
        notes,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

struct Bad {
    detail: String,
    graph: Option<MultiGraph>,
}

fn bad(g: &MultiGraph, detail: impl Into<String>) -> Bad {
    Bad { detail: detail.into(), graph: Some(g.clone()) }
}

fn ensure(cond: bool, g: &MultiGraph, detail: impl FnOnce() -> String) -> std::result::Result<(), Bad> {
    if cond {
        Ok(())
    } else {
        Err(bad(g, detail()))
    }
}

trait OnGraph<T> {
    fn on(self, g: &MultiGraph) -> std::result::Result<T, Bad>;
}

impl<T> OnGraph<T> for Result<T> {
    fn on(self, g: &MultiGraph) -> std::result::Result<T, Bad> {
        self.map_err(|e| bad(g, e.to_string()))
    }
}

/// Checks evaluated, plus free-form notes merged into the report.
#[derive(Default)]
struct Pass {
    checks: u64,
    notes: BTreeSet<String>,
}

impl Pass {
    fn tick(&mut self) {
        self.checks += 1;
    }
}

type Outcome = std::result::Result<Pass, Bad>;

struct Run {
    instances: usize,
    checks: u64,
    failures: Vec<Failure>,
    notes: BTreeSet<String>,
}

fn run_instances(count: usize, seed: u64, f: fn(usize, &mut ChaCha8Rng) -> Outcome) -> Run {
    let outcomes: Vec<Outcome> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            f(i, &mut rng)
        })
        .collect();
    let mut run = Run { instances: count, checks: 0, failures: Vec::new(), notes: BTreeSet::new() };
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(p) => {
                run.checks += p.checks;
                run.notes.extend(p.notes);
            }
            Err(b) => {
                run.failures.push(Failure { index: i, detail: b.detail, graph: b.graph.map(|g| write_graph(&g)) })
            }
        }
    }
    run
}

fn unlabeled(msg: &str) -> Bad {
    Bad { detail: msg.to_string(), graph: None }
}

fn random_graph(
    rng: &mut ChaCha8Rng,
    n: (usize, usize),
    m: (usize, usize),
    accept: impl Fn(&MultiGraph) -> bool,
) -> std::result::Result<MultiGraph, Bad> {
    let kind = GenKind::Random { n, m };
    gen::sample_until(rng, |r| kind.sample(r), accept, true).map_err(|e| unlabeled(&e.to_string()))
}

fn lambda_at_least(g: &MultiGraph, l: usize) -> bool {
    connectivity::edge_connectivity_value(g) >= l
}

/// Random residues with sum = |E| (mod k).
fn compatible_residues(rng: &mut ChaCha8Rng, g: &MultiGraph, k: usize) -> ResidueMap {
    let n = g.vertex_count();
    let mut vals: Vec<i64> = (0..n).map(|_| rng.gen_range(0..k as i64)).collect();
    let sum: i64 = vals.iter().sum();
    vals[0] += g.edge_count() as i64 - sum;
    ResidueMap::new(k, vals).expect("positive modulus")
}

fn all_residues(k: usize, n: usize) -> impl Iterator<Item = ResidueMap> {
    (0..k.pow(n as u32)).map(move |mut c| {
        let vals = (0..n)
            .map(|_| {
                let x = (c % k) as i64;
                c /= k;
                x
            })
            .collect();
        ResidueMap::new(k, vals).expect("positive modulus")
    })
}

fn mod2_instance(_: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let g = random_graph(rng, (2, 5), (2, 8), |g| g.edge_count() >= g.vertex_count() && lambda_at_least(g, 2))?;
    let n = g.vertex_count();
    let spec = BoundSpec::new(Bounds::FloorCeil(1));
    let mut pass = Pass::default();
    for p in all_residues(2, n).filter(|p| p.compatible_with(&g)) {
        let o = orientation::orient_mod2_bounded(&g, &p, 0, None).on(&g)?;
        let rep = orientation::verify_orientation(&g, &o, &p, &spec);
        ensure(rep.ok, &g, || format!("p = {:?}: {:?}", p.values(), rep.violations))?;
        pass.tick();
        for z0 in 0..n {
            let d = g.degree(z0);
            let (lo, hi) = ((d / 2).saturating_sub(1), (d.div_ceil(2) + 1).min(d));
            for t in (lo..=hi).filter(|t| t % 2 == p.get(z0)) {
                let o = orientation::orient_mod2_bounded(&g, &p, z0, Some(t)).on(&g)?;
                let got = o.out_degree(&g, z0);
                let rep = orientation::verify_orientation(&g, &o, &p, &spec);
                ensure(got == t && rep.ok, &g, || format!("pin {t} at {z0} for p = {:?} gave {got}", p.values()))?;
                pass.tick();
            }
        }
    }
    Ok(pass)
}

fn alpha_instance(_: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let k = *[3usize, 4, 5].choose(rng).unwrap();
    let g = random_graph(rng, (2, 8), (1, 16), |_| true)?;
    let p = compatible_residues(rng, &g, k);
    let mut pass = Pass::default();
    let v = alpha::check_alpha_properties(&g, &p).on(&g)?;
    ensure(v.is_empty(), &g, || format!("k = {k}, p = {:?}: {v:?}", p.values()))?;
    pass.tick();
    let pivots: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) >= 2).collect();
    if let Some(&u) = pivots.choose(rng) {
        let inc = g.incident(u);
        let mut pair: Vec<_> = inc.choose_multiple(rng, 2).collect();
        pair.sort_by_key(|e| e.id);
        let changed = alpha::check_lift_invariance(&g, &p, u, pair[0].id, pair[1].id).on(&g)?;
        ensure(changed.is_empty(), &g, || format!("lift at {u} changed |alpha| on {} sets", changed.len()))?;
        pass.tick();
    }
    Ok(pass)
}

fn k8_instance(_: usize, _: &mut ChaCha8Rng) -> Outcome {
    let g = gen::complete_graph(8, 1);
    let mut pass = Pass::default();
    for (lo, hi, r) in [(4usize, 6usize, 0i64), (1, 3, 1)] {
        let p = ResidueMap::constant(2, 8, r).expect("modulus 2");
        let spec = BoundSpec::new(Bounds::Interval { lo: vec![lo; 8], hi: vec![hi; 8] });
        let rep = orientation::orient_mod_k_search_with(&g, &p, &spec, &Orientation::new(), &SearchConfig::default())
            .on(&g)?;
        ensure(rep.outcome == SearchOutcome::Infeasible, &g, || {
            format!("out-degrees in {{{lo},{hi}}}: {:?}", rep.outcome)
        })?;
        pass.notes.insert(format!("K8 with out-degrees in {{{lo},{hi}}} refuted after {} node(s)", rep.nodes));
        pass.tick();
    }
    Ok(pass)
}

/// Some orientation has every out-degree divisible by k (exhaustive).
pub fn star_orientation_exists(g: &MultiGraph, k: usize) -> bool {
    let m = g.edge_count();
    let edges = g.edges();
    (0..1u64 << m).any(|mask| {
        let mut out = vec![0usize; g.vertex_count()];
        for (i, e) in edges.iter().enumerate() {
            out[if mask >> i & 1 == 1 { e.u } else { e.v }] += 1;
        }
        out.iter().all(|d| d % k == 0)
    })
}

fn star_instance(index: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let (g, k, expect) = match index {
        0 => (gen::complete_graph(4, 1), 3, Some(false)),
        1 => (gen::complete_bipartite(3, 3, 1), 3, Some(true)),
        _ => {
            let k = rng.gen_range(2..=3);
            let m = k * rng.gen_range(1..=14 / k);
            let n = rng.gen_range(2..=6);
            (gen::random_multigraph(n, m, rng).on(&MultiGraph::new(0))?, k, None)
        }
    };
    let exists = star_orientation_exists(&g, k);
    let mut pass = Pass::default();
    if let Some(e) = expect {
        ensure(exists == e, &g, || format!("oracle says {exists} for k = {k}"))?;
        pass.tick();
    }
    match factor::star_decomposition(&g, k).on(&g)? {
        StarDecomposition::Stars { stars, .. } => {
            ensure(exists, &g, || format!("stars found for k = {k} but the oracle has none"))?;
            ensure(factor::verify_stars(&g, k, &stars), &g, || "invalid star decomposition".into())?;
        }
        StarDecomposition::Infeasible => {
            ensure(!exists, &g, || format!("k = {k}: search says infeasible, oracle disagrees"))?
        }
    }
    pass.tick();
    Ok(pass)
}

fn branching_instance(_: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let m = rng.gen_range(1..=2);
    let g = random_graph(rng, (2, 7), (2 * m, 7 * m + 4), |g| lambda_at_least(g, 2 * m))?;
    let n = g.vertex_count();
    let mut r = vec![0usize; n];
    for _ in 0..m {
        r[rng.gen_range(0..n)] += 1;
    }
    let kind = if rng.gen_bool(0.5) { BranchingKind::Out } else { BranchingKind::In };
    let z0 = rng.gen_range(0..n);
    let b = tree_packing::disjoint_branchings(&g, m, &r, kind, Some(z0)).on(&g)?;
    let mut pass = Pass::default();
    let mut roots = vec![0usize; n];
    b.branchings.iter().for_each(|br| roots[br.root] += 1);
    ensure(b.branchings.len() == m && roots == r, &g, || format!("root multiplicities {roots:?}, wanted {r:?}"))?;
    pass.tick();
    let mut used = BTreeSet::new();
    for br in &b.branchings {
        ensure(tree_packing::verify_branching(&g, &b.orientation, br, kind), &g, || {
            format!("{kind:?} branching at {} is broken", br.root)
        })?;
        ensure(br.edges.iter().all(|&e| used.insert(e)), &g, || "branchings share an edge".into())?;
        pass.tick();
    }
    ensure(b.orientation.is_total(&g), &g, || "orientation is partial".into())?;
    let deg = g.degrees();
    let capped = match kind {
        BranchingKind::Out => b.orientation.out_degrees(&g),
        BranchingKind::In => b.orientation.in_degrees(&g),
    };
    for v in 0..n {
        let cap = if v == z0 { deg[v] / 2 } else { deg[v].div_ceil(2) };
        ensure(capped[v] <= cap, &g, || format!("vertex {v}: {} exceeds cap {cap}", capped[v]))?;
        pass.tick();
    }
    Ok(pass)
}

/// Number of supersets of F1 / F2 splitting E within both windows.
fn feasible_splits(g: &MultiGraph, w: &[Vec<(i64, i64)>; 2], f1: &BTreeSet<EdgeId>, f2: &BTreeSet<EdgeId>) -> usize {
    let free: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !f1.contains(e) && !f2.contains(e)).collect();
    let n = g.vertex_count();
    (0u64..1 << free.len())
        .filter(|mask| {
            let mut g1 = f1.clone();
            g1.extend((0..free.len()).filter(|i| mask >> i & 1 == 1).map(|i| free[i]));
            let d1 = degrees_within(g, &g1);
            let deg = g.degrees();
            (0..n).all(|v| {
                let (a, b) = (d1[v] as i64, (deg[v] - d1[v]) as i64);
                w[0][v].0 <= a && a <= w[0][v].1 && w[1][v].0 <= b && b <= w[1][v].1
            })
        })
        .count()
}

fn rule_instance(_: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let n = rng.gen_range(2..=6);
    let mut g = MultiGraph::new(n);
    let mut o = Orientation::new();
    let dir = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { Dir::Forward } else { Dir::Backward };
    for i in 0..n - 1 {
        let id = g.add_edge(i, i + 1).on(&g)?;
        o.set(id, dir(rng));
    }
    for _ in 0..rng.gen_range(0..8) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            let id = g.add_edge(a, b).on(&g)?;
            o.set(id, dir(rng));
        }
    }
    let ids = g.edge_ids();
    let classes: Vec<u8> = ids.iter().map(|_| rng.gen_range(0..3)).collect();
    let mut f1: BTreeSet<EdgeId> = ids.iter().zip(&classes).filter(|(_, &c)| c == 1).map(|(&e, _)| e).collect();
    let f2: BTreeSet<EdgeId> = ids.iter().zip(&classes).filter(|(_, &c)| c == 2).map(|(&e, _)| e).collect();
    if f1.is_empty() && f2.is_empty() {
        f1.insert(ids[0]);
    }
    let (outs, ins) = (o.out_degrees(&g), o.in_degrees(&g));
    let s2: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
    let s1: Vec<usize> =
        (0..n).map(|v| rng.gen_range(0..3usize).max(outs[v].saturating_sub(ins[v]).saturating_sub(s2[v]))).collect();
    let d = decomposition::eulerian_rule_decomposition(&g, &o, &f1, &f2, &s1, &s2).on(&g)?;
    let mut pass = Pass::default();
    ensure(f1.is_subset(&d.g1) && f2.is_subset(&d.g2) && d.g1.len() + d.g2.len() == g.edge_count(), &g, || {
        "parts do not extend F1 / F2".into()
    })?;
    let w = decomposition::rule_windows(&g, &o, &f1, &f2, &s1, &s2);
    for (i, part) in [&d.g1, &d.g2].into_iter().enumerate() {
        let deg = degrees_within(&g, part);
        for v in 0..n {
            let x = deg[v] as i64;
            ensure(w[i][v].0 <= x && x <= w[i][v].1, &g, || {
                format!("G{} degree {x} at {v} outside {:?}", i + 1, w[i][v])
            })?;
            pass.tick();
        }
    }
    if g.edge_count() <= 12 {
        ensure(feasible_splits(&g, &w, &f1, &f2) >= 1, &g, || "enumeration finds no split".into())?;
        pass.tick();
    }
    Ok(pass)
}

fn eulerian_10_instance(index: usize, _: &mut ChaCha8Rng) -> Outcome {
    let n = 11 + index;
    let g = gen::circulant(n, &[1, 2, 3, 4, 5]).on(&MultiGraph::new(0))?;
    let f = ResidueMap::constant(2, n, 0).on(&g)?;
    let h = factor::connected_f_factor(&g, &f).on(&g)?;
    let mut pass = Pass::default();
    ensure(h.degrees.iter().all(|d| *d == 4 || *d == 6), &g, || format!("degrees {:?}", h.degrees))?;
    let sub = g.spanning_subgraph(h.edges.iter().copied()).on(&g)?;
    ensure(sub.is_connected(), &g, || "factor is disconnected".into())?;
    pass.tick();
    pass.notes.insert(format!("circulant({n}): factor with {} edges", h.edges.len()));
    Ok(pass)
}

fn bipartite_instance(index: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut pass = Pass::default();
    if index == 0 {
        let g = gen::complete_bipartite(3, 3, 2);
        let sides = factor::bipartition(&g).ok_or_else(|| bad(&g, "not bipartite"))?;
        for f in all_residues(3, 6).filter(|f| factor::is_compatible(&sides, f)) {
            let h = factor::bipartite_f_factor(&g, &f, Regime::Edge3k3, None).on(&g)?;
            for v in 0..6 {
                let (d, x) = (g.degree(v) as i64, h.degrees[v] as i64);
                ensure(d / 2 - 2 <= x && x <= (d + 1) / 2 + 2 && f.matches(v, h.degrees[v]), &g, || {
                    format!("f = {:?}: d_H({v}) = {x}", f.values())
                })?;
            }
            pass.tick();
        }
        return Ok(pass);
    }
    let (a, b) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let g = gen::random_bipartite(a, b, rng.gen_range(1..=10), rng);
    let sides = factor::bipartition(&g).ok_or_else(|| bad(&g, "not bipartite"))?;
    let h: BTreeSet<EdgeId> = g.edge_ids().into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    let o = factor::factor_to_orientation(&g, &sides, &h);
    ensure(factor::orientation_to_factor(&g, &sides, &o) == h, &g, || "factor round trip differs".into())?;
    let mut o2 = Orientation::new();
    for e in g.edges() {
        o2.set(e.id, if rng.gen_bool(0.5) { Dir::Forward } else { Dir::Backward });
    }
    let h2 = factor::orientation_to_factor(&g, &sides, &o2);
    ensure(factor::factor_to_orientation(&g, &sides, &h2) == o2, &g, || "orientation round trip differs".into())?;
    let k = rng.gen_range(2..=4);
    let dh = degrees_within(&g, &h);
    let f = ResidueMap::new(k, dh.iter().map(|&x| x as i64).collect()).on(&g)?;
    let p = factor::factor_residues_to_p(&g, &sides, &f).on(&g)?;
    let outs = o.out_degrees(&g);
    ensure((0..a + b).all(|v| p.matches(v, outs[v])), &g, || "p-orientation does not match the factor".into())?;
    pass.tick();
    Ok(pass)
}

fn is_spanning_tree(g: &MultiGraph, tree: &[EdgeId]) -> bool {
    let n = g.vertex_count();
    let mut dsu = Dsu::new(n);
    tree.len() + 1 == n && tree.iter().all(|&id| g.edge(id).is_some_and(|e| dsu.union(e.u, e.v)))
}

fn catlin_instance(_: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let m = rng.gen_range(1..=2);
    let g = random_graph(rng, (2, 7), (2 * m, 7 * m + 4), |g| lambda_at_least(g, 2 * m))?;
    let n = g.vertex_count();
    let avoid: Vec<EdgeId> = g.edge_ids().choose_multiple(rng, m).copied().collect();
    let z0 = rng.gen_range(0..n);
    let c = tree_packing::catlin_factor(&g, m, &avoid, Some(z0), None).on(&g)?;
    let mut pass = Pass::default();
    let mut used = BTreeSet::new();
    ensure(c.trees.len() == m, &g, || "wrong number of trees".into())?;
    for t in &c.trees {
        ensure(is_spanning_tree(&g, t), &g, || "not a spanning tree".into())?;
        ensure(t.iter().all(|e| !avoid.contains(e) && Some(*e) != c.excluded && used.insert(*e)), &g, || {
            "tree uses a forbidden or shared edge".into()
        })?;
    }
    let odd = g.degree(z0) % 2 == 1;
    let excl_ok = match c.excluded {
        Some(e) => odd && g.edge(e).is_some_and(|ed| ed.touches(z0)),
        None => !odd,
    };
    ensure(excl_ok, &g, || format!("exclusion at z0 = {z0} is wrong: {:?}", c.excluded))?;
    pass.tick();
    for mm in 1..=3 {
        match tree_packing::spanning_tree_packing(&g, mm).on(&g)? {
            Packing::Trees(ts) => {
                let mut used = BTreeSet::new();
                let ok =
                    ts.len() == mm && ts.iter().all(|t| is_spanning_tree(&g, t) && t.iter().all(|e| used.insert(*e)));
                ensure(ok, &g, || format!("bad {mm}-tree packing"))?;
            }
            Packing::Deficient(parts) => {
                let mut seen: Vec<usize> = parts.iter().flatten().copied().collect();
                seen.sort_unstable();
                let t = parts.len();
                let ok = seen == (0..n).collect::<Vec<_>>()
                    && t >= 2
                    && tree_packing::partition_boundary(&g, &parts) < 2 * mm * (t - 1);
                ensure(ok, &g, || format!("bad deficiency certificate for m = {mm}"))?;
            }
        }
        pass.tick();
    }
    Ok(pass)
}

fn lifting_instance(index: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut pass = Pass::default();
    if index % 4 == 3 {
        let m = rng.gen_range(1..=2);
        let g = random_graph(rng, (3, 6), (2 * m + 1, 6 * m + 3), |g| {
            g.min_degree() <= 2 * m && tree_packing::is_m_tree_connected(g, m).unwrap_or(false)
        })?;
        let u = (0..g.vertex_count()).min_by_key(|&v| g.degree(v)).expect("nonempty");
        let ts = lifting::split_off_tree_connected(&g, u, m).on(&g)?;
        ensure(ts.lifts + m <= g.degree(u), &g, || format!("{} lifts at a degree-{} vertex", ts.lifts, g.degree(u)))?;
        ensure(tree_packing::is_m_tree_connected(&ts.graph, m).on(&g)?, &g, || {
            format!("split at {u} loses {m}-tree-connectivity")
        })?;
        pass.tick();
        return Ok(pass);
    }
    for _ in 0..gen::MAX_ATTEMPTS {
        let (g, mode) = match index % 4 {
            0 => {
                let g = random_graph(rng, (2, 6), (3, 14), |g| lambda_at_least(g, 2))?;
                (g.clone(), LiftMode::PreserveLambda(connectivity::edge_connectivity_value(&g)))
            }
            1 => {
                let m = rng.gen_range(1..=2);
                let m_prime = m + rng.gen_range(0..=1);
                (random_graph(rng, (2, 6), (3, 16), |_| true)?, LiftMode::PreserveParity { m, m_prime })
            }
            _ => {
                let n = rng.gen_range(1..=2);
                let n_prime = n + rng.gen_range(0..=1);
                let nv = rng.gen_range(2..=6);
                let g = gen::hamiltonian_union(nv, rng.gen_range(2..=4), rng).on(&MultiGraph::new(0))?;
                (g, LiftMode::PreserveSizeParity { n, n_prime })
            }
        };
        let u = (0..g.vertex_count()).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).expect("nonempty");
        let pair = match lifting::find_admissible_lift(&g, u, mode, None) {
            Err(Error::Precondition(_)) => continue,
            other => other.on(&g)?,
        };
        let (a, b) = pair.ok_or_else(|| bad(&g, format!("no admissible lift at {u} for {mode:?}")))?;
        let (h, _) = lifting::lift_pair(&g, u, a, b).on(&g)?;
        let holds = match mode {
            LiftMode::PreserveLambda(l) => lambda_at_least(&h, l),
            LiftMode::PreserveParity { m, m_prime } => {
                connectivity::is_parity_edge_connected(&h, CutMode::CutParity { m, m_prime }, Some(u)).on(&g)?.holds()
            }
            LiftMode::PreserveSizeParity { n, n_prime } => {
                connectivity::is_parity_edge_connected(&h, CutMode::SetParity { n, n_prime }, Some(u)).on(&g)?.holds()
            }
        };
        ensure(holds, &g, || format!("lift {a},{b} at {u} breaks {mode:?}"))?;
        pass.tick();
        return Ok(pass);
    }
    Err(unlabeled("no instance met the lift preconditions"))
}

fn hybrid_instance(_: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let k = rng.gen_range(3..=4);
    let regime = *[Regime::Edge3k3, Regime::Tree2k2, Regime::OddEdge].choose(rng).unwrap();
    for _ in 0..gen::MAX_ATTEMPTS {
        let g = random_graph(rng, (2, 4), (4, 16), |_| true)?;
        let p = compatible_residues(rng, &g, k);
        if orientation::check_regime(&g, &p, regime).is_err() {
            continue;
        }
        let spec = BoundSpec::new(regime.bounds());
        let oracle = orientation::orient_mod_k_search(&g, &p, &spec).on(&g)?;
        let mut pass = Pass::default();
        match orientation::orient_mod_k_bounded(&g, &p, regime, None) {
            Ok(b) => {
                let rep = orientation::verify_orientation(&g, &b.orientation, &p, &spec);
                ensure(rep.ok, &g, || format!("{regime:?}, p = {:?}: {:?}", p.values(), rep.violations))?;
            }
            Err(e) => {
                let found = matches!(oracle, SearchOutcome::Found(_));
                return Err(bad(
                    &g,
                    format!("{regime:?}, p = {:?}: hybrid failed ({e}), oracle found one: {found}", p.values()),
                ));
            }
        }
        ensure(matches!(oracle, SearchOutcome::Found(_)), &g, || {
            format!("{regime:?}: hypothesis holds, oracle finds nothing")
        })?;
        pass.tick();
        return Ok(pass);
    }
    Err(unlabeled("no instance met the regime hypothesis"))
}
