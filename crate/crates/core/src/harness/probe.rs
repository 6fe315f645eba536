//! Bounded searches for counterexamples to open statements about
//! orientations and factors. Only counterexamples confirmed by a second,
//! independently ordered search are reported.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gen::{rng_for, Ensemble};
use super::io::write_graph;
use crate::connectivity::{self, CutOracle};
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, Orientation, ResidueMap};
use crate::orientation::{self, BoundSpec, Bounds, SearchConfig, SearchOutcome};
use crate::tree_packing;

pub const PROBE_IDS: [&str; 5] = ["conj-2k-1", "que-4k-2", "que-odd-sets", "conj-k-tree", "conj-delta5"];

/// Exhaustive residue enumeration below this many maps; sampling above.
const ALL_RESIDUES_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: usize,
    pub graph: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: String,
    pub k: usize,
    /// Premise threshold lowered by one.
    pub weakened: bool,
    pub instances: usize,
    pub premise_failed: usize,
    /// Instances whose every claim was settled.
    pub decided: usize,
    pub counterexamples: Vec<Counterexample>,
    pub budget_exhausted: bool,
    pub nodes: u64,
}

impl ProbeReport {
    pub fn status(&self) -> &'static str {
        if !self.counterexamples.is_empty() {
            "counterexample found"
        } else if self.budget_exhausted {
            "none found within budget"
        } else {
            "none found"
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "probe {}\nk {}\nweakened {}\ninstances {}\npremise_failed {}\ndecided {}\nnodes {}\n",
            self.probe, self.k, self.weakened, self.instances, self.premise_failed, self.decided, self.nodes
        );
        for c in &self.counterexamples {
            s.push_str(&format!("counterexample {} {}\n", c.index, c.detail));
            for line in c.graph.lines() {
                s.push_str(&format!("  {line}\n"));
            }
        }
        s.push_str(&format!("status {}\n", self.status()));
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[derive(Debug, Clone)]
pub struct ProbeParams {
    pub k: usize,
    /// Total search nodes over the whole probe.
    pub budget: u64,
    pub weaken: bool,
    /// Residue maps sampled per graph when enumeration is too large.
    pub samples: usize,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams { k: 3, budget: orientation::DEFAULT_NODE_BUDGET, weaken: false, samples: 16 }
    }
}

/// One claim on one graph: an orientation with residues `p` inside `windows`.
struct Claim {
    p: ResidueMap,
    lo: Vec<usize>,
    hi: Vec<usize>,
    label: String,
}

enum Verdict {
    Holds,
    Fails,
    OutOfBudget,
}

struct Budget {
    left: u64,
    used: u64,
}

impl Budget {
    fn config(&self) -> SearchConfig {
        SearchConfig { node_budget: self.left, cancel: None }
    }

    fn spend(&mut self, nodes: u64) {
        self.used += nodes;
        self.left = self.left.saturating_sub(nodes);
    }
}

fn reversed_edges(g: &MultiGraph) -> MultiGraph {
    let mut h = MultiGraph::new(g.vertex_count());
    for e in g.edges().iter().rev() {
        h.add_edge(e.v, e.u).expect("loopless");
    }
    h
}

fn decide_orientation(g: &MultiGraph, c: &Claim, budget: &mut Budget) -> Result<Verdict> {
    let spec = BoundSpec::new(Bounds::Interval { lo: c.lo.clone(), hi: c.hi.clone() });
    let mut verdicts = Vec::new();
    for h in [g.clone(), reversed_edges(g)] {
        let rep = orientation::orient_mod_k_search_with(&h, &c.p, &spec, &Orientation::new(), &budget.config())?;
        budget.spend(rep.nodes);
        match rep.outcome {
            SearchOutcome::Found(_) => return Ok(Verdict::Holds),
            SearchOutcome::Infeasible => verdicts.push(()),
            SearchOutcome::Exhausted | SearchOutcome::Cancelled => return Ok(Verdict::OutOfBudget),
        }
    }
    Ok(Verdict::Fails)
}

fn residue_maps(g: &MultiGraph, k: usize, samples: usize, seed: u64, index: usize) -> Vec<ResidueMap> {
    let n = g.vertex_count();
    let total = k.checked_pow(n as u32).unwrap_or(usize::MAX);
    if total <= ALL_RESIDUES_LIMIT {
        return (0..total)
            .map(|mut c| {
                (0..n)
                    .map(|_| {
                        let x = (c % k) as i64;
                        c /= k;
                        x
                    })
                    .collect::<Vec<i64>>()
            })
            .filter_map(|v| ResidueMap::new(k, v).ok())
            .filter(|p| p.compatible_with(g))
            .collect();
    }
    let mut rng = rng_for(seed ^ 0x5eed_5eed, index as u64);
    (0..samples)
        .map(|_| {
            let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(0..k as i64)).collect();
            let s: i64 = v.iter().sum();
            v[0] += g.edge_count() as i64 - s;
            ResidueMap::new(k, v).expect("positive modulus")
        })
        .collect()
}

fn eulerian_even_order(g: &MultiGraph) -> bool {
    g.vertex_count().is_multiple_of(2) && g.degrees().iter().all(|d| d % 2 == 0)
}

/// d+ in {d/2 - k, d/2 + k} everywhere.
fn two_value_claim(g: &MultiGraph, k: usize) -> Result<Claim> {
    let deg = g.degrees();
    let p = ResidueMap::new(2 * k, deg.iter().map(|&d| d as i64 / 2 - k as i64).collect())?;
    Ok(Claim {
        p,
        lo: deg.iter().map(|&d| (d / 2).saturating_sub(k)).collect(),
        hi: deg.iter().map(|&d| d / 2 + k).collect(),
        label: "d/2 +- k".into(),
    })
}

fn min_odd_set_cut(g: &MultiGraph) -> Result<usize> {
    let n = g.vertex_count();
    connectivity::require_guard(n)?;
    let oracle = CutOracle::new(g);
    Ok((1u64..(1 << n) - 1).filter(|m| m.count_ones() % 2 == 1).map(|m| oracle.cut(m)).min().unwrap_or(usize::MAX))
}

/// Premise and claims for one instance; `None` when the premise fails.
fn claims_for(id: &str, g: &MultiGraph, params: &ProbeParams, seed: u64, index: usize) -> Result<Option<Vec<Claim>>> {
    let k = params.k;
    let w = usize::from(params.weaken);
    let n = g.vertex_count();
    let deg = g.degrees();
    let lambda = || connectivity::edge_connectivity_value(g);
    Ok(match id {
        "conj-2k-1" => {
            if k < 3 || lambda() + w < 2 * k - 1 {
                return Ok(None);
            }
            let claims = residue_maps(g, k, params.samples, seed, index)
                .into_iter()
                .map(|p| Claim {
                    label: format!("p = {:?}", p.values()),
                    p,
                    lo: deg.iter().map(|&d| (d / 2).saturating_sub(k - 1)).collect(),
                    hi: deg.iter().map(|&d| d.div_ceil(2) + k - 1).collect(),
                })
                .collect();
            Some(claims)
        }
        "que-4k-2" => {
            if !eulerian_even_order(g) || lambda() + w < 4 * k - 2 {
                return Ok(None);
            }
            Some(vec![two_value_claim(g, k)?])
        }
        "que-odd-sets" => {
            if !eulerian_even_order(g) || min_odd_set_cut(g)? + w < 4 * k - 2 {
                return Ok(None);
            }
            Some(vec![two_value_claim(g, k)?])
        }
        "conj-k-tree" => {
            let m = k.saturating_sub(w);
            if n < 2 || m == 0 || !tree_packing::is_m_tree_connected(g, m)? {
                return Ok(None);
            }
            let mut rng = rng_for(seed ^ 0x7ee5, index as u64);
            let claims = residue_maps(g, k, params.samples, seed, index)
                .into_iter()
                .map(|p| {
                    let s: Vec<usize> = (0..n).map(|v| usize::from(v != 0 && rng.gen_bool(0.5))).collect();
                    let (smax, smin) =
                        (s[1..].iter().max().copied().unwrap_or(0), s[1..].iter().min().copied().unwrap_or(0));
                    let mut lo: Vec<usize> = s.clone();
                    let mut hi: Vec<usize> = (0..n).map(|v| (deg[v] + s[v]).saturating_sub(1)).collect();
                    lo[0] = 1 - smax;
                    hi[0] = deg[0] - smin;
                    Claim { label: format!("p = {:?}, s = {s:?}", p.values()), p, lo, hi }
                })
                .collect();
            Some(claims)
        }
        _ => unreachable!("checked by caller"),
    })
}

/// Split E into two connected spanning factors with max degree <= 3 in
/// the second, by exhaustive search in the given edge order.
fn delta5_split(g: &MultiGraph, budget: &mut Budget) -> Option<bool> {
    let n = g.vertex_count();
    let edges = g.edges().to_vec();
    let mut side = vec![false; edges.len()];
    let mut d2 = vec![0usize; n];
    let mut nodes = 0u64;
    fn connected(n: usize, edges: &[crate::graph::Edge], side: &[bool], want: bool) -> bool {
        let mut h = MultiGraph::new(n);
        for (e, &s) in edges.iter().zip(side) {
            if s == want {
                h.add_edge(e.u, e.v).expect("loopless");
            }
        }
        h.is_connected()
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        n: usize,
        edges: &[crate::graph::Edge],
        side: &mut [bool],
        d2: &mut [usize],
        nodes: &mut u64,
        limit: u64,
    ) -> Option<bool> {
        *nodes += 1;
        if *nodes > limit {
            return None;
        }
        if i == edges.len() {
            return Some(connected(n, edges, side, true) && connected(n, edges, side, false));
        }
        let e = edges[i];
        if d2[e.u] < 3 && d2[e.v] < 3 {
            side[i] = true;
            d2[e.u] += 1;
            d2[e.v] += 1;
            let r = go(i + 1, n, edges, side, d2, nodes, limit);
            side[i] = false;
            d2[e.u] -= 1;
            d2[e.v] -= 1;
            if r != Some(false) {
                return r;
            }
        }
        go(i + 1, n, edges, side, d2, nodes, limit)
    }
    let r = go(0, n, &edges, &mut side, &mut d2, &mut nodes, budget.left);
    budget.spend(nodes);
    r
}

pub fn probe_conjecture(id: &str, ens: &Ensemble, params: &ProbeParams) -> Result<ProbeReport> {
    if !PROBE_IDS.contains(&id) {
        return Err(Error::domain(format!("unknown probe {id:?}; known: {}", PROBE_IDS.join(", "))));
    }
    if params.k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    let mut report = ProbeReport {
        probe: id.to_string(),
        k: params.k,
        weakened: params.weaken,
        instances: 0,
        premise_failed: 0,
        decided: 0,
        counterexamples: Vec::new(),
        budget_exhausted: params.budget == 0,
        nodes: 0,
    };
    let mut budget = Budget { left: params.budget, used: 0 };
    for index in 0..ens.count {
        if budget.left == 0 {
            report.budget_exhausted = true;
            break;
        }
        report.instances += 1;
        let g = match ens.instance(index) {
            Ok(g) => g,
            Err(Error::Precondition(_)) => {
                report.premise_failed += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if id == "conj-delta5" {
            let w = usize::from(params.weaken);
            if g.max_degree() > 5 || g.vertex_count() < 2 || connectivity::edge_connectivity_value(&g) + w < 4 {
                report.premise_failed += 1;
                continue;
            }
            match delta5_split(&g, &mut budget) {
                Some(true) => report.decided += 1,
                Some(false) => {
                    if delta5_split(&reversed_edges(&g), &mut budget) == Some(false) {
                        report.decided += 1;
                        report.counterexamples.push(Counterexample {
                            index,
                            graph: write_graph(&g),
                            detail: "no split into connected factors with max degree 3 in one".into(),
                        });
                    } else {
                        report.budget_exhausted = true;
                    }
                }
                None => report.budget_exhausted = true,
            }
            continue;
        }
        let Some(claims) = claims_for(id, &g, params, ens.seed, index)? else {
            report.premise_failed += 1;
            continue;
        };
        let mut settled = true;
        for c in &claims {
            match decide_orientation(&g, c, &mut budget)? {
                Verdict::Holds => {}
                Verdict::Fails => {
                    report.counterexamples.push(Counterexample {
                        index,
                        graph: write_graph(&g),
                        detail: c.label.clone(),
                    });
                    break;
                }
                Verdict::OutOfBudget => {
                    report.budget_exhausted = true;
                    settled = false;
                    break;
                }
            }
        }
        if settled {
            report.decided += 1;
        }
        if report.budget_exhausted {
            break;
        }
    }
    report.nodes = budget.used;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::GenKind;

    fn ens(kind: GenKind, count: usize) -> Ensemble {
        Ensemble { kind, seed: 3, count, lambda: 0 }
    }

    #[test]
    fn conj_2k_1_holds_on_small_circulants() {
        let e = ens(GenKind::Circulant { n: 6, connections: vec![1, 2, 3] }, 1);
        let r = probe_conjecture("conj-2k-1", &e, &ProbeParams::default()).unwrap();
        assert_eq!((r.premise_failed, r.decided, r.status()), (0, 1, "none found"));
    }

    #[test]
    fn budget_zero_stops_at_once() {
        let e = ens(GenKind::Complete { n: 5 }, 3);
        let r = probe_conjecture("conj-2k-1", &e, &ProbeParams { budget: 0, ..Default::default() }).unwrap();
        assert_eq!((r.instances, r.status()), (0, "none found within budget"));
    }

    #[test]
    fn two_value_claim_on_c4() {
        // sources and sinks alternate: out-degrees 0 and 2 = d/2 -+ 1
        let e = ens(GenKind::Circulant { n: 4, connections: vec![1] }, 1);
        let p = ProbeParams { k: 1, ..Default::default() };
        let r = probe_conjecture("que-4k-2", &e, &p).unwrap();
        assert_eq!((r.premise_failed, r.decided, r.status()), (0, 1, "none found"));
        let strict = probe_conjecture("que-4k-2", &e, &ProbeParams { k: 2, ..Default::default() }).unwrap();
        assert_eq!(strict.premise_failed, 1);
    }

    #[test]
    fn delta5_on_k5() {
        // K5 is 4-regular and 4-edge-connected
        let e = ens(GenKind::Complete { n: 5 }, 1);
        let r = probe_conjecture("conj-delta5", &e, &ProbeParams::default()).unwrap();
        assert_eq!((r.decided, r.status()), (1, "none found"));
    }

    #[test]
    fn unknown_probe() {
        let e = ens(GenKind::Complete { n: 3 }, 1);
        assert!(probe_conjecture("conj-x", &e, &ProbeParams::default()).is_err());
    }
}
