//! Modulo-k orientations with bounded out-degrees: the constructive mod-2
//! algorithm, an exact backtracking oracle and a reduction-plus-search
//! solver for the edge-, odd-edge- and tree-connected regimes.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alpha;
use crate::connectivity::{self, CutOracle, SUBSET_GUARD};
use crate::error::{Error, Result};
use crate::factor::mixed_parity_extension;
use crate::graph::{Dir, Dsu, Edge, EdgeId, MultiGraph, Orientation, ResidueMap, VertexSet};
use crate::lifting::{self, LiftLedger, LiftMode};
use crate::tree_packing;

pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

/// Cooperative cancellation flag shared between a caller and a search.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

/// Per-vertex out-degree bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bounds {
    Interval {
        lo: Vec<usize>,
        hi: Vec<usize>,
    },
    /// floor(d/2) - c <= d+ <= ceil(d/2) + c.
    FloorCeil(usize),
    /// |d+ - d/2| <= k - 1 + |alpha(v)|.
    Alpha,
    /// k/2 - 1 <= d+ <= d - k/2 + 1.
    Tree,
    Unbounded,
}

/// Required out-degree at one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pin {
    pub vertex: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub bounds: Bounds,
    pub pin: Option<Pin>,
}

impl BoundSpec {
    pub fn new(bounds: Bounds) -> Self {
        BoundSpec { bounds, pin: None }
    }

    pub fn with_pin(mut self, pin: Option<Pin>) -> Self {
        self.pin = pin;
        self
    }

    /// Integer window [lo, hi] for every vertex, pin included. An empty
    /// window has lo > hi.
    pub fn windows(&self, g: &MultiGraph, p: &ResidueMap) -> Result<Vec<(i64, i64)>> {
        let n = g.vertex_count();
        if p.len() != n {
            return Err(Error::domain("residue map has wrong length"));
        }
        let k = p.modulus() as i64;
        let mut w = Vec::with_capacity(n);
        for v in 0..n {
            let d = g.degree(v) as i64;
            let (lo, hi) = match &self.bounds {
                Bounds::Interval { lo, hi } => {
                    if lo.len() != n || hi.len() != n {
                        return Err(Error::domain("interval bounds have wrong length"));
                    }
                    (lo[v] as i64, hi[v] as i64)
                }
                Bounds::FloorCeil(c) => (d / 2 - *c as i64, (d + 1) / 2 + *c as i64),
                Bounds::Alpha => {
                    let a2 = alpha::alpha_of_vertex(g, p, v)?.abs_twice();
                    let slack = 2 * k - 2 + a2;
                    ((d - slack + 1).div_euclid(2), (d + slack).div_euclid(2))
                }
                Bounds::Tree => ((k - 1) / 2, d - (k - 1) / 2),
                Bounds::Unbounded => (0, d),
            };
            w.push((lo.max(0), hi.min(d)));
        }
        if let Some(pin) = self.pin {
            if pin.vertex >= n {
                return Err(Error::domain(format!("pinned vertex {} out of range", pin.vertex)));
            }
            let t = pin.target as i64;
            let (lo, hi) = w[pin.vertex];
            w[pin.vertex] = if lo <= t && t <= hi { (t, t) } else { (1, 0) };
        }
        Ok(w)
    }
}

/// Outcome of a verification: `ok` exactly when `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl OrientationReport {
    fn from(violations: Vec<String>) -> Self {
        OrientationReport { ok: violations.is_empty(), violations }
    }
}

/// Check residues and bounds exactly.
pub fn verify_orientation(g: &MultiGraph, o: &Orientation, p: &ResidueMap, spec: &BoundSpec) -> OrientationReport {
    let mut bad = Vec::new();
    if !o.is_total(g) {
        bad.push("orientation is not total".to_string());
        return OrientationReport::from(bad);
    }
    let windows = match spec.windows(g, p) {
        Ok(w) => w,
        Err(e) => return OrientationReport::from(vec![e.to_string()]),
    };
    for (v, &out) in o.out_degrees(g).iter().enumerate() {
        if !p.matches(v, out) {
            bad.push(format!("d+({v}) = {out} is not {} mod {}", p.get(v), p.modulus()));
        }
        let (lo, hi) = windows[v];
        if (out as i64) < lo || (out as i64) > hi {
            bad.push(format!("d+({v}) = {out} outside [{lo}, {hi}]"));
        }
    }
    OrientationReport::from(bad)
}

/// Consequence forms of the bounded theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Consequence {
    /// d+ in {d/2 - k/2, d/2, d/2 + k/2}.
    HalfSteps,
    /// d+ in {d/2 - k, d/2 + k}.
    FullSteps,
}

pub fn check_consequence(g: &MultiGraph, o: &Orientation, k: usize, form: Consequence) -> OrientationReport {
    if !o.is_total(g) {
        return OrientationReport::from(vec!["orientation is not total".into()]);
    }
    let k = k as i64;
    let mut bad = Vec::new();
    for (v, &out) in o.out_degrees(g).iter().enumerate() {
        let dev = 2 * out as i64 - g.degree(v) as i64;
        let ok = match form {
            Consequence::HalfSteps => dev == 0 || dev.abs() == k,
            Consequence::FullSteps => dev.abs() == 2 * k,
        };
        if !ok {
            bad.push(format!("d+({v}) = {out} is not of the required form"));
        }
    }
    OrientationReport::from(bad)
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub node_budget: u64,
    pub cancel: Option<CancelToken>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { node_budget: DEFAULT_NODE_BUDGET, cancel: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Orientation),
    /// Proven by exhaustion.
    Infeasible,
    /// Node budget ran out before a decision.
    Exhausted,
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

/// Exact decision: a p-orientation within `spec`, or a proof that none exists.
pub fn orient_mod_k_search(g: &MultiGraph, p: &ResidueMap, spec: &BoundSpec) -> Result<SearchOutcome> {
    Ok(orient_mod_k_search_with(g, p, spec, &Orientation::new(), &SearchConfig::default())?.outcome)
}

/// As [`orient_mod_k_search`], extending the partial orientation `fixed`.
pub fn orient_mod_k_search_with(
    g: &MultiGraph,
    p: &ResidueMap,
    spec: &BoundSpec,
    fixed: &Orientation,
    cfg: &SearchConfig,
) -> Result<SearchReport> {
    let windows = spec.windows(g, p)?;
    search_windows(g, p, &windows, fixed, cfg)
}

fn search_windows(
    g: &MultiGraph,
    p: &ResidueMap,
    windows: &[(i64, i64)],
    fixed: &Orientation,
    cfg: &SearchConfig,
) -> Result<SearchReport> {
    if let Some((id, _)) = fixed.iter().find(|&(id, _)| !g.has_edge(id)) {
        return Err(Error::domain(format!("fixed edge {id} is not in the graph")));
    }
    if !p.compatible_with(g) {
        return Ok(SearchReport { outcome: SearchOutcome::Infeasible, nodes: 0 });
    }
    let n = g.vertex_count();
    let mut s = Searcher {
        k: p.modulus() as i64,
        p: p.values().iter().map(|&x| x as i64).collect(),
        lo: windows.iter().map(|w| w.0).collect(),
        hi: windows.iter().map(|w| w.1).collect(),
        edges: Vec::new(),
        dir: Vec::new(),
        out: vec![0; n],
        rem: vec![0; n],
        nodes: 0,
        cfg,
        stop: None,
    };
    for e in g.edges() {
        match fixed.get(e.id) {
            Some(d) => s.out[if d == Dir::Forward { e.u } else { e.v }] += 1,
            None => {
                s.edges.push(*e);
                s.dir.push(None);
                s.rem[e.u] += 1;
                s.rem[e.v] += 1;
            }
        }
    }
    let found = s.dfs();
    let outcome = if found {
        let mut o = fixed.clone();
        for (e, d) in s.edges.iter().zip(&s.dir) {
            o.set(e.id, d.expect("all edges decided"));
        }
        SearchOutcome::Found(o)
    } else {
        s.stop.clone().unwrap_or(SearchOutcome::Infeasible)
    };
    Ok(SearchReport { outcome, nodes: s.nodes })
}

struct Searcher<'a> {
    k: i64,
    p: Vec<i64>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    edges: Vec<Edge>,
    dir: Vec<Option<Dir>>,
    out: Vec<i64>,
    rem: Vec<i64>,
    nodes: u64,
    cfg: &'a SearchConfig,
    stop: Option<SearchOutcome>,
}

impl Searcher<'_> {
    /// Smallest and largest still reachable out-degree with the right residue.
    fn range(&self, v: usize) -> Option<(i64, i64)> {
        let a = self.out[v].max(self.lo[v]);
        let b = (self.out[v] + self.rem[v]).min(self.hi[v]);
        if a > b {
            return None;
        }
        let tmin = a + (self.p[v] - a).rem_euclid(self.k);
        let tmax = b - (b - self.p[v]).rem_euclid(self.k);
        (tmin <= tmax).then_some((tmin, tmax))
    }

    /// Vertex ranges plus, per component of the undecided edges, the exact
    /// count of out-degrees still to be handed out.
    fn consistent(&self) -> Option<Vec<(i64, i64)>> {
        let n = self.out.len();
        let ranges: Vec<(i64, i64)> = (0..n).map(|v| self.range(v)).collect::<Option<_>>()?;
        let mut dsu = Dsu::new(n);
        let mut undecided = vec![0i64; n];
        for (e, d) in self.edges.iter().zip(&self.dir) {
            if d.is_none() {
                dsu.union(e.u, e.v);
            }
        }
        for (e, d) in self.edges.iter().zip(&self.dir) {
            if d.is_none() {
                undecided[dsu.find(e.u)] += 1;
            }
        }
        let mut smin = vec![0i64; n];
        let mut smax = vec![0i64; n];
        for v in 0..n {
            let r = dsu.find(v);
            smin[r] += ranges[v].0 - self.out[v];
            smax[r] += ranges[v].1 - self.out[v];
        }
        for v in 0..n {
            if dsu.find(v) != v {
                continue;
            }
            let u = undecided[v];
            if u < smin[v] || u > smax[v] || (u - smin[v]) % self.k != 0 {
                return None;
            }
        }
        Some(ranges)
    }

    fn apply(&mut self, i: usize, d: Dir) {
        let e = self.edges[i];
        self.dir[i] = Some(d);
        self.rem[e.u] -= 1;
        self.rem[e.v] -= 1;
        self.out[if d == Dir::Forward { e.u } else { e.v }] += 1;
    }

    fn undo(&mut self, i: usize) {
        let e = self.edges[i];
        let d = self.dir[i].take().expect("edge was decided");
        self.rem[e.u] += 1;
        self.rem[e.v] += 1;
        self.out[if d == Dir::Forward { e.u } else { e.v }] -= 1;
    }

    fn dfs(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.cfg.node_budget {
            self.stop = Some(SearchOutcome::Exhausted);
            return false;
        }
        if self.nodes.is_multiple_of(1024) && self.cfg.cancel.as_ref().is_some_and(|c| c.is_cancelled()) {
            self.stop = Some(SearchOutcome::Cancelled);
            return false;
        }
        let Some(ranges) = self.consistent() else {
            return false;
        };
        let slack = |v: usize| ranges[v].1 - ranges[v].0;
        let pick = (0..self.edges.len())
            .filter(|&i| self.dir[i].is_none())
            .min_by_key(|&i| (slack(self.edges[i].u).min(slack(self.edges[i].v)), self.edges[i].id));
        let Some(i) = pick else {
            return true;
        };
        for d in [Dir::Forward, Dir::Backward] {
            self.apply(i, d);
            if self.dfs() {
                return true;
            }
            self.undo(i);
            if self.stop.is_some() {
                return false;
            }
        }
        false
    }
}

/// p-orientation modulo 2 with floor(d/2) - 1 <= d+ <= ceil(d/2) + 1,
/// optionally hitting `target` at `z0`.
pub fn orient_mod2_bounded(g: &MultiGraph, p: &ResidueMap, z0: usize, target: Option<usize>) -> Result<Orientation> {
    let n = g.vertex_count();
    if p.modulus() != 2 || p.len() != n {
        return Err(Error::domain("p must be a mod-2 map over V(G)"));
    }
    if z0 >= n {
        return Err(Error::domain(format!("vertex {z0} out of range")));
    }
    if !p.compatible_with(g) {
        return Err(Error::pre("|E| and sum of p differ in parity"));
    }
    if n >= 2 && connectivity::edge_connectivity_value(g) < 2 {
        return Err(Error::pre("graph is not 2-edge-connected"));
    }
    let spec = BoundSpec::new(Bounds::FloorCeil(1)).with_pin(target.map(|t| Pin { vertex: z0, target: t }));
    if let Some(t) = target {
        let d = g.degree(z0);
        let (lo, hi) = ((d / 2).saturating_sub(1), (d.div_ceil(2) + 1).min(d));
        if t < lo || t > hi || t % 2 != p.get(z0) {
            return Err(Error::Infeasible(format!(
                "target {t} at {z0} is not in [{lo}, {hi}] with parity {}",
                p.get(z0)
            )));
        }
    }
    if g.edge_count() == 0 {
        return Ok(Orientation::new());
    }
    let mut led = LiftLedger::new(g);
    while let Some(u) = (0..n).find(|&v| led.current().degree(v) >= 4) {
        let (a, b) = lifting::find_admissible_lift(led.current(), u, LiftMode::PreserveLambda(2), None)?
            .ok_or_else(|| Error::contract(format!("no 2-edge-connectivity preserving lift at {u}")))?;
        led.lift(u, a, b)?;
    }
    let l = led.current().clone();
    let shift = |v: usize| (g.degree(v) - l.degree(v)) / 2;
    let p_l = ResidueMap::new(2, (0..n).map(|v| p.get(v) as i64 - shift(v) as i64).collect())?;
    let t_l = match target {
        Some(t) => Some(t.checked_sub(shift(z0)).ok_or_else(|| Error::contract("pin below lifted range"))?),
        None => None,
    };
    let at_z0 = l.incident(z0);
    let d_l = at_z0.len();
    let e_set: Vec<Edge> = if d_l.is_multiple_of(2) {
        vec![at_z0[0]]
    } else {
        let mut found = None;
        'outer: for i in 0..d_l {
            for j in i + 1..d_l {
                if l.without_edges(&[at_z0[i].id, at_z0[j].id]).is_connected() {
                    found = Some(vec![at_z0[i], at_z0[j]]);
                    break 'outer;
                }
            }
        }
        found.ok_or_else(|| Error::contract(format!("no pair at {z0} keeps the graph connected")))?
    };
    let away = t_l.is_none_or(|t| t >= d_l.div_ceil(2));
    let mut base = Orientation::new();
    let mut h: Vec<i64> = p_l.values().iter().map(|&x| x as i64).collect();
    for e in &e_set {
        let tail = if away { z0 } else { e.other(z0) };
        base.set_from(e, tail);
        h[tail] -= 1;
    }
    let ids: Vec<EdgeId> = e_set.iter().map(|e| e.id).collect();
    let rest = l.without_edges(&ids);
    let g1: BTreeSet<EdgeId> = rest.edge_ids().into_iter().collect();
    let (o_rest, _) = mixed_parity_extension(&rest, &g1, &ResidueMap::new(2, h)?)?;
    base.extend_from(&o_rest);
    let o = led.induce_orientation(&base)?;
    let report = verify_orientation(g, &o, p, &spec);
    if !report.ok {
        return Err(Error::contract(format!("mod-2 orientation failed its check: {:?}", report.violations)));
    }
    Ok(o)
}

/// |d+ - d-| <= 1 everywhere, from Euler tours after pairing odd vertices
/// through an auxiliary vertex.
pub fn balanced_orientation(g: &MultiGraph) -> Result<Orientation> {
    let mut h = g.clone();
    let x = h.add_vertex();
    for v in 0..g.vertex_count() {
        if g.degree(v) % 2 == 1 {
            h.add_edge(v, x)?;
        }
    }
    let mut o = Orientation::new();
    for comp in h.components() {
        let members = VertexSet::from_iter(h.vertex_count(), comp.iter().copied());
        let ids: Vec<EdgeId> = h.edges().iter().filter(|e| members.contains(e.u)).map(|e| e.id).collect();
        if ids.is_empty() {
            continue;
        }
        let sub = h.spanning_subgraph(ids)?;
        for step in sub.euler_tour(Some(comp[0]), None)? {
            if let Some(e) = g.edge(step.edge) {
                o.set_from(e, step.from);
            }
        }
    }
    Ok(o)
}

/// Connectivity regime of the bounded solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// (3k-3)-edge-connected, or d(A) >= 2k-2+2|alpha(A)| for every A.
    Edge3k3,
    /// (2k-2)-tree-connected.
    Tree2k2,
    /// d(A) >= 2k-2+2|alpha(A)| for every A with alpha(A) != 0.
    OddEdge,
}

impl Regime {
    /// Bounds the solver targets internally.
    pub fn bounds(self) -> Bounds {
        match self {
            Regime::Edge3k3 | Regime::OddEdge => Bounds::Alpha,
            Regime::Tree2k2 => Bounds::Tree,
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" | "edge_3k3" => Ok(Regime::Edge3k3),
            "tree" | "tree_2k2" => Ok(Regime::Tree2k2),
            "odd" | "odd_edge" => Ok(Regime::OddEdge),
            _ => Err(Error::domain(format!("unknown regime {s:?}"))),
        }
    }
}

/// Check the regime's connectivity hypothesis.
pub fn check_regime(g: &MultiGraph, p: &ResidueMap, regime: Regime) -> Result<()> {
    let n = g.vertex_count();
    p.require_compatible(g)?;
    if n <= 1 {
        return Ok(());
    }
    let k = p.modulus();
    match regime {
        Regime::Tree2k2 => {
            if 2 * k > 2 && !tree_packing::is_m_tree_connected(g, 2 * k - 2)? {
                return Err(Error::pre(format!("graph is not {}-tree-connected", 2 * k - 2)));
            }
            Ok(())
        }
        Regime::Edge3k3 => {
            if connectivity::edge_connectivity_value(g) >= 3 * k - 3 {
                return Ok(());
            }
            if n > SUBSET_GUARD {
                return Err(Error::pre(format!("graph is not {}-edge-connected", 3 * k - 3)));
            }
            refined_condition(g, p, false)
        }
        Regime::OddEdge => {
            if n > SUBSET_GUARD {
                return Err(Error::SizeGuard { n, limit: SUBSET_GUARD });
            }
            refined_condition(g, p, true)
        }
    }
}

fn refined_condition(g: &MultiGraph, p: &ResidueMap, skip_zero: bool) -> Result<()> {
    let n = g.vertex_count();
    let k = p.modulus() as i64;
    let table = alpha::alpha_table(g, p);
    let oracle = CutOracle::new(g);
    let full = (1u64 << n) - 1;
    for mask in 1..full {
        let a = &table[mask as usize];
        if skip_zero && a.is_zero() {
            continue;
        }
        if (oracle.cut(mask) as i64) < 2 * k - 2 + a.abs_twice() {
            return Err(Error::pre(format!(
                "d({}) = {} is below 2k-2+2|alpha|",
                VertexSet::from_mask(n, mask),
                oracle.cut(mask)
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub search: SearchConfig,
    /// Instances with at most this many edges go straight to search.
    pub base_edges: usize,
    pub reductions: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { search: SearchConfig::default(), base_edges: 8, reductions: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridStats {
    pub lifts: usize,
    pub contractions: usize,
    pub splits: usize,
    pub searches: usize,
    /// Reductions abandoned in favour of search on the same instance.
    pub fallbacks: usize,
    pub nodes: u64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct BoundedOrientation {
    pub orientation: Orientation,
    pub stats: HybridStats,
}

pub fn orient_mod_k_bounded(
    g: &MultiGraph,
    p: &ResidueMap,
    regime: Regime,
    pin: Option<Pin>,
) -> Result<BoundedOrientation> {
    orient_mod_k_bounded_with(g, p, regime, pin, &SolverConfig::default())
}

/// Bounded p-orientation for `regime`: reductions from the existence proofs
/// (low-degree splits, tight-set contraction, lifts) with exact search at
/// the leaves and as a fallback. The result is re-verified.
pub fn orient_mod_k_bounded_with(
    g: &MultiGraph,
    p: &ResidueMap,
    regime: Regime,
    pin: Option<Pin>,
    cfg: &SolverConfig,
) -> Result<BoundedOrientation> {
    let n = g.vertex_count();
    if p.len() != n {
        return Err(Error::domain("residue map has wrong length"));
    }
    if let Some(pin) = pin {
        if pin.vertex >= n {
            return Err(Error::domain(format!("pinned vertex {} out of range", pin.vertex)));
        }
    }
    p.require_compatible(g).map_err(|e| Error::pre(e.to_string()))?;
    let k = p.modulus();
    let spec = BoundSpec::new(regime.bounds()).with_pin(pin);
    if let Some(pin) = pin {
        let (lo, hi) = BoundSpec::new(regime.bounds()).windows(g, p)?[pin.vertex];
        let t = pin.target as i64;
        if t < lo || t > hi || !p.matches(pin.vertex, pin.target) {
            return Err(Error::Infeasible(format!("target {t} at {} is not a plausible value", pin.vertex)));
        }
    }
    let mut stats = HybridStats::default();
    let orientation = if k == 1 && pin.is_none() {
        balanced_orientation(g)?
    } else if k == 2 && regime == Regime::Edge3k3 {
        check_regime(g, p, regime)?;
        orient_mod2_bounded(g, p, pin.map_or(0, |q| q.vertex), pin.map(|q| q.target))?
    } else {
        check_regime(g, p, regime)?;
        let mut h = Hybrid { regime, cfg, stats: &mut stats };
        match h.solve(g, p, pin) {
            Err(Error::Infeasible(msg)) => {
                return Err(Error::Infeasible(format!("search found no orientation under valid hypotheses: {msg}")))
            }
            other => other?,
        }
    };
    let mut report = verify_orientation(g, &orientation, p, &spec);
    if regime == Regime::Edge3k3 && k >= 1 {
        let fc = verify_orientation(g, &orientation, p, &BoundSpec::new(Bounds::FloorCeil(k - 1)));
        report.violations.extend(fc.violations);
    }
    if !report.violations.is_empty() {
        return Err(Error::contract(format!("bounded orientation failed its check: {:?}", report.violations)));
    }
    Ok(BoundedOrientation { orientation, stats })
}

struct Hybrid<'a> {
    regime: Regime,
    cfg: &'a SolverConfig,
    stats: &'a mut HybridStats,
}

fn fits(g: &MultiGraph, o: &Orientation, p: &ResidueMap, windows: &[(i64, i64)]) -> bool {
    o.is_total(g)
        && o.out_degrees(g)
            .iter()
            .enumerate()
            .all(|(v, &d)| p.matches(v, d) && windows[v].0 <= d as i64 && d as i64 <= windows[v].1)
}

impl Hybrid<'_> {
    fn solve(&mut self, g: &MultiGraph, p: &ResidueMap, pin: Option<Pin>) -> Result<Orientation> {
        let windows = BoundSpec::new(self.regime.bounds()).with_pin(pin).windows(g, p)?;
        if self.cfg.reductions && g.edge_count() > self.cfg.base_edges && g.vertex_count() > 2 {
            let attempts: &[fn(&mut Self, &MultiGraph, &ResidueMap, Option<Pin>) -> Result<Option<Orientation>>] =
                match self.regime {
                    Regime::Tree2k2 => &[Self::split_low_vertex, Self::contract_tight_set],
                    _ => &[Self::contract_tight_set, Self::lift_balanced_vertex, Self::lift_at_z0],
                };
            for attempt in attempts {
                match attempt(self, g, p, pin) {
                    Ok(None) => continue,
                    Ok(Some(o)) if fits(g, &o, p, &windows) => return Ok(o),
                    Ok(Some(_)) => self.stats.fallbacks += 1,
                    Err(e @ (Error::Budget { .. } | Error::Cancelled)) => return Err(e),
                    Err(e) => {
                        self.stats.fallbacks += 1;
                        self.stats.warnings.push(format!("reduction abandoned: {e}"));
                    }
                }
                break;
            }
        }
        self.search(g, p, &windows, &Orientation::new())
    }

    fn search(
        &mut self,
        g: &MultiGraph,
        p: &ResidueMap,
        windows: &[(i64, i64)],
        fixed: &Orientation,
    ) -> Result<Orientation> {
        self.stats.searches += 1;
        let report = search_windows(g, p, windows, fixed, &self.cfg.search)?;
        self.stats.nodes += report.nodes;
        match report.outcome {
            SearchOutcome::Found(o) => Ok(o),
            SearchOutcome::Infeasible => Err(Error::Infeasible("no orientation within the bounds".into())),
            SearchOutcome::Exhausted => Err(Error::Budget { nodes: report.nodes }),
            SearchOutcome::Cancelled => Err(Error::Cancelled),
        }
    }

    /// Split off a vertex of degree at most 3k-3, keeping (2k-2)-tree-connectivity.
    fn split_low_vertex(&mut self, g: &MultiGraph, p: &ResidueMap, pin: Option<Pin>) -> Result<Option<Orientation>> {
        let k = p.modulus();
        let n = g.vertex_count();
        let pinned = pin.map(|q| q.vertex);
        let Some(u) = (0..n).find(|&v| Some(v) != pinned && g.degree(v) <= 3 * k - 3) else {
            return Ok(None);
        };
        let lo = (k - 1) / 2;
        let m = 2 * k - 2;
        let ts = lifting::split_off_tree_connected(g, u, m)?;
        let (q, t) = (ts.unlifted.clone(), ts.lifts);
        let t1 = (0..=q.len())
            .find(|&t1| (t1 + t) % k == p.get(u) && t1 + t >= lo && q.len() - t1 + t >= lo)
            .ok_or_else(|| Error::Infeasible(format!("no split of the unlifted edges at {u}")))?;
        let cur = ts.ledger.current();
        let mut base = Orientation::new();
        let mut away_from = vec![0i64; n];
        for (i, &id) in q.iter().enumerate() {
            let e = cur.expect_edge(id)?;
            let w = e.other(u);
            if i < t1 {
                base.set_from(&e, u);
            } else {
                base.set_from(&e, w);
                away_from[w] += 1;
            }
        }
        let idx = |v: usize| if v > u { v - 1 } else { v };
        let p_h = ResidueMap::new(k, (0..n).filter(|&v| v != u).map(|v| p.get(v) as i64 - away_from[v]).collect())?;
        let pin_h = match pin {
            Some(q) => Some(Pin {
                vertex: idx(q.vertex),
                target: (q.target as i64 - away_from[q.vertex])
                    .try_into()
                    .map_err(|_| Error::Infeasible("pin unreachable after split".into()))?,
            }),
            None => None,
        };
        check_regime(&ts.graph, &p_h, self.regime)?;
        let o_h = self.solve(&ts.graph, &p_h, pin_h)?;
        base.extend_from(&o_h);
        self.stats.splits += 1;
        self.stats.lifts += t;
        Ok(Some(ts.ledger.induce_orientation(&base)?))
    }

    /// Contract a minimal tight set A (avoiding the pin), solve G/A, then
    /// extend into A on G/A^c with the cut fixed.
    fn contract_tight_set(&mut self, g: &MultiGraph, p: &ResidueMap, pin: Option<Pin>) -> Result<Option<Orientation>> {
        let n = g.vertex_count();
        if n > SUBSET_GUARD {
            self.stats.warnings.push(format!("tight-set scan skipped at n = {n}"));
            return Ok(None);
        }
        let k = p.modulus() as i64;
        let threshold = if self.regime == Regime::Tree2k2 { 2 * k - 2 } else { 2 * k };
        let table = alpha::alpha_table(g, p);
        let oracle = CutOracle::new(g);
        let avoid = pin.map_or(0u64, |q| 1 << q.vertex);
        let best = (1u64..(1 << n))
            .filter(|&m| {
                let c = m.count_ones() as usize;
                c >= 2
                    && n - c >= 2
                    && m & avoid == 0
                    && (oracle.cut(m) as i64) < threshold + table[m as usize].abs_twice()
            })
            .min_by_key(|&m| (m.count_ones(), m));
        let Some(mask) = best else {
            return Ok(None);
        };
        let a = VertexSet::from_mask(n, mask);
        let c1 = g.contract(&a)?;
        let mut p1 = vec![0i64; c1.graph.vertex_count()];
        for v in 0..n {
            if !a.contains(v) {
                p1[c1.map[v]] = p.get(v) as i64;
            }
        }
        p1[c1.merged] = alpha::p_of_set(g, p, &a);
        let p1 = ResidueMap::new(p.modulus(), p1)?;
        let pin1 = pin.map(|q| Pin { vertex: c1.map[q.vertex], target: q.target });
        check_regime(&c1.graph, &p1, self.regime)?;
        let o1 = self.solve(&c1.graph, &p1, pin1)?;

        let c2 = g.contract(&a.complement())?;
        let mut fixed = Orientation::new();
        for id in g.cut_edges(&a) {
            fixed.set(id, o1.get(id).ok_or_else(|| Error::contract("cut edge left unoriented"))?);
        }
        let z = c2.merged;
        let mut p2 = vec![0i64; c2.graph.vertex_count()];
        for v in a.iter() {
            p2[c2.map[v]] = p.get(v) as i64;
        }
        p2[z] = fixed.out_degree(&c2.graph, z) as i64;
        let p2 = ResidueMap::new(p.modulus(), p2)?;
        let wg = BoundSpec::new(self.regime.bounds()).windows(g, p)?;
        let mut w2 = vec![(0, c2.graph.degree(z) as i64); c2.graph.vertex_count()];
        for v in a.iter() {
            w2[c2.map[v]] = wg[v];
        }
        let o2 = self.search(&c2.graph, &p2, &w2, &fixed)?;
        let mut o = o1;
        o.extend_from(&o2);
        self.stats.contractions += 1;
        Ok(Some(o))
    }

    /// Lift a non-parallel pair at a vertex other than the pin with alpha = 0.
    fn lift_balanced_vertex(
        &mut self,
        g: &MultiGraph,
        p: &ResidueMap,
        pin: Option<Pin>,
    ) -> Result<Option<Orientation>> {
        let pinned = pin.map(|q| q.vertex);
        for v in 0..g.vertex_count() {
            if Some(v) == pinned || !alpha::alpha_of_vertex(g, p, v)?.is_zero() {
                continue;
            }
            if let Some((a, b)) = non_parallel_pair(g, v) {
                return self.lift_and_solve(g, p, v, a, b, pin).map(Some);
            }
        }
        Ok(None)
    }

    /// Lift at z0 when its degree is at least 2k + 2|alpha(z0)|.
    fn lift_at_z0(&mut self, g: &MultiGraph, p: &ResidueMap, pin: Option<Pin>) -> Result<Option<Orientation>> {
        let k = p.modulus() as i64;
        let z0 = match pin {
            Some(q) => q.vertex,
            None => (0..g.vertex_count()).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).unwrap_or(0),
        };
        if (g.degree(z0) as i64) < 2 * k + alpha::alpha_of_vertex(g, p, z0)?.abs_twice() {
            return Ok(None);
        }
        let (a, b) = match non_parallel_pair(g, z0) {
            Some(pair) => pair,
            None => {
                let at = g.incident(z0);
                (at[0].id, at[1].id)
            }
        };
        let pin = pin.map(|q| Pin { vertex: q.vertex, target: q.target.saturating_sub(1) });
        self.lift_and_solve(g, p, z0, a, b, pin).map(Some)
    }

    fn lift_and_solve(
        &mut self,
        g: &MultiGraph,
        p: &ResidueMap,
        pivot: usize,
        a: EdgeId,
        b: EdgeId,
        pin: Option<Pin>,
    ) -> Result<Orientation> {
        let mut led = LiftLedger::new(g);
        led.lift(pivot, a, b)?;
        let step = led.steps()[0];
        let q = alpha::lifted_residues(p, &step);
        let h = led.current().clone();
        check_regime(&h, &q, self.regime)?;
        let o = self.solve(&h, &q, pin)?;
        self.stats.lifts += 1;
        led.induce_orientation(&o)
    }
}

fn non_parallel_pair(g: &MultiGraph, v: usize) -> Option<(EdgeId, EdgeId)> {
    let at = g.incident(v);
    for i in 0..at.len() {
        for j in i + 1..at.len() {
            if at[i].other(v) != at[j].other(v) {
                return Some((at[i].id, at[j].id));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> MultiGraph {
        MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn parallel(m: usize) -> MultiGraph {
        MultiGraph::from_edges(2, &vec![(0, 1); m]).unwrap()
    }

    fn complete(n: usize, mult: usize) -> MultiGraph {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for _ in 0..mult {
                    pairs.push((i, j));
                }
            }
        }
        MultiGraph::from_edges(n, &pairs).unwrap()
    }

    fn all_out_degrees(g: &MultiGraph) -> Vec<Vec<usize>> {
        let m = g.edge_count();
        (0..1u32 << m)
            .map(|mask| {
                let mut o = Orientation::new();
                for (i, e) in g.edges().iter().enumerate() {
                    o.set(e.id, if mask >> i & 1 == 1 { Dir::Forward } else { Dir::Backward });
                }
                o.out_degrees(g)
            })
            .collect()
    }

    #[test]
    fn mod2_c4_odd_is_cyclic() {
        let g = c4();
        let p = ResidueMap::constant(2, 4, 1).unwrap();
        let o = orient_mod2_bounded(&g, &p, 0, None).unwrap();
        assert_eq!(o.out_degrees(&g), vec![1, 1, 1, 1]);
    }

    #[test]
    fn mod2_c4_even_alternates() {
        let g = c4();
        let p = ResidueMap::constant(2, 4, 0).unwrap();
        let expected: BTreeSet<Vec<usize>> =
            all_out_degrees(&g).into_iter().filter(|d| d.iter().all(|x| x % 2 == 0)).collect();
        assert_eq!(expected, [vec![0, 2, 0, 2], vec![2, 0, 2, 0]].into());
        let o = orient_mod2_bounded(&g, &p, 0, None).unwrap();
        assert!(expected.contains(&o.out_degrees(&g)));
    }

    #[test]
    fn mod2_pins_hit_every_plausible_value() {
        let g = complete(4, 2);
        let p = ResidueMap::new(2, vec![0, 1, 1, 0]).unwrap();
        for t in [2, 4] {
            let o = orient_mod2_bounded(&g, &p, 0, Some(t)).unwrap();
            assert_eq!(o.out_degree(&g, 0), t);
        }
    }

    #[test]
    fn mod2_wrong_parity_pin_rejected() {
        let p = ResidueMap::constant(2, 4, 1).unwrap();
        assert!(matches!(orient_mod2_bounded(&c4(), &p, 0, Some(2)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn search_six_parallel() {
        let g = parallel(6);
        let p = ResidueMap::constant(3, 2, 0).unwrap();
        let spec = BoundSpec::new(Bounds::FloorCeil(2));
        let oracle: BTreeSet<Vec<usize>> =
            all_out_degrees(&g).into_iter().filter(|d| d.iter().all(|x| x % 3 == 0 && (1..=5).contains(x))).collect();
        assert_eq!(oracle, [vec![3, 3]].into());
        match orient_mod_k_search(&g, &p, &spec).unwrap() {
            SearchOutcome::Found(o) => assert_eq!(o.out_degrees(&g), vec![3, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn k8_window_counting() {
        let g = complete(8, 1);
        for (lo, hi, r) in [(4, 6, 0), (1, 3, 1)] {
            let p = ResidueMap::constant(2, 8, r).unwrap();
            let spec = BoundSpec::new(Bounds::Interval { lo: vec![lo; 8], hi: vec![hi; 8] });
            let rep = orient_mod_k_search_with(&g, &p, &spec, &Orientation::new(), &SearchConfig::default()).unwrap();
            assert_eq!(rep.outcome, SearchOutcome::Infeasible);
            assert_eq!(rep.nodes, 1);
        }
    }

    #[test]
    fn empty_graph_search() {
        let g = MultiGraph::new(1);
        let p = ResidueMap::constant(3, 1, 0).unwrap();
        assert_eq!(
            orient_mod_k_search(&g, &p, &BoundSpec::new(Bounds::Unbounded)).unwrap(),
            SearchOutcome::Found(Orientation::new())
        );
    }

    #[test]
    fn search_respects_budget_and_cancel() {
        let g = complete(5, 2);
        let p = ResidueMap::new(3, vec![0, 0, 0, 0, 2]).unwrap();
        let spec = BoundSpec::new(Bounds::Unbounded);
        let cfg = SearchConfig { node_budget: 3, cancel: None };
        let rep = orient_mod_k_search_with(&g, &p, &spec, &Orientation::new(), &cfg).unwrap();
        assert!(matches!(rep.outcome, SearchOutcome::Exhausted | SearchOutcome::Found(_)));
        let token = CancelToken::new();
        token.cancel();
        let cfg = SearchConfig { node_budget: u64::MAX, cancel: Some(token) };
        let rep = orient_mod_k_search_with(&g, &p, &spec, &Orientation::new(), &cfg).unwrap();
        assert!(matches!(rep.outcome, SearchOutcome::Cancelled | SearchOutcome::Found(_)));
    }

    #[test]
    fn bounded_six_parallel() {
        let g = parallel(6);
        let p = ResidueMap::constant(3, 2, 0).unwrap();
        let r = orient_mod_k_bounded(&g, &p, Regime::Edge3k3, None).unwrap();
        assert_eq!(r.orientation.out_degrees(&g), vec![3, 3]);
    }

    #[test]
    fn bounded_doubled_k4_is_eulerian() {
        let g = complete(4, 2);
        let p = ResidueMap::constant(3, 4, 0).unwrap();
        let r = orient_mod_k_bounded(&g, &p, Regime::Edge3k3, None).unwrap();
        assert_eq!(r.orientation.out_degrees(&g), vec![3; 4]);
    }

    #[test]
    fn bounded_tree_regime_three_vertices() {
        // four edge-disjoint spanning trees on three vertices
        let g = MultiGraph::from_edges(3, &[(0, 1), (0, 1), (0, 1), (1, 2), (1, 2), (1, 2), (0, 2), (0, 2)]).unwrap();
        let p = ResidueMap::new(3, vec![0, 1, 1]).unwrap();
        let r = orient_mod_k_bounded(&g, &p, Regime::Tree2k2, None).unwrap();
        let outs = r.orientation.out_degrees(&g);
        for v in 0..3 {
            assert!(outs[v] >= 1 && outs[v] < g.degree(v));
            assert!(p.matches(v, outs[v]));
        }
    }

    #[test]
    fn bounded_uses_reductions_on_larger_instances() {
        let g = complete(5, 3);
        let p = ResidueMap::new(3, vec![1, 2, 0, 0, 0]).unwrap();
        let r = orient_mod_k_bounded(&g, &p, Regime::Edge3k3, Some(Pin { vertex: 0, target: 7 })).unwrap();
        assert_eq!(r.orientation.out_degree(&g, 0), 7);
        assert!(r.stats.lifts + r.stats.contractions > 0);
        let r = orient_mod_k_bounded(&g, &p, Regime::Tree2k2, None).unwrap();
        assert!(verify_orientation(&g, &r.orientation, &p, &BoundSpec::new(Bounds::Tree)).ok);
    }

    #[test]
    fn verify_examples() {
        let g = c4();
        let mut cyc = Orientation::new();
        for e in g.edges() {
            cyc.set(e.id, Dir::Forward);
        }
        let one = ResidueMap::constant(2, 4, 1).unwrap();
        let zero = ResidueMap::constant(2, 4, 0).unwrap();
        assert!(verify_orientation(&g, &cyc, &one, &BoundSpec::new(Bounds::FloorCeil(1))).ok);
        assert!(!verify_orientation(&g, &cyc, &zero, &BoundSpec::new(Bounds::FloorCeil(1))).ok);
        let g6 = parallel(6);
        let mut o = Orientation::new();
        for (i, e) in g6.edges().iter().enumerate() {
            o.set(e.id, if i < 3 { Dir::Forward } else { Dir::Backward });
        }
        let p = ResidueMap::constant(3, 2, 0).unwrap();
        assert!(verify_orientation(&g6, &o, &p, &BoundSpec::new(Bounds::Alpha)).ok);
        assert!(check_consequence(&g6, &o, 3, Consequence::HalfSteps).ok);
    }

    #[test]
    fn balanced_orientation_is_balanced() {
        let g = complete(5, 1);
        let o = balanced_orientation(&g).unwrap();
        assert!(o.out_degrees(&g).iter().all(|&d| d == 2));
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let o = balanced_orientation(&g).unwrap();
        for v in 0..4 {
            let d = g.degree(v) as i64;
            assert!((2 * o.out_degree(&g, v) as i64 - d).abs() <= 1);
        }
    }
}
