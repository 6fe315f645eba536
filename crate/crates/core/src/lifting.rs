//! Lifting (splitting off) pairs of edges at a vertex, with a ledger mapping
//! every derived edge back to a trail of the original graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::connectivity::{self, CutMode};
use crate::error::{Error, Result};
use crate::graph::{Dir, Dsu, Edge, EdgeId, MultiGraph, Orientation};
use crate::tree_packing;

/// A trail of the base graph, walked from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trail {
    pub start: usize,
    pub end: usize,
    pub edges: Vec<EdgeId>,
}

impl Trail {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn reversed(&self) -> Trail {
        let mut edges = self.edges.clone();
        edges.reverse();
        Trail { start: self.end, end: self.start, edges }
    }

    /// Trail oriented so that it starts at `v` (one of its ends).
    fn starting_at(&self, v: usize) -> Trail {
        if self.start == v {
            self.clone()
        } else {
            debug_assert_eq!(self.end, v);
            self.reversed()
        }
    }

    fn join(&self, other: &Trail) -> Trail {
        debug_assert_eq!(self.end, other.start);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Trail { start: self.start, end: other.end, edges }
    }

    /// Visit (edge, from, to) along the trail in `base`.
    pub fn walk(&self, base: &MultiGraph) -> Result<Vec<(Edge, usize, usize)>> {
        let mut at = self.start;
        let mut out = Vec::with_capacity(self.edges.len());
        for &id in &self.edges {
            let e = base.expect_edge(id)?;
            if !e.touches(at) {
                return Err(Error::contract(format!("trail breaks at edge {id}")));
            }
            let next = e.other(at);
            out.push((e, at, next));
            at = next;
        }
        if at != self.end {
            return Err(Error::contract("trail does not reach its end"));
        }
        Ok(out)
    }
}

/// One lift: edges `first = pivot-x` and `second = pivot-y` replaced by
/// `created = x-y`, or deleted outright when x == y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftStep {
    pub pivot: usize,
    pub first: Edge,
    pub second: Edge,
    pub x: usize,
    pub y: usize,
    pub created: Option<EdgeId>,
}

impl LiftStep {
    pub fn is_parallel(&self) -> bool {
        self.x == self.y
    }
}

/// Records a sequence of lifts applied to `base`. The current graph keeps
/// every vertex of the base (split-off vertices stay, isolated).
#[derive(Debug, Clone)]
pub struct LiftLedger {
    base: MultiGraph,
    current: MultiGraph,
    steps: Vec<LiftStep>,
    trails: BTreeMap<EdgeId, Trail>,
    closed: Vec<(usize, Trail)>,
}

impl LiftLedger {
    pub fn new(base: &MultiGraph) -> Self {
        let trails = base.edges().iter().map(|e| (e.id, Trail { start: e.u, end: e.v, edges: vec![e.id] })).collect();
        LiftLedger { base: base.clone(), current: base.clone(), steps: Vec::new(), trails, closed: Vec::new() }
    }

    pub fn base(&self) -> &MultiGraph {
        &self.base
    }

    pub fn current(&self) -> &MultiGraph {
        &self.current
    }

    pub fn steps(&self) -> &[LiftStep] {
        &self.steps
    }

    /// Trail of a current edge, walked from its stored `u` to its stored `v`.
    pub fn trail(&self, id: EdgeId) -> Option<&Trail> {
        self.trails.get(&id)
    }

    /// Closed trails produced by parallel lifts, in creation order.
    pub fn closed_trails(&self) -> impl Iterator<Item = &Trail> {
        self.closed.iter().map(|(_, t)| t)
    }

    /// Lift `first` and `second` at `pivot`. Returns the created edge, if any.
    pub fn lift(&mut self, pivot: usize, first: EdgeId, second: EdgeId) -> Result<Option<EdgeId>> {
        let id = self.current.next_edge_id();
        self.lift_with_id(pivot, first, second, id)
    }

    fn lift_with_id(&mut self, pivot: usize, first: EdgeId, second: EdgeId, id: EdgeId) -> Result<Option<EdgeId>> {
        if first == second {
            return Err(Error::domain("cannot lift an edge with itself"));
        }
        let e1 = self.current.expect_edge(first)?;
        let e2 = self.current.expect_edge(second)?;
        if !e1.touches(pivot) || !e2.touches(pivot) {
            return Err(Error::domain(format!("edges {first} and {second} do not share vertex {pivot}")));
        }
        let (x, y) = (e1.other(pivot), e2.other(pivot));
        let t1 = self.trails[&first].starting_at(x);
        let t2 = self.trails[&second].starting_at(pivot);
        let joined = t1.join(&t2);
        self.current.remove_edge(first)?;
        self.current.remove_edge(second)?;
        self.trails.remove(&first);
        self.trails.remove(&second);
        let created = if x == y {
            self.closed.push((self.steps.len(), joined));
            None
        } else {
            self.current.insert_edge(id, x, y)?;
            self.trails.insert(id, joined);
            Some(id)
        };
        self.steps.push(LiftStep { pivot, first: e1, second: e2, x, y, created });
        Ok(created)
    }

    /// Orientation of the base graph induced by an orientation of the current
    /// graph: each derived edge passes its direction along its trail, and each
    /// closed trail is directed cyclically.
    pub fn induce_orientation(&self, orient: &Orientation) -> Result<Orientation> {
        let mut out = Orientation::new();
        for e in self.current.edges() {
            let d = orient.get(e.id).ok_or_else(|| Error::domain(format!("edge {} is not oriented", e.id)))?;
            let t = &self.trails[&e.id];
            let t = if d == Dir::Forward { t.clone() } else { t.reversed() };
            for (be, from, _) in t.walk(&self.base)? {
                out.set_from(&be, from);
            }
        }
        for (_, t) in &self.closed {
            for (be, from, _) in t.walk(&self.base)? {
                out.set_from(&be, from);
            }
        }
        Ok(out)
    }

    /// Ledger restricted to the given current edges, optionally together with
    /// all closed trails. The base becomes the spanning subgraph formed by
    /// their trails, and only the steps that built them are replayed.
    pub fn restrict(&self, keep: &[EdgeId], with_closed: bool) -> Result<LiftLedger> {
        let producer: BTreeMap<EdgeId, usize> =
            self.steps.iter().enumerate().filter_map(|(i, s)| s.created.map(|c| (c, i))).collect();
        let mut wanted: BTreeSet<usize> = BTreeSet::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut base_edges: Vec<EdgeId> = Vec::new();
        for &id in keep {
            let t = self.trails.get(&id).ok_or_else(|| Error::domain(format!("unknown current edge {id}")))?;
            base_edges.extend_from_slice(&t.edges);
            if let Some(&s) = producer.get(&id) {
                stack.push(s);
            }
        }
        if with_closed {
            for (s, t) in &self.closed {
                base_edges.extend_from_slice(&t.edges);
                stack.push(*s);
            }
        }
        while let Some(s) = stack.pop() {
            if !wanted.insert(s) {
                continue;
            }
            for e in [self.steps[s].first.id, self.steps[s].second.id] {
                if let Some(&p) = producer.get(&e) {
                    stack.push(p);
                }
            }
        }
        let base = self.base.spanning_subgraph(base_edges)?;
        let mut led = LiftLedger::new(&base);
        led.current.reserve_ids_from(self.current.next_edge_id());
        for &s in &wanted {
            let st = self.steps[s];
            let id = st.created.unwrap_or(led.current.next_edge_id());
            led.lift_with_id(st.pivot, st.first.id, st.second.id, id)?;
        }
        Ok(led)
    }

    /// Graph before `step`, given the graph after it.
    pub fn undo_graph_step(after: &MultiGraph, step: &LiftStep) -> Result<MultiGraph> {
        let mut g = after.clone();
        if let Some(c) = step.created {
            g.remove_edge(c)?;
        }
        g.insert_edge(step.first.id, step.first.u, step.first.v)?;
        g.insert_edge(step.second.id, step.second.u, step.second.v)?;
        Ok(g)
    }

    /// Orientation before `step`, given the orientation after it.
    pub fn undo_orientation_step(after_orient: &Orientation, step: &LiftStep) -> Result<Orientation> {
        let mut o = after_orient.clone();
        let (e1, e2) = (step.first, step.second);
        match step.created {
            Some(c) => {
                let d = o.get(c).ok_or_else(|| Error::domain(format!("edge {c} is not oriented")))?;
                o.unset(c);
                // created edge is stored as (x, y)
                if d == Dir::Forward {
                    o.set_from(&e1, step.x);
                    o.set_from(&e2, step.pivot);
                } else {
                    o.set_from(&e2, step.y);
                    o.set_from(&e1, step.pivot);
                }
            }
            None => {
                o.set_from(&e1, step.x);
                o.set_from(&e2, step.pivot);
            }
        }
        Ok(o)
    }
}

/// Lift two edges of `g` at `pivot` without a ledger.
pub fn lift_pair(g: &MultiGraph, pivot: usize, first: EdgeId, second: EdgeId) -> Result<(MultiGraph, Option<EdgeId>)> {
    let mut led = LiftLedger::new(g);
    let c = led.lift(pivot, first, second)?;
    Ok((led.current, c))
}

/// Property a lift must preserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftMode {
    /// Global lambda-edge-connectivity (needs d(u) >= lambda + 2).
    PreserveLambda(usize),
    /// The (2m'+1, 2m) cut condition on sets avoiding the pivot.
    PreserveParity { m: usize, m_prime: usize },
    /// The (2n, 2n') set-size condition on sets avoiding the pivot.
    PreserveSizeParity { n: usize, n_prime: usize },
}

impl LiftMode {
    fn cut_mode(&self) -> Option<CutMode> {
        match *self {
            LiftMode::PreserveLambda(_) => None,
            LiftMode::PreserveParity { m, m_prime } => Some(CutMode::CutParity { m, m_prime }),
            LiftMode::PreserveSizeParity { n, n_prime } => Some(CutMode::SetParity { n, n_prime }),
        }
    }
}

fn check_lift_preconditions(g: &MultiGraph, u: usize, mode: LiftMode) -> Result<()> {
    if u >= g.vertex_count() {
        return Err(Error::domain(format!("vertex {u} out of range")));
    }
    let d = g.degree(u);
    match mode {
        LiftMode::PreserveLambda(lambda) => {
            if lambda < 2 {
                return Err(Error::pre("lambda must be at least 2"));
            }
            if d < lambda + 2 {
                return Err(Error::pre(format!("d({u}) = {d} < lambda + 2 = {}", lambda + 2)));
            }
            let have = connectivity::edge_connectivity_value(g);
            if have < lambda {
                return Err(Error::pre(format!("graph is only {have}-edge-connected")));
            }
        }
        LiftMode::PreserveParity { m, m_prime } => {
            if m_prime < m {
                return Err(Error::pre("need m' >= m"));
            }
            if d % 2 == 1 && d < 2 * m_prime + 2 {
                return Err(Error::pre(format!("d({u}) = {d} is odd and below 2m'+2")));
            }
            check_cut_condition(g, u, mode)?;
        }
        LiftMode::PreserveSizeParity { n, n_prime } => {
            if n_prime < n {
                return Err(Error::pre("need n' >= n"));
            }
            if let Some(v) = g.degrees().iter().position(|d| d % 2 == 1) {
                return Err(Error::pre(format!("vertex {v} has odd degree")));
            }
            if d < 2 * n_prime + 2 {
                return Err(Error::pre(format!("d({u}) = {d} < 2n'+2")));
            }
            check_cut_condition(g, u, mode)?;
        }
    }
    Ok(())
}

fn check_cut_condition(g: &MultiGraph, u: usize, mode: LiftMode) -> Result<()> {
    let cm = mode.cut_mode().expect("cut mode");
    match connectivity::is_parity_edge_connected(g, cm, Some(u))? {
        connectivity::CutCheck::Holds => Ok(()),
        connectivity::CutCheck::Violated(c) => {
            Err(Error::pre(format!("cut condition fails at {} (d = {})", c.side, c.value)))
        }
    }
}

fn lift_preserves(h: &MultiGraph, u: usize, mode: LiftMode) -> Result<bool> {
    Ok(match mode {
        LiftMode::PreserveLambda(l) => connectivity::edge_connectivity_value(h) >= l,
        _ => connectivity::is_parity_edge_connected(h, mode.cut_mode().unwrap(), Some(u))?.holds(),
    })
}

/// Candidate pairs at `u`: the fixed edge (or each edge in id order) with
/// partners in id order, non-parallel partners first.
fn candidate_pairs(g: &MultiGraph, u: usize, fixed: Option<EdgeId>) -> Vec<(EdgeId, EdgeId)> {
    let inc = g.incident(u);
    let firsts: Vec<Edge> = match fixed {
        Some(f) => inc.iter().filter(|e| e.id == f).copied().collect(),
        None => inc.clone(),
    };
    let mut out = Vec::new();
    for parallel_pass in [false, true] {
        for a in &firsts {
            for b in &inc {
                if b.id == a.id || (fixed.is_none() && b.id < a.id) {
                    continue;
                }
                let par = a.other(u) == b.other(u);
                if par == parallel_pass {
                    out.push((a.id, b.id));
                }
            }
        }
    }
    out
}

/// First admissible pair of edges at `u` for `mode`, verified by recheck.
/// With `fixed`, the pair must contain that edge.
pub fn find_admissible_lift(
    g: &MultiGraph,
    u: usize,
    mode: LiftMode,
    fixed: Option<EdgeId>,
) -> Result<Option<(EdgeId, EdgeId)>> {
    check_lift_preconditions(g, u, mode)?;
    if let Some(f) = fixed {
        if !g.expect_edge(f)?.touches(u) {
            return Err(Error::domain(format!("edge {f} is not incident with {u}")));
        }
    }
    for (a, b) in candidate_pairs(g, u, fixed) {
        let (h, _) = lift_pair(g, u, a, b)?;
        if lift_preserves(&h, u, mode)? {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

/// Result of splitting a vertex off completely.
#[derive(Debug, Clone)]
pub struct SplitOff {
    /// The lifted graph with the split vertex deleted (higher indices shift down).
    pub graph: MultiGraph,
    /// Ledger over the full vertex set; the split vertex is isolated in it.
    pub ledger: LiftLedger,
}

/// Lift all edges at `u` in disjoint pairs so that the requested property
/// survives on V - u, then delete `u`.
pub fn split_off_vertex(g: &MultiGraph, u: usize, mode: LiftMode) -> Result<SplitOff> {
    if u >= g.vertex_count() {
        return Err(Error::domain(format!("vertex {u} out of range")));
    }
    if g.degree(u) % 2 == 1 {
        return Err(Error::pre(format!("d({u}) is odd")));
    }
    let local_ok = |h: &MultiGraph| -> Result<bool> {
        Ok(match mode {
            LiftMode::PreserveLambda(l) => connectivity::min_cut_avoiding(h, u) >= l,
            _ => connectivity::is_parity_edge_connected(h, mode.cut_mode().unwrap(), Some(u))?.holds(),
        })
    };
    match mode {
        LiftMode::PreserveLambda(l) => {
            if l < 2 {
                return Err(Error::pre("lambda must be at least 2"));
            }
            if connectivity::edge_connectivity_value(g) < l {
                return Err(Error::pre(format!("graph is not {l}-edge-connected")));
            }
        }
        LiftMode::PreserveParity { m, m_prime } => {
            if m_prime < m {
                return Err(Error::pre("need m' >= m"));
            }
            check_cut_condition(g, u, mode)?;
        }
        LiftMode::PreserveSizeParity { n, n_prime } => {
            if n_prime < n {
                return Err(Error::pre("need n' >= n"));
            }
            if g.degrees().iter().any(|d| d % 2 == 1) {
                return Err(Error::pre("degrees must be even"));
            }
            check_cut_condition(g, u, mode)?;
        }
    }
    let mut led = LiftLedger::new(g);
    while led.current.degree(u) > 0 {
        let first = led.current.incident(u)[0].id;
        let mut done = false;
        for (a, b) in candidate_pairs(&led.current, u, Some(first)) {
            let (h, _) = lift_pair(&led.current, u, a, b)?;
            if local_ok(&h)? {
                led.lift(u, a, b)?;
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::contract(format!("no admissible pair at {u} with {first}")));
        }
    }
    Ok(SplitOff { graph: led.current.remove_vertex(u), ledger: led })
}

/// Result of the tree-connectivity preserving split at a low-degree vertex.
#[derive(Debug, Clone)]
pub struct TreeSplit {
    /// Lifted graph with `u` deleted (higher indices shift down).
    pub graph: MultiGraph,
    /// Ledger over the full vertex set; after it `u` keeps only `unlifted`.
    pub ledger: LiftLedger,
    /// Edges at `u` left unlifted, ascending.
    pub unlifted: Vec<EdgeId>,
    pub lifts: usize,
}

/// For an m-tree-connected graph and a vertex with d(u) <= 2m, lift at most
/// d(u) - m disjoint non-parallel pairs at u so that deleting u leaves an
/// m-tree-connected graph.
pub fn split_off_tree_connected(g: &MultiGraph, u: usize, m: usize) -> Result<TreeSplit> {
    let n = g.vertex_count();
    if u >= n {
        return Err(Error::domain(format!("vertex {u} out of range")));
    }
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    let d = g.degree(u);
    if d > 2 * m {
        return Err(Error::pre(format!("d({u}) = {d} exceeds 2m = {}", 2 * m)));
    }
    let trees = match tree_packing::spanning_tree_packing(g, m)? {
        tree_packing::Packing::Trees(t) => t,
        tree_packing::Packing::Deficient(_) => return Err(Error::pre(format!("graph is not {m}-tree-connected"))),
    };
    let pairs = match tree_split_pairs(g, u, &trees) {
        Some(p) => p,
        None => exhaustive_tree_split(g, u, m)?,
    };
    let mut led = LiftLedger::new(g);
    for &(a, b) in &pairs {
        led.lift(u, a, b)?;
    }
    let graph = led.current.remove_vertex(u);
    if !tree_packing::is_m_tree_connected(&graph, m)? {
        let pairs = exhaustive_tree_split(g, u, m)?;
        let mut led = LiftLedger::new(g);
        for &(a, b) in &pairs {
            led.lift(u, a, b)?;
        }
        return finish_tree_split(led, u, pairs.len());
    }
    if pairs.len() + m > d {
        return Err(Error::contract("tree split used too many lifts"));
    }
    finish_tree_split(led, u, pairs.len())
}

fn finish_tree_split(led: LiftLedger, u: usize, lifts: usize) -> Result<TreeSplit> {
    let unlifted = led.current.incident(u).iter().map(|e| e.id).collect();
    let graph = led.current.remove_vertex(u);
    Ok(TreeSplit { graph, ledger: led, unlifted, lifts })
}

/// Pairs prescribed by the tree argument: trees meeting u at least twice
/// borrow the single u-edge of trees meeting u once, and each augmented tree
/// is reconnected around u by successive lifts.
fn tree_split_pairs(g: &MultiGraph, u: usize, trees: &[Vec<EdgeId>]) -> Option<Vec<(EdgeId, EdgeId)>> {
    let n = g.vertex_count();
    let at_u =
        |t: &Vec<EdgeId>| -> Vec<Edge> { t.iter().map(|&id| *g.edge(id).unwrap()).filter(|e| e.touches(u)).collect() };
    let mut spare: Vec<Edge> = Vec::new();
    let mut heavy: Vec<(usize, Vec<Edge>)> = Vec::new();
    for (i, t) in trees.iter().enumerate() {
        let es = at_u(t);
        if es.len() == 1 {
            spare.push(es[0]);
        } else {
            heavy.push((i, es));
        }
    }
    spare.sort_by_key(|e| e.id);
    let mut spare = spare.into_iter();
    let mut pairs = Vec::new();
    for (i, mut ue) in heavy {
        let need = ue.len() - 2;
        for _ in 0..need {
            ue.push(spare.next()?);
        }
        ue.sort_by_key(|e| e.id);
        let mut dsu = Dsu::new(n);
        for &id in &trees[i] {
            let e = g.edge(id).unwrap();
            if !e.touches(u) {
                dsu.union(e.u, e.v);
            }
        }
        let comp_count = |dsu: &mut Dsu| {
            let mut r: Vec<usize> = (0..n).filter(|&v| v != u).map(|v| dsu.find(v)).collect();
            r.sort_unstable();
            r.dedup();
            r.len()
        };
        let mut omega = comp_count(&mut dsu);
        while omega >= 2 {
            let (a, b) = if omega >= 3 {
                // component holding two u-edges, and an edge into another component
                let mut pick = None;
                'outer: for (i1, e1) in ue.iter().enumerate() {
                    let c = dsu.find(e1.other(u));
                    if !ue.iter().skip(i1 + 1).any(|e| dsu.find(e.other(u)) == c) {
                        continue;
                    }
                    for e3 in &ue {
                        if dsu.find(e3.other(u)) != c {
                            pick = Some((*e1, *e3));
                            break 'outer;
                        }
                    }
                }
                pick?
            } else {
                let e1 = ue[0];
                let c = dsu.find(e1.other(u));
                let e3 = *ue.iter().find(|e| dsu.find(e.other(u)) != c)?;
                (e1, e3)
            };
            dsu.union(a.other(u), b.other(u));
            ue.retain(|e| e.id != a.id && e.id != b.id);
            pairs.push((a.id.min(b.id), a.id.max(b.id)));
            omega -= 1;
        }
    }
    Some(pairs)
}

/// Fallback: smallest set of disjoint non-parallel pairs (at most d(u) - m)
/// whose lifting leaves G - u m-tree-connected. Exponential; desk scale only.
fn exhaustive_tree_split(g: &MultiGraph, u: usize, m: usize) -> Result<Vec<(EdgeId, EdgeId)>> {
    let inc = g.incident(u);
    let limit = g.degree(u).saturating_sub(m);
    for count in 0..=limit {
        let mut chosen = Vec::new();
        if let Some(p) = pairings(g, u, &inc, 0, &mut vec![false; inc.len()], count, &mut chosen, m)? {
            return Ok(p);
        }
    }
    Err(Error::contract(format!("no tree-connectivity preserving split at {u}")))
}

#[allow(clippy::too_many_arguments)]
fn pairings(
    g: &MultiGraph,
    u: usize,
    inc: &[Edge],
    from: usize,
    used: &mut Vec<bool>,
    left: usize,
    chosen: &mut Vec<(EdgeId, EdgeId)>,
    m: usize,
) -> Result<Option<Vec<(EdgeId, EdgeId)>>> {
    if left == 0 {
        let mut led = LiftLedger::new(g);
        for &(a, b) in chosen.iter() {
            led.lift(u, a, b)?;
        }
        let h = led.current.remove_vertex(u);
        return Ok(if tree_packing::is_m_tree_connected(&h, m)? { Some(chosen.clone()) } else { None });
    }
    for i in from..inc.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        for j in i + 1..inc.len() {
            if used[j] || inc[i].other(u) == inc[j].other(u) {
                continue;
            }
            used[j] = true;
            chosen.push((inc[i].id, inc[j].id));
            if let Some(p) = pairings(g, u, inc, i + 1, used, left - 1, chosen, m)? {
                return Ok(Some(p));
            }
            chosen.pop();
            used[j] = false;
        }
        used[i] = false;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doubled_c4() -> MultiGraph {
        MultiGraph::from_edges(4, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 3), (2, 3), (3, 0), (3, 0)]).unwrap()
    }

    #[test]
    fn k5_lift_keeps_lambda_2() {
        let mut g = MultiGraph::new(5);
        for i in 0..5 {
            for j in i + 1..5 {
                g.add_edge(i, j).unwrap();
            }
        }
        let (a, b) = find_admissible_lift(&g, 0, LiftMode::PreserveLambda(2), None).unwrap().unwrap();
        let (h, c) = lift_pair(&g, 0, a, b).unwrap();
        assert!(c.is_some());
        assert_eq!(h.degree(0), 2);
        assert!(connectivity::edge_connectivity_value(&h) >= 2);
    }

    #[test]
    fn parallel_lift_deletes_both() {
        let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let s = split_off_vertex(&g, 0, LiftMode::PreserveLambda(2)).unwrap();
        assert_eq!(s.graph.vertex_count(), 1);
        assert_eq!(s.graph.edge_count(), 0);
        assert_eq!(s.ledger.closed_trails().count(), 1);
    }

    #[test]
    fn doubled_c4_split_keeps_lambda_4() {
        let s = split_off_vertex(&doubled_c4(), 3, LiftMode::PreserveLambda(4)).unwrap();
        assert_eq!(s.graph.vertex_count(), 3);
        assert_eq!(connectivity::edge_connectivity_value(&s.graph), 4);
    }

    #[test]
    fn small_degree_is_a_precondition_error() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(matches!(find_admissible_lift(&g, 0, LiftMode::PreserveLambda(2), None), Err(Error::Precondition(_))));
    }

    #[test]
    fn induced_out_degree_identity() {
        let g = doubled_c4();
        let mut led = LiftLedger::new(&g);
        led.lift(1, EdgeId(0), EdgeId(2)).unwrap();
        led.lift(3, EdgeId(4), EdgeId(6)).unwrap();
        led.lift(3, EdgeId(5), EdgeId(7)).unwrap();
        let cur = led.current().clone();
        let o = Orientation::all_forward(&cur);
        let base_o = led.induce_orientation(&o).unwrap();
        assert!(base_o.is_total(&g));
        let (dg, dl) = (g.degrees(), cur.degrees());
        let (og, ol) = (base_o.out_degrees(&g), o.out_degrees(&cur));
        for v in 0..4 {
            assert_eq!(og[v], ol[v] + (dg[v] - dl[v]) / 2);
        }
    }

    #[test]
    fn restrict_replays_only_needed_steps() {
        let g = doubled_c4();
        let mut led = LiftLedger::new(&g);
        let c1 = led.lift(1, EdgeId(0), EdgeId(2)).unwrap().unwrap();
        led.lift(3, EdgeId(4), EdgeId(6)).unwrap();
        let r = led.restrict(&[c1], false).unwrap();
        assert_eq!(r.base().edge_count(), 2);
        assert_eq!(r.current().edge_ids(), vec![c1]);
        assert_eq!(r.steps().len(), 1);
    }

    #[test]
    fn step_undo_matches_trail_induction() {
        let g = doubled_c4();
        let mut led = LiftLedger::new(&g);
        led.lift(1, EdgeId(0), EdgeId(2)).unwrap();
        led.lift(2, EdgeId(8), EdgeId(4)).unwrap();
        let o = Orientation::all_forward(led.current());
        let via_trails = led.induce_orientation(&o).unwrap();
        let mut gr = led.current().clone();
        let mut or = o.clone();
        for st in led.steps().iter().rev() {
            let before = LiftLedger::undo_graph_step(&gr, st).unwrap();
            or = LiftLedger::undo_orientation_step(&or, st).unwrap();
            gr = before;
        }
        assert_eq!(gr.edges(), g.edges());
        assert_eq!(or, via_trails);
    }

    #[test]
    fn tree_split_bound() {
        // 4 edge-disjoint spanning trees need 2m = 4-edge-connectivity at most;
        // doubled K4 is 6-edge-connected, hence 3-tree-connected.
        let mut g = MultiGraph::new(4);
        for _ in 0..2 {
            for i in 0..4 {
                for j in i + 1..4 {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        let s = split_off_tree_connected(&g, 0, 3).unwrap();
        assert!(s.lifts <= 6 - 3);
        assert!(tree_packing::is_m_tree_connected(&s.graph, 3).unwrap());
        assert_eq!(s.unlifted.len(), 6 - 2 * s.lifts);
    }
}
