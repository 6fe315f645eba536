//! Edge-disjoint spanning trees (matroid union), Nash-Williams deficiency
//! certificates, Catlin-style packings avoiding prescribed edges, and
//! edge-disjoint branchings with degree caps.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::connectivity;
use crate::error::{Error, Result};
use crate::graph::{Dsu, EdgeId, MultiGraph, Orientation, VertexSet};
use crate::lifting::{self, LiftLedger, LiftMode, LiftStep};

/// Outcome of a packing attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Packing {
    /// `m` edge-disjoint spanning trees, each sorted by edge id.
    Trees(Vec<Vec<EdgeId>>),
    /// A partition X_1..X_t with sum d(X_i) < 2m(t-1).
    Deficient(Vec<Vec<usize>>),
}

/// Sum of d(X_i) over a partition, i.e. twice the number of crossing edges.
pub fn partition_boundary(g: &MultiGraph, parts: &[Vec<usize>]) -> usize {
    let mut part = vec![usize::MAX; g.vertex_count()];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            part[v] = i;
        }
    }
    2 * g.edges().iter().filter(|e| part[e.u] != part[e.v]).count()
}

struct Forests<'a> {
    g: &'a MultiGraph,
    m: usize,
    owner: Vec<Option<usize>>,
}

impl Forests<'_> {
    /// Edge indices on the path between the ends of edge `f` inside forest
    /// `i`, or None when they are in different trees.
    fn path(&self, i: usize, f: usize) -> Option<Vec<usize>> {
        let n = self.g.vertex_count();
        let edges = self.g.edges();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if self.owner[k] == Some(i) {
                adj[e.u].push((e.v, k));
                adj[e.v].push((e.u, k));
            }
        }
        let (s, t) = (edges[f].u, edges[f].v);
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            if x == t {
                break;
            }
            for &(y, k) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    pred[y] = Some((x, k));
                    q.push_back(y);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut out = Vec::new();
        let mut y = t;
        while let Some((x, k)) = pred[y] {
            out.push(k);
            y = x;
        }
        Some(out)
    }

    /// Augmenting-path insertion of edge `e` (matroid partition).
    fn insert(&mut self, e: usize) -> bool {
        let ne = self.g.edge_count();
        let mut label: Vec<Option<Option<(usize, usize)>>> = vec![None; ne];
        label[e] = Some(None);
        let mut q = VecDeque::from([e]);
        while let Some(f) = q.pop_front() {
            for i in 0..self.m {
                if self.owner[f] == Some(i) {
                    continue;
                }
                match self.path(i, f) {
                    None => {
                        let (mut cur, mut target) = (f, i);
                        loop {
                            let lab = label[cur].unwrap();
                            self.owner[cur] = Some(target);
                            match lab {
                                None => break,
                                Some((pred, j)) => {
                                    cur = pred;
                                    target = j;
                                }
                            }
                        }
                        return true;
                    }
                    Some(path) => {
                        for k in path {
                            if label[k].is_none() {
                                label[k] = Some(Some((f, i)));
                                q.push_back(k);
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn acyclic(&self) -> bool {
        (0..self.m).all(|i| {
            let mut dsu = Dsu::new(self.g.vertex_count());
            self.g.edges().iter().enumerate().all(|(k, e)| self.owner[k] != Some(i) || dsu.union(e.u, e.v))
        })
    }
}

/// m edge-disjoint spanning trees, or a partition violating the
/// Nash-Williams condition.
pub fn spanning_tree_packing(g: &MultiGraph, m: usize) -> Result<Packing> {
    let n = g.vertex_count();
    if m == 0 || n <= 1 {
        return Ok(Packing::Trees(vec![Vec::new(); m]));
    }
    let mut fs = Forests { g, m, owner: vec![None; g.edge_count()] };
    let target = m * (n - 1);
    let mut placed = 0;
    for e in 0..g.edge_count() {
        if placed == target {
            break;
        }
        if fs.insert(e) {
            placed += 1;
        }
    }
    if !fs.acyclic() {
        return Err(Error::contract("matroid union produced a cycle"));
    }
    if placed == target {
        let trees = (0..m)
            .map(|i| g.edges().iter().enumerate().filter(|(k, _)| fs.owner[*k] == Some(i)).map(|(_, e)| e.id).collect())
            .collect();
        return Ok(Packing::Trees(trees));
    }
    // Closure of the unplaced edges under fundamental-cycle exchange; its
    // components form the deficient partition.
    let mut in_s = vec![false; g.edge_count()];
    let mut q: VecDeque<usize> = VecDeque::new();
    for k in 0..g.edge_count() {
        if fs.owner[k].is_none() {
            in_s[k] = true;
            q.push_back(k);
        }
    }
    while let Some(f) = q.pop_front() {
        for i in 0..m {
            if fs.owner[f] == Some(i) {
                continue;
            }
            let path = fs.path(i, f).ok_or_else(|| Error::contract("packing is not maximum"))?;
            for k in path {
                if !in_s[k] {
                    in_s[k] = true;
                    q.push_back(k);
                }
            }
        }
    }
    let mut dsu = Dsu::new(n);
    for (k, e) in g.edges().iter().enumerate() {
        if in_s[k] {
            dsu.union(e.u, e.v);
        }
    }
    let mut parts: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        parts.entry(dsu.find(v)).or_default().push(v);
    }
    let parts: Vec<Vec<usize>> = parts.into_values().collect();
    let t = parts.len();
    if partition_boundary(g, &parts) >= 2 * m * (t - 1) {
        return Err(Error::contract("deficiency certificate does not verify"));
    }
    Ok(Packing::Deficient(parts))
}

pub fn is_m_tree_connected(g: &MultiGraph, m: usize) -> Result<bool> {
    Ok(matches!(spanning_tree_packing(g, m)?, Packing::Trees(_)))
}

/// Vertex set X with |X| >= 2 whose induced subgraph is m-tree-connected,
/// given |E(G)| >= m(|V(G)| - 1). Follows the deficiency partition downward.
pub fn tree_connected_subgraph(g: &MultiGraph, m: usize) -> Result<VertexSet> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    if m == 0 {
        return Ok(VertexSet::full(n));
    }
    if g.edge_count() < m * (n - 1) {
        return Err(Error::pre(format!("|E| = {} < m(n-1) = {}", g.edge_count(), m * (n - 1))));
    }
    let mut current = VertexSet::full(n);
    loop {
        let (h, old) = g.induced(&current);
        match spanning_tree_packing(&h, m)? {
            Packing::Trees(_) => return Ok(current),
            Packing::Deficient(parts) => {
                let pick = parts
                    .iter()
                    .find(|p| {
                        let s = VertexSet::from_iter(h.vertex_count(), p.iter().copied());
                        p.len() >= 2 && h.inner_edges(&s) > m * (p.len() - 1)
                    })
                    .or_else(|| {
                        parts.iter().find(|p| {
                            let s = VertexSet::from_iter(h.vertex_count(), p.iter().copied());
                            p.len() >= 2 && h.inner_edges(&s) >= m * (p.len() - 1)
                        })
                    })
                    .ok_or_else(|| Error::contract("no dense part in deficient partition"))?;
                current = VertexSet::from_iter(n, pick.iter().map(|&v| old[v]));
            }
        }
    }
}

/// m edge-disjoint spanning trees avoiding every edge of `avoid` and, when
/// `z0` has odd degree, one further edge at `z0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatlinPacking {
    pub trees: Vec<Vec<EdgeId>>,
    pub excluded: Option<EdgeId>,
}

pub fn catlin_factor(
    g: &MultiGraph,
    m: usize,
    avoid: &[EdgeId],
    z0: Option<usize>,
    excluded: Option<EdgeId>,
) -> Result<CatlinPacking> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    if avoid.len() > m {
        return Err(Error::domain(format!("avoid set has {} > m edges", avoid.len())));
    }
    for &id in avoid {
        g.expect_edge(id)?;
    }
    if connectivity::edge_connectivity_value(g) < 2 * m {
        return Err(Error::pre(format!("graph is not {}-edge-connected", 2 * m)));
    }
    let candidates: Vec<Option<EdgeId>> = match (z0, excluded) {
        (_, Some(e)) => {
            let ed = g.expect_edge(e)?;
            if avoid.contains(&e) {
                return Err(Error::domain("excluded edge lies in the avoid set"));
            }
            if let Some(z) = z0 {
                if !ed.touches(z) {
                    return Err(Error::domain(format!("edge {e} is not incident with {z}")));
                }
            }
            vec![Some(e)]
        }
        (Some(z), None) if g.degree(z) % 2 == 1 => {
            g.incident(z).iter().filter(|e| !avoid.contains(&e.id)).map(|e| Some(e.id)).collect()
        }
        _ => vec![None],
    };
    for cand in candidates {
        let mut drop: Vec<EdgeId> = avoid.to_vec();
        drop.extend(cand);
        let h = g.without_edges(&drop);
        if let Packing::Trees(trees) = spanning_tree_packing(&h, m)? {
            return Ok(CatlinPacking { trees, excluded: cand });
        }
    }
    Err(Error::contract("no packing avoiding the prescribed edges"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchingKind {
    Out,
    In,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branching {
    pub root: usize,
    pub edges: BTreeSet<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branchings {
    pub kind: BranchingKind,
    pub orientation: Orientation,
    pub branchings: Vec<Branching>,
}

/// Check that `b` is a spanning branching of `g` of the given kind under `o`.
pub fn verify_branching(g: &MultiGraph, o: &Orientation, b: &Branching, kind: BranchingKind) -> bool {
    let n = g.vertex_count();
    if b.edges.len() + 1 != n || b.root >= n {
        return false;
    }
    let mut into = vec![0usize; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &id in &b.edges {
        let Some(e) = g.edge(id) else { return false };
        let Some((t, h)) = o.arc(e) else { return false };
        let (t, h) = match kind {
            BranchingKind::Out => (t, h),
            BranchingKind::In => (h, t),
        };
        into[h] += 1;
        children[t].push(h);
    }
    if into[b.root] != 0 || (0..n).any(|v| v != b.root && into[v] != 1) {
        return false;
    }
    let mut seen = vec![false; n];
    seen[b.root] = true;
    let mut stack = vec![b.root];
    while let Some(x) = stack.pop() {
        for &y in &children[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// m edge-disjoint branchings of the given kind with root multiplicities
/// `r` (summing to m) on a 2m-edge-connected graph. Out case: every
/// d+(v) <= ceil(d(v)/2) and d+(z0) <= floor(d(z0)/2); the in case caps d-.
pub fn disjoint_branchings(
    g: &MultiGraph,
    m: usize,
    r: &[usize],
    kind: BranchingKind,
    z0: Option<usize>,
) -> Result<Branchings> {
    let n = g.vertex_count();
    if r.len() != n {
        return Err(Error::domain("root vector has wrong length"));
    }
    if r.iter().sum::<usize>() != m {
        return Err(Error::domain("roots must sum to m"));
    }
    let z0 = z0.unwrap_or(0);
    if n > 0 && z0 >= n {
        return Err(Error::domain(format!("z0 = {z0} out of range")));
    }
    if m > 0 && n >= 2 && connectivity::edge_connectivity_value(g) < 2 * m {
        return Err(Error::pre(format!("graph is not {}-edge-connected", 2 * m)));
    }
    let out = out_branchings(g, m, r, z0)?;
    let result = match kind {
        BranchingKind::Out => out,
        BranchingKind::In => Branchings { kind, orientation: out.orientation.reversed(), branchings: out.branchings },
    };
    let caps_ok = {
        let deg = g.degrees();
        let d = match kind {
            BranchingKind::Out => result.orientation.out_degrees(g),
            BranchingKind::In => result.orientation.in_degrees(g),
        };
        (0..n).all(|v| if v == z0 { d[v] <= deg[v] / 2 } else { d[v] <= deg[v].div_ceil(2) })
    };
    if !result.orientation.is_total(g)
        || !caps_ok
        || !result.branchings.iter().all(|b| verify_branching(g, &result.orientation, b, kind))
        || !pairwise_disjoint(&result.branchings)
    {
        return Err(Error::contract("branching construction failed its check"));
    }
    Ok(result)
}

fn pairwise_disjoint(bs: &[Branching]) -> bool {
    let mut seen = BTreeSet::new();
    bs.iter().all(|b| b.edges.iter().all(|&e| seen.insert(e)))
}

fn out_branchings(g: &MultiGraph, m: usize, r: &[usize], z0: usize) -> Result<Branchings> {
    let n = g.vertex_count();
    let roots: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, r[v])).collect();
    if m == 0 || n <= 1 {
        let branchings = roots.iter().map(|&root| Branching { root, edges: BTreeSet::new() }).collect();
        return Ok(Branchings { kind: BranchingKind::Out, orientation: Orientation::all_forward(g), branchings });
    }
    let mut led = LiftLedger::new(g);
    loop {
        let cur = led.current();
        let Some(u) = (0..n).find(|&v| cur.degree(v) >= 2 * m + 2) else { break };
        let (a, b) = lifting::find_admissible_lift(cur, u, LiftMode::PreserveLambda(2 * m), None)?
            .ok_or_else(|| Error::contract(format!("no admissible lift at {u}")))?;
        led.lift(u, a, b)?;
    }
    let h = led.current().clone();
    let (mut orient, mut bs) = base_out_branchings(&h, m, &roots, z0)?;
    let mut graph = h;
    for step in led.steps().iter().rev() {
        let before = LiftLedger::undo_graph_step(&graph, step)?;
        let before_orient = LiftLedger::undo_orientation_step(&orient, step)?;
        repair_branchings(&before, &before_orient, &mut bs, step, BranchingKind::Out)?;
        graph = before;
        orient = before_orient;
    }
    Ok(Branchings { kind: BranchingKind::Out, orientation: orient, branchings: bs })
}

fn base_out_branchings(h: &MultiGraph, m: usize, roots: &[usize], z0: usize) -> Result<(Orientation, Vec<Branching>)> {
    let n = h.vertex_count();
    let mut orient = Orientation::new();
    let mut m_edges: Vec<EdgeId> = Vec::new();
    let mut r = vec![0usize; n];
    for &v in roots {
        r[v] += 1;
    }
    for v in 0..n {
        for _ in 0..r[v] {
            let e = h
                .incident(v)
                .into_iter()
                .find(|e| !m_edges.contains(&e.id))
                .ok_or_else(|| Error::contract(format!("vertex {v} has too few edges")))?;
            m_edges.push(e.id);
            orient.set_from(&e, e.other(v));
        }
    }
    let z = if h.degree(z0) % 2 == 1 { Some(z0) } else { None };
    let pack = catlin_factor(h, m, &m_edges, z, None)?;
    if let Some(e) = pack.excluded {
        let ed = h.expect_edge(e)?;
        orient.set_from(&ed, ed.other(z0));
    }
    let mut bs = Vec::new();
    for (tree, &root) in pack.trees.iter().zip(roots) {
        let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
        for &id in tree {
            let e = h.edge(id).unwrap();
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &(y, id) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    let e = h.edge(id).unwrap();
                    orient.set_from(e, x);
                    q.push_back(y);
                }
            }
        }
        bs.push(Branching { root, edges: tree.iter().copied().collect() });
    }
    for e in h.edges() {
        if orient.get(e.id).is_none() {
            orient.set(e.id, crate::graph::Dir::Forward);
        }
    }
    Ok((orient, bs))
}

/// Rewrite the branching that used the created edge of `step` so that it
/// lives in the graph before the lift, keeping its root and kind.
pub fn repair_branchings(
    before: &MultiGraph,
    orient: &Orientation,
    bs: &mut [Branching],
    step: &LiftStep,
    kind: BranchingKind,
) -> Result<()> {
    let Some(c) = step.created else { return Ok(()) };
    let Some(b) = bs.iter_mut().find(|b| b.edges.contains(&c)) else { return Ok(()) };
    let u = step.pivot;
    let (e1, e2) = (step.first, step.second);
    // a -> u -> b along the induced orientation
    let (au, ub) = if orient.arc(&e1).unwrap().1 == u { (e1, e2) } else { (e2, e1) };
    let a = au.other(u);
    b.edges.remove(&c);
    // components of T - ab, on the graph before the lift (c is gone there)
    let n = before.vertex_count();
    let mut dsu = Dsu::new(n);
    for &id in &b.edges {
        let e = before.expect_edge(id)?;
        dsu.union(e.u, e.v);
    }
    let arcs: Vec<(usize, usize, EdgeId)> = b
        .edges
        .iter()
        .map(|&id| {
            let e = before.edge(id).unwrap();
            let (t, h) = orient.arc(e).unwrap();
            (t, h, id)
        })
        .collect();
    match kind {
        BranchingKind::Out => {
            if dsu.find(u) == dsu.find(a) {
                b.edges.insert(ub.id);
            } else {
                // in-edge of u inside the subtree below the removed arc
                let zu = arcs.iter().find(|&&(_, h, _)| h == u).map(|&(_, _, id)| id);
                let zu = zu.ok_or_else(|| Error::contract("pivot has no entering tree arc"))?;
                b.edges.remove(&zu);
                b.edges.insert(ub.id);
                b.edges.insert(au.id);
            }
        }
        BranchingKind::In => {
            let bb = ub.other(u);
            if dsu.find(u) == dsu.find(bb) {
                b.edges.insert(au.id);
            } else {
                let uz = arcs.iter().find(|&&(t, _, _)| t == u).map(|&(_, _, id)| id);
                let uz = uz.ok_or_else(|| Error::contract("pivot has no leaving tree arc"))?;
                b.edges.remove(&uz);
                b.edges.insert(au.id);
                b.edges.insert(ub.id);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize, times: usize) -> MultiGraph {
        let mut g = MultiGraph::new(n);
        for _ in 0..times {
            for i in 0..n {
                for j in i + 1..n {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn k4_has_two_trees_not_three() {
        let g = complete(4, 1);
        match spanning_tree_packing(&g, 2).unwrap() {
            Packing::Trees(t) => {
                assert_eq!(t.len(), 2);
                assert!(t.iter().all(|x| x.len() == 3));
            }
            _ => panic!("K4 packs two trees"),
        }
        match spanning_tree_packing(&g, 3).unwrap() {
            Packing::Deficient(p) => assert!(partition_boundary(&g, &p) < 2 * 3 * (p.len() - 1)),
            _ => panic!("K4 cannot pack three trees"),
        }
    }

    #[test]
    fn cycle_is_one_tree_connected() {
        let g = MultiGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(is_m_tree_connected(&g, 1).unwrap());
        assert!(!is_m_tree_connected(&g, 2).unwrap());
    }

    #[test]
    fn k4_out_branchings() {
        let g = complete(4, 1);
        // K4 is 3-edge-connected, enough for m = 1
        let b = disjoint_branchings(&g, 1, &[1, 0, 0, 0], BranchingKind::Out, Some(0)).unwrap();
        assert_eq!(b.branchings[0].root, 0);
        let outd = b.orientation.out_degrees(&g);
        assert!(outd[0] <= 1);
        assert!(outd.iter().all(|&d| d <= 2));
    }

    #[test]
    fn doubled_k5_two_in_branchings_after_lifts() {
        let g = complete(5, 2);
        let b = disjoint_branchings(&g, 2, &[0, 1, 0, 0, 1], BranchingKind::In, Some(2)).unwrap();
        let ind = b.orientation.in_degrees(&g);
        assert!(ind[2] <= 4);
        assert_eq!(b.branchings.len(), 2);
    }

    #[test]
    fn catlin_avoids_edges() {
        let g = complete(5, 1);
        let p = catlin_factor(&g, 2, &[EdgeId(0), EdgeId(1)], None, None).unwrap();
        for t in &p.trees {
            assert!(!t.contains(&EdgeId(0)) && !t.contains(&EdgeId(1)));
        }
    }

    #[test]
    fn dense_subgraph_found() {
        // K4 plus a pendant path: the K4 is 2-tree-connected
        let g = MultiGraph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)]).unwrap();
        let x = tree_connected_subgraph(&g, 1).unwrap();
        assert_eq!(x.len(), 6);
        let mut g2 = g.clone();
        g2.add_edge(0, 1).unwrap();
        g2.add_edge(2, 3).unwrap();
        let x = tree_connected_subgraph(&g2, 2).unwrap();
        assert!(x.len() >= 2);
        let (h, _) = g2.induced(&x);
        assert!(is_m_tree_connected(&h, 2).unwrap());
    }
}
