//! Modulo-k factors: parity machinery, bounded f-factors, the bipartite
//! orientation/factor correspondence, star decompositions and the
//! non-bipartite pipeline.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::connectivity::{self, CutOracle};
use crate::decomposition::{self, degrees_within};
use crate::error::{Error, Result};
use crate::graph::{Dir, EdgeId, MultiGraph, Orientation, ResidueMap, VertexSet};
use crate::lifting::LiftLedger;
use crate::orientation::{self, BoundSpec, Bounds, Pin, Regime, SearchOutcome};
use crate::tree_packing;

/// Orient `g1` and pick `f2` from the remaining edges so that at every vertex
/// d+_{g1}(v) + d_{f2}(v) = h(v) (mod 2).
pub fn mixed_parity_extension(
    g: &MultiGraph,
    g1: &BTreeSet<EdgeId>,
    h: &ResidueMap,
) -> Result<(Orientation, BTreeSet<EdgeId>)> {
    let n = g.vertex_count();
    if h.modulus() != 2 || h.len() != n {
        return Err(Error::domain("h must be a mod-2 map over V(G)"));
    }
    if let Some(e) = g1.iter().find(|&&e| !g.has_edge(e)) {
        return Err(Error::domain(format!("{e} is not an edge of G")));
    }
    if !g.is_connected() {
        return Err(Error::pre("graph is disconnected"));
    }
    if !(g1.len() + h.values().iter().sum::<usize>()).is_multiple_of(2) {
        return Err(Error::pre("|E(G1)| and sum of h differ in parity"));
    }
    let mut orient = Orientation::new();
    let mut f2 = BTreeSet::new();
    let mut parity = vec![0usize; n];
    if n == 0 {
        return Ok((orient, f2));
    }
    // BFS spanning tree, smallest edge id first.
    let mut parent: Vec<Option<(EdgeId, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = vec![0];
    seen[0] = true;
    let mut tree = BTreeSet::new();
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for e in g.incident(v) {
            let w = e.other(v);
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((e.id, v));
                tree.insert(e.id);
                order.push(w);
            }
        }
    }
    for e in g.edges() {
        if tree.contains(&e.id) {
            continue;
        }
        if g1.contains(&e.id) {
            orient.set(e.id, Dir::Forward);
            parity[e.u] ^= 1;
        }
    }
    for &v in order.iter().skip(1).rev() {
        let (id, up) = parent[v].expect("non-root vertices have parents");
        let need = (h.get(v) + parity[v]) % 2;
        let e = g.expect_edge(id)?;
        if g1.contains(&id) {
            let tail = if need == 1 { v } else { up };
            orient.set_from(&e, tail);
            parity[tail] ^= 1;
        } else if need == 1 {
            f2.insert(id);
            parity[v] ^= 1;
            parity[up] ^= 1;
        }
    }
    let outs = orient.out_degrees(g);
    let mut deg = vec![0usize; n];
    for &id in &f2 {
        let e = g.expect_edge(id)?;
        deg[e.u] += 1;
        deg[e.v] += 1;
    }
    if let Some(v) = (0..n).find(|&v| (outs[v] + deg[v]) % 2 != h.get(v)) {
        return Err(Error::contract(format!("parity fails at vertex {v}")));
    }
    Ok((orient, f2))
}

/// Which guarantee a factor was certified against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorBound {
    /// (d_G - d_L)/2 <= d_H <= (d_G + d_L)/2.
    TrailWindow,
    /// floor(d/2) - m - 1 + s <= d_H <= ceil(d/2) + m + 1 + s.
    Mod2Bounded,
    /// floor(d/2) - l(v) <= d_H <= ceil(d/2) + 2 with l = 1 on even and 2 on odd degrees.
    ConnectedMod2,
    /// floor(d/2) - (k-1) <= d_H <= ceil(d/2) + (k-1).
    BipartiteEdge,
    /// k/2 - 1 <= d_H <= d - k/2 + 1.
    BipartiteTree,
    NonBipartite,
    /// Residues only.
    ResiduesOnly,
}

/// A spanning subgraph given by edge ids, with what it was certified for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorResult {
    pub edges: BTreeSet<EdgeId>,
    pub degrees: Vec<usize>,
    pub f: ResidueMap,
    /// Per-vertex degree window; empty when only residues are certified.
    pub windows: Vec<(i64, i64)>,
    pub tree_level: usize,
    pub bound: FactorBound,
}

impl FactorResult {
    fn certify(
        g: &MultiGraph,
        edges: BTreeSet<EdgeId>,
        f: &ResidueMap,
        windows: Vec<(i64, i64)>,
        tree_level: usize,
        bound: FactorBound,
    ) -> Result<Self> {
        let degrees = degrees_within(g, &edges);
        let r = FactorResult { edges, degrees, f: f.clone(), windows, tree_level, bound };
        r.verify(g)?;
        Ok(r)
    }

    /// Re-check residues, windows and tree-connectivity against `g`.
    pub fn verify(&self, g: &MultiGraph) -> Result<()> {
        let n = g.vertex_count();
        if let Some(e) = self.edges.iter().find(|&&e| !g.has_edge(e)) {
            return Err(Error::contract(format!("{e} is not an edge of G")));
        }
        if self.degrees != degrees_within(g, &self.edges) || self.f.len() != n {
            return Err(Error::contract("degree vector does not match the edges"));
        }
        if let Some(v) = (0..n).find(|&v| !self.f.matches(v, self.degrees[v])) {
            return Err(Error::contract(format!("residue fails at vertex {v}")));
        }
        if !self.windows.is_empty() {
            let bad = (0..n).find(|&v| {
                let d = self.degrees[v] as i64;
                d < self.windows[v].0 || d > self.windows[v].1
            });
            if let Some(v) = bad {
                return Err(Error::contract(format!("degree {} at vertex {v} leaves its window", self.degrees[v])));
            }
        }
        if self.tree_level > 0 {
            let h = g.spanning_subgraph(self.edges.iter().copied())?;
            if !tree_packing::is_m_tree_connected(&h, self.tree_level)? {
                return Err(Error::contract(format!("factor is not {}-tree-connected", self.tree_level)));
            }
        }
        Ok(())
    }
}

fn mod2_map(values: impl IntoIterator<Item = i64>) -> Result<ResidueMap> {
    ResidueMap::new(2, values.into_iter().collect())
}

/// An f-factor of the base of `ledger` (mod 2) with
/// (d_G - d_L)/2 <= d_H <= (d_G + d_L)/2, where L is the ledger's current
/// graph. L must be connected and span V(G).
pub fn trail_colored_factor(ledger: &LiftLedger, f: &ResidueMap) -> Result<FactorResult> {
    let g = ledger.base();
    let l = ledger.current();
    let n = g.vertex_count();
    if f.modulus() != 2 || f.len() != n {
        return Err(Error::domain("f must be a mod-2 map over V(G)"));
    }
    if f.values().iter().sum::<usize>() % 2 != 0 {
        return Err(Error::pre("sum of f is odd"));
    }
    if !l.is_connected() {
        return Err(Error::pre("derived graph L is disconnected"));
    }
    let dg = g.degrees();
    let dl = l.degrees();
    let half: Vec<usize> = (0..n).map(|v| (dg[v] - dl[v]) / 2).collect();
    let mut l1 = BTreeSet::new();
    let mut walks: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    let mut on_trail = BTreeSet::new();
    for e in l.edges() {
        let t = ledger.trail(e.id).ok_or_else(|| Error::contract(format!("no trail for {}", e.id)))?;
        let walk: Vec<EdgeId> = t.walk(g)?.into_iter().map(|(be, _, _)| be.id).collect();
        if walk.len().is_multiple_of(2) {
            l1.insert(e.id);
        }
        on_trail.extend(walk.iter().copied());
        walks.insert(e.id, walk);
    }
    let r_ids: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !on_trail.contains(e)).collect();
    let r = g.spanning_subgraph(r_ids.iter().copied())?;
    let comps: Vec<Vec<usize>> = r.components().into_iter().filter(|c| c.iter().any(|&v| r.degree(v) > 0)).collect();
    let mut is_q = vec![false; n];
    let mut tours: Vec<(Vec<EdgeId>, Option<usize>)> = Vec::new();
    for c in &comps {
        let inside: BTreeSet<usize> = c.iter().copied().collect();
        let ids: Vec<EdgeId> = r.edges().iter().filter(|e| inside.contains(&e.u)).map(|e| e.id).collect();
        let start = *c.iter().min().expect("nonempty component");
        let sub = r.spanning_subgraph(ids.iter().copied())?;
        let tour: Vec<EdgeId> = sub.euler_tour(Some(start), None)?.into_iter().map(|s| s.edge).collect();
        let odd = ids.len() % 2 == 1;
        if odd {
            is_q[start] = true;
        }
        tours.push((tour, odd.then_some(start)));
    }
    let h = mod2_map((0..n).map(|v| f.get(v) as i64 - half[v] as i64 - i64::from(is_q[v])))?;
    let (o1, f2) = mixed_parity_extension(l, &l1, &h)?;
    let t: Vec<usize> = {
        let outs = decomposition::out_degrees_within(l, &o1, &l1);
        let df2 = degrees_within(l, &f2);
        (0..n).map(|v| outs[v] + df2[v]).collect()
    };
    let mut blue = BTreeSet::new();
    let mut paint = |seq: &[EdgeId], start_blue: bool| {
        for (i, &e) in seq.iter().enumerate() {
            if (i % 2 == 0) == start_blue {
                blue.insert(e);
            }
        }
    };
    for (tour, q) in &tours {
        match q {
            None => paint(tour, true),
            Some(q) => paint(tour, t[*q] == 0),
        }
    }
    for e in l.edges() {
        let walk = &walks[&e.id];
        if l1.contains(&e.id) {
            let (tail, _) = o1.arc(e).ok_or_else(|| Error::contract("L1 edge left unoriented"))?;
            if tail == e.u {
                paint(walk, true);
            } else {
                let rev: Vec<EdgeId> = walk.iter().rev().copied().collect();
                paint(&rev, true);
            }
        } else {
            paint(walk, f2.contains(&e.id));
        }
    }
    let dh = degrees_within(g, &blue);
    for v in 0..n {
        let corr: i64 = match (is_q[v], t[v] == 0) {
            (false, _) => 0,
            (true, true) => 1,
            (true, false) => -1,
        };
        if dh[v] as i64 != t[v] as i64 + half[v] as i64 + corr {
            return Err(Error::contract(format!("degree identity fails at vertex {v}")));
        }
    }
    let windows = (0..n).map(|v| (half[v] as i64, ((dg[v] + dl[v]) / 2) as i64)).collect();
    FactorResult::certify(g, blue, f, windows, 0, FactorBound::TrailWindow)
}

/// An m-tree-connected f-factor (mod 2) with
/// floor(d/2) - m - 1 + s(v) <= d_H(v) <= ceil(d/2) + m + 1 + s(v), and
/// d_H(z0) <= floor(d(z0)/2) + s(z0) when `z0` is given. Needs a
/// (2m+2)-edge-connected graph, 0 <= s <= m off z0, and s(z0) <= m+1
/// (m+2 when d(z0) is odd).
pub fn f_factor_mod2_bounded(
    g: &MultiGraph,
    f: &ResidueMap,
    m: usize,
    s: &[usize],
    z0: Option<usize>,
) -> Result<FactorResult> {
    let n = g.vertex_count();
    if f.modulus() != 2 || f.len() != n || s.len() != n {
        return Err(Error::domain("f and s must cover V(G), f mod 2"));
    }
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    if f.values().iter().sum::<usize>() % 2 != 0 {
        return Err(Error::pre("sum of f is odd"));
    }
    if let Some(z) = z0.filter(|&z| z >= n) {
        return Err(Error::domain(format!("z0 = {z} out of range")));
    }
    for v in 0..n {
        let cap = if Some(v) == z0 { m + 1 + g.degree(v) % 2 } else { m };
        if s[v] > cap {
            return Err(Error::pre(format!("s({v}) = {} exceeds {cap}", s[v])));
        }
    }
    let lambda = connectivity::edge_connectivity_value(g);
    if lambda < 2 * m + 2 {
        return Err(Error::pre(format!("graph is {lambda}-edge-connected, needs {}", 2 * m + 2)));
    }
    let z = z0.unwrap_or(0);
    let mut r1 = vec![0usize; n];
    let mut r2 = vec![0usize; n];
    r1[z] = m;
    r2[z] = 1;
    let dec = decomposition::tree_plus_liftable_decomposition(g, m, 1, s, &r1, &r2, z0)?;
    let dm1 = degrees_within(g, &dec.m1);
    let fp = mod2_map((0..n).map(|v| f.get(v) as i64 - dm1[v] as i64))?;
    let hp = trail_colored_factor(&dec.ledger, &fp)?;
    let edges: BTreeSet<EdgeId> = dec.m1.iter().chain(&hp.edges).copied().collect();
    let deg = g.degrees();
    let windows = (0..n)
        .map(|v| {
            let (d, sv, m) = (deg[v] as i64, s[v] as i64, m as i64);
            let hi = if Some(v) == z0 { d / 2 + sv } else { (d + 1) / 2 + m + 1 + sv };
            (d / 2 - m - 1 + sv, hi)
        })
        .collect();
    FactorResult::certify(g, edges, f, windows, m, FactorBound::Mod2Bounded)
}

/// A connected f-factor (mod 2) of a 4-edge-connected graph with
/// floor(d/2) - l(v) <= d_H <= ceil(d/2) + 2.
pub fn connected_f_factor(g: &MultiGraph, f: &ResidueMap) -> Result<FactorResult> {
    let n = g.vertex_count();
    if f.modulus() != 2 || f.len() != n {
        return Err(Error::domain("f must be a mod-2 map over V(G)"));
    }
    let deg = g.degrees();
    let s: Vec<usize> = (0..n)
        .map(|v| {
            let d = deg[v] as i64;
            usize::from(d % 2 == 0 && (d / 2 - 2 - f.get(v) as i64).rem_euclid(2) == 0)
        })
        .collect();
    let h = f_factor_mod2_bounded(g, f, 1, &s, None)?;
    let windows = (0..n)
        .map(|v| {
            let d = deg[v] as i64;
            let l = if d % 2 == 0 { 1 } else { 2 };
            (d / 2 - l, (d + 1) / 2 + 2)
        })
        .collect();
    FactorResult::certify(g, h.edges, f, windows, 1, FactorBound::ConnectedMod2)
}

/// Connected spanning subgraph with all degrees even, near d/2.
pub fn spanning_eulerian_subgraph(g: &MultiGraph) -> Result<FactorResult> {
    connected_f_factor(g, &ResidueMap::constant(2, g.vertex_count(), 0)?)
}

/// Proper 2-colouring, each component's smallest vertex on side `false`.
pub fn bipartition(g: &MultiGraph) -> Option<Vec<bool>> {
    let n = g.vertex_count();
    let mut side: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if side[s].is_some() {
            continue;
        }
        side[s] = Some(false);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let sv = side[v].unwrap();
            for w in g.neighbors(v) {
                match side[w] {
                    None => {
                        side[w] = Some(!sv);
                        stack.push(w);
                    }
                    Some(sw) if sw == sv => return None,
                    _ => {}
                }
            }
        }
    }
    Some(side.into_iter().map(|x| x.unwrap()).collect())
}

/// Edges directed from side `false` (A) to side `true` (B).
pub fn orientation_to_factor(g: &MultiGraph, sides: &[bool], o: &Orientation) -> BTreeSet<EdgeId> {
    g.edges().iter().filter(|e| o.arc(e).is_some_and(|(t, _)| !sides[t])).map(|e| e.id).collect()
}

/// Inverse of [`orientation_to_factor`]: factor edges go A -> B, the rest B -> A.
pub fn factor_to_orientation(g: &MultiGraph, sides: &[bool], h: &BTreeSet<EdgeId>) -> Orientation {
    let mut o = Orientation::new();
    for e in g.edges() {
        let a = if sides[e.u] { e.v } else { e.u };
        let b = e.other(a);
        o.set_from(e, if h.contains(&e.id) { a } else { b });
    }
    o
}

/// p = f on A and d - f on B: a p-orientation's A -> B edges form an f-factor.
pub fn factor_residues_to_p(g: &MultiGraph, sides: &[bool], f: &ResidueMap) -> Result<ResidueMap> {
    let values = (0..g.vertex_count())
        .map(|v| if sides[v] { g.degree(v) as i64 - f.get(v) as i64 } else { f.get(v) as i64 })
        .collect();
    ResidueMap::new(f.modulus(), values)
}

/// Whether sum_A f = sum_B f (mod k).
pub fn is_compatible(sides: &[bool], f: &ResidueMap) -> bool {
    let k = f.modulus() as i64;
    let diff: i64 = (0..sides.len()).map(|v| if sides[v] { -(f.get(v) as i64) } else { f.get(v) as i64 }).sum();
    diff.rem_euclid(k) == 0
}

/// An f-factor (mod k) of a bipartite graph with compatible f, windowed per
/// the regime. `pin` fixes d_H at one vertex.
pub fn bipartite_f_factor(g: &MultiGraph, f: &ResidueMap, regime: Regime, pin: Option<Pin>) -> Result<FactorResult> {
    let sides = bipartition(g).ok_or_else(|| Error::domain("graph is not bipartite"))?;
    bipartite_f_factor_on(g, &sides, f, regime, pin)
}

fn bipartite_windows(g: &MultiGraph, k: usize, regime: Regime) -> Vec<(i64, i64)> {
    let k = k as i64;
    g.degrees()
        .iter()
        .map(|&d| {
            let d = d as i64;
            match regime {
                Regime::Tree2k2 => ((k - 1) / 2, d - (k - 1) / 2),
                _ => (d / 2 - (k - 1), (d + 1) / 2 + (k - 1)),
            }
        })
        .collect()
}

fn bipartite_f_factor_on(
    g: &MultiGraph,
    sides: &[bool],
    f: &ResidueMap,
    regime: Regime,
    pin: Option<Pin>,
) -> Result<FactorResult> {
    let n = g.vertex_count();
    if f.len() != n || sides.len() != n {
        return Err(Error::domain("f must cover V(G)"));
    }
    if g.edges().iter().any(|e| sides[e.u] == sides[e.v]) {
        return Err(Error::domain("sides are not a bipartition"));
    }
    let bound = match regime {
        Regime::Edge3k3 => FactorBound::BipartiteEdge,
        Regime::Tree2k2 => FactorBound::BipartiteTree,
        Regime::OddEdge => return Err(Error::domain("factor regimes are edge or tree")),
    };
    if !is_compatible(sides, f) {
        return Err(Error::pre("f is not compatible with the bipartition"));
    }
    let p = factor_residues_to_p(g, sides, f)?;
    let pin = match pin {
        Some(Pin { vertex, target }) if vertex < n => {
            let d = g.degree(vertex);
            if target > d {
                return Err(Error::domain(format!("pin target {target} exceeds degree {d}")));
            }
            Some(Pin { vertex, target: if sides[vertex] { d - target } else { target } })
        }
        Some(p) => return Err(Error::domain(format!("pin vertex {} out of range", p.vertex))),
        None => None,
    };
    let o = orientation::orient_mod_k_bounded(g, &p, regime, pin)?.orientation;
    let h = orientation_to_factor(g, sides, &o);
    FactorResult::certify(g, h, f, bipartite_windows(g, f.modulus(), regime), 0, bound)
}

/// The two-factor form on a bipartite graph with sides (V1, V2): G1 = h and
/// G2 = E - h with d_{G_i}(v) = p(v) (mod k) on V_i and both factors inside
/// floor(d/2) - (k-1) .. ceil(d/2) + (k-1).
pub fn bipartite_decomposition_holds(g: &MultiGraph, sides: &[bool], h: &BTreeSet<EdgeId>, p: &ResidueMap) -> bool {
    let k = p.modulus();
    let d1 = degrees_within(g, h);
    let deg = g.degrees();
    (0..g.vertex_count()).all(|v| {
        let d2 = deg[v] - d1[v];
        let own = if sides[v] { d2 } else { d1[v] };
        let (lo, hi) = ((deg[v] / 2) as i64 - (k as i64 - 1), deg[v].div_ceil(2) as i64 + k as i64 - 1);
        p.matches(v, own) && [d1[v], d2].iter().all(|&x| lo <= x as i64 && x as i64 <= hi)
    })
}

/// A k-star: a center and k edges at it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: usize,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarDecomposition {
    Stars {
        stars: Vec<Star>,
        /// Every v centers floor(d/2k) or ceil(d/2k) stars, by construction.
        centers_certified: bool,
    },
    Infeasible,
}

pub fn star_decomposition(g: &MultiGraph, k: usize) -> Result<StarDecomposition> {
    star_decomposition_with(g, k, &orientation::SearchConfig::default())
}

/// k-star decomposition via an orientation with every out-degree divisible
/// by k. On simple, essentially (3k-3)-edge-connected graphs with
/// minimum degree >= 2k-1 the center counts are also bounded.
pub fn star_decomposition_with(g: &MultiGraph, k: usize, cfg: &orientation::SearchConfig) -> Result<StarDecomposition> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    if !g.edge_count().is_multiple_of(k) {
        return Err(Error::domain(format!("|E| = {} is not divisible by {k}", g.edge_count())));
    }
    let n = g.vertex_count();
    let p = ResidueMap::constant(k, n, 0)?;
    let certify = k >= 2
        && n >= 2
        && g.is_simple()
        && g.min_degree() >= 2 * k - 1
        && connectivity::essential_edge_connectivity(g).is_ok_and(|e| e.at_least(3 * k - 3));
    let spec = if certify {
        let deg = g.degrees();
        let lo = deg.iter().map(|&d| k * (d / (2 * k))).collect();
        let hi = deg.iter().map(|&d| k * d.div_ceil(2 * k)).collect();
        BoundSpec::new(Bounds::Interval { lo, hi })
    } else {
        BoundSpec::new(Bounds::Unbounded)
    };
    let report = orientation::orient_mod_k_search_with(g, &p, &spec, &Orientation::new(), cfg)?;
    let o = match report.outcome {
        SearchOutcome::Found(o) => o,
        SearchOutcome::Infeasible if certify => {
            return Err(Error::contract("no star decomposition with bounded center counts"));
        }
        SearchOutcome::Infeasible => return Ok(StarDecomposition::Infeasible),
        SearchOutcome::Exhausted => return Err(Error::Budget { nodes: report.nodes }),
        SearchOutcome::Cancelled => return Err(Error::Cancelled),
    };
    let mut outs: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for e in g.edges() {
        let (t, _) = o.arc(e).ok_or_else(|| Error::contract("search left an edge unoriented"))?;
        outs[t].push(e.id);
    }
    let mut stars = Vec::new();
    for (v, es) in outs.iter().enumerate() {
        if es.len() % k != 0 {
            return Err(Error::contract(format!("out-degree of {v} is not divisible by {k}")));
        }
        for chunk in es.chunks(k) {
            stars.push(Star { center: v, edges: chunk.to_vec() });
        }
    }
    Ok(StarDecomposition::Stars { stars, centers_certified: certify })
}

/// Check that `stars` is a k-star decomposition of `g`.
pub fn verify_stars(g: &MultiGraph, k: usize, stars: &[Star]) -> bool {
    let mut seen = BTreeSet::new();
    stars.iter().all(|s| {
        s.edges.len() == k
            && s.edges.iter().all(|&e| g.edge(e).is_some_and(|ed| ed.touches(s.center)) && seen.insert(e))
    }) && seen.len() == g.edge_count()
}

/// Two factors with edge counts differing by at most one and
/// ceil(d/2) - 1 <= d_{G_i} <= floor(d/2) + 1. The edge `xy` lies in G1 and
/// both its ends have d_{G1} >= ceil(d/2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedSplit {
    pub g1: BTreeSet<EdgeId>,
    pub g2: BTreeSet<EdgeId>,
    pub xy: EdgeId,
}

pub fn balanced_split(g: &MultiGraph) -> Result<BalancedSplit> {
    if g.edge_count() == 0 {
        return Err(Error::domain("graph has no edges"));
    }
    let mut g1 = BTreeSet::new();
    let mut g2 = BTreeSet::new();
    let mut xy = None;
    let mut surplus = 0usize;
    for comp in g.components() {
        let inside: BTreeSet<usize> = comp.iter().copied().collect();
        let ids: Vec<EdgeId> = g.edges().iter().filter(|e| inside.contains(&e.u)).map(|e| e.id).collect();
        if ids.is_empty() {
            continue;
        }
        let sub = g.spanning_subgraph(ids.iter().copied())?;
        let (mut b, mut r, e) = split_component(&sub, &comp, &ids)?;
        if xy.is_none() {
            xy = Some(e);
        } else if b.len() > r.len() && surplus == 1 {
            std::mem::swap(&mut b, &mut r);
        }
        surplus += b.len() - r.len().min(b.len());
        surplus -= (r.len() > b.len()) as usize;
        g1.extend(b);
        g2.extend(r);
    }
    let xy = xy.expect("some component has edges");
    let out = BalancedSplit { g1, g2, xy };
    check_balanced_split(g, &out)?;
    Ok(out)
}

fn check_balanced_split(g: &MultiGraph, s: &BalancedSplit) -> Result<()> {
    let (a, b) = (s.g1.len(), s.g2.len());
    if a + b != g.edge_count() || !s.g1.is_disjoint(&s.g2) || a < b || a > b + 1 {
        return Err(Error::contract("edge counts are unbalanced"));
    }
    let deg = g.degrees();
    let d1 = degrees_within(g, &s.g1);
    let d2 = degrees_within(g, &s.g2);
    for v in 0..g.vertex_count() {
        let (lo, hi) = (deg[v].div_ceil(2) as i64 - 1, (deg[v] / 2) as i64 + 1);
        if [d1[v], d2[v]].iter().any(|&x| (x as i64) < lo || x as i64 > hi) {
            return Err(Error::contract(format!("split window fails at vertex {v}")));
        }
    }
    let e = g.expect_edge(s.xy)?;
    if !s.g1.contains(&s.xy) || d1[e.u] < deg[e.u].div_ceil(2) || d1[e.v] < deg[e.v].div_ceil(2) {
        return Err(Error::contract("xy endpoint strengthening fails"));
    }
    Ok(())
}

fn split_component(
    sub: &MultiGraph,
    comp: &[usize],
    ids: &[EdgeId],
) -> Result<(BTreeSet<EdgeId>, BTreeSet<EdgeId>, EdgeId)> {
    if comp.len() == 2 {
        let take = ids.len().div_ceil(2);
        let b: BTreeSet<EdgeId> = ids[..take].iter().copied().collect();
        let r: BTreeSet<EdgeId> = ids[take..].iter().copied().collect();
        return Ok((b, r, ids[0]));
    }
    let xy = if ids.len() >= comp.len() {
        // a non-bridge edge
        *ids.iter()
            .find(|&&e| {
                let rest = sub.without_edges(&[e]);
                let ed = sub.edge(e).unwrap();
                rest.components().iter().any(|c| c.contains(&ed.u) && c.contains(&ed.v))
            })
            .ok_or_else(|| Error::contract("cyclic component without a non-bridge edge"))?
    } else {
        let x = *comp.iter().find(|&&v| sub.degree(v) == 1).ok_or_else(|| Error::contract("tree without a leaf"))?;
        sub.incident(x)[0].id
    };
    let e = sub.expect_edge(xy)?;
    let gp = sub.without_edges(&[xy]);
    let mut gpp = gp.clone();
    let odd: Vec<usize> = comp.iter().copied().filter(|&v| gp.degree(v) % 2 == 1).collect();
    let mut matching = BTreeSet::new();
    for pair in odd.chunks(2) {
        matching.insert(gpp.add_edge(pair[0], pair[1])?);
    }
    let u = *comp
        .iter()
        .find(|&&v| v != e.u && v != e.v && gpp.degree(v) > 0)
        .ok_or_else(|| Error::contract("no tour start away from xy"))?;
    let start = gpp.incident(u).into_iter().find(|m| matching.contains(&m.id)).map(|m| (m.id, u));
    let tour = gpp.euler_tour(Some(u), start)?;
    let mut blue = BTreeSet::from([xy]);
    let mut red = BTreeSet::new();
    for (i, st) in tour.iter().filter(|st| !matching.contains(&st.edge)).enumerate() {
        if i % 2 == 0 {
            red.insert(st.edge);
        } else {
            blue.insert(st.edge);
        }
    }
    Ok((blue, red, xy))
}

/// Internal edges M (inside A or inside its complement) such that f - d_M
/// becomes compatible across the partition. Needs e(A) + e(B) >= k - 1
/// (k odd) or k/2 - 1 (k even, with sum f even).
pub fn compatibility_factor(g: &MultiGraph, a: &VertexSet, f: &ResidueMap) -> Result<BTreeSet<EdgeId>> {
    let n = g.vertex_count();
    let k = f.modulus();
    if f.len() != n || a.universe() != n {
        return Err(Error::domain("f and A must cover V(G)"));
    }
    let inner_a: Vec<EdgeId> = g.edges().iter().filter(|e| a.contains(e.u) && a.contains(e.v)).map(|e| e.id).collect();
    let inner_b: Vec<EdgeId> =
        g.edges().iter().filter(|e| !a.contains(e.u) && !a.contains(e.v)).map(|e| e.id).collect();
    if k.is_multiple_of(2) && f.values().iter().sum::<usize>() % 2 != 0 {
        return Err(Error::pre("sum of f is odd for even k"));
    }
    let need = if k % 2 == 1 { k - 1 } else { (k / 2).saturating_sub(1) };
    if inner_a.len() + inner_b.len() < need {
        return Err(Error::pre(format!("only {} internal edges, need {need}", inner_a.len() + inner_b.len())));
    }
    let sides: Vec<bool> = (0..n).map(|v| !a.contains(v)).collect();
    let diff: i64 = (0..n).map(|v| if sides[v] { -(f.get(v) as i64) } else { f.get(v) as i64 }).sum();
    let mut best: Option<(usize, usize)> = None;
    for total in 0..=inner_a.len() + inner_b.len() {
        for na in 0..=total.min(inner_a.len()) {
            let nb = total - na;
            if nb <= inner_b.len() && (diff - 2 * na as i64 + 2 * nb as i64).rem_euclid(k as i64) == 0 {
                best = Some((na, nb));
                break;
            }
        }
        if best.is_some() {
            break;
        }
    }
    let (na, nb) = best.ok_or_else(|| Error::contract("no internal repair found"))?;
    Ok(inner_a[..na].iter().chain(&inner_b[..nb]).copied().collect())
}

/// Strength requirement for [`bipartite_factor_m_ec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BipartiteMode {
    /// (2m-1)-edge-connected input, m-edge-connected factor.
    Edge,
    /// 2m-tree-connected input, m-tree-connected factor.
    Tree,
}

/// Sides of a 2-colouring in which every vertex set X has at least half of
/// its boundary crossing (d_F(X) >= d_G(X)/2). Exhaustive over sets for
/// n <= 20; vertex flips only above that.
pub fn half_cut_bipartition(g: &MultiGraph) -> Vec<bool> {
    let n = g.vertex_count();
    let mut side = vec![false; n];
    if n == 0 {
        return side;
    }
    let crossing = |side: &[bool]| g.edges().iter().filter(|e| side[e.u] != side[e.v]).count();
    loop {
        // single-vertex flips
        let mut improved = true;
        while improved {
            improved = false;
            for v in 0..n {
                let cross = g.incident(v).iter().filter(|e| side[e.other(v)] != side[v]).count();
                if 2 * cross < g.degree(v) {
                    side[v] = !side[v];
                    improved = true;
                }
            }
        }
        if n > connectivity::SUBSET_GUARD {
            return side;
        }
        let all = CutOracle::new(g);
        let h = g.spanning_subgraph(g.edges().iter().filter(|e| side[e.u] != side[e.v]).map(|e| e.id)).unwrap();
        let cut = CutOracle::new(&h);
        let ground = (1u64 << (n - 1)) - 1;
        let bad = connectivity::first_subset(ground, false, |x| 2 * cut.cut(x) < all.cut(x));
        match bad {
            None => return side,
            Some(x) => {
                let before = crossing(&side);
                for (v, s) in side.iter_mut().enumerate() {
                    if x >> v & 1 == 1 {
                        *s = !*s;
                    }
                }
                debug_assert!(crossing(&side) > before);
            }
        }
    }
}

/// A bipartite factor (all edges crossing a half-cut 2-colouring) that is
/// m-edge-connected or m-tree-connected, with its sides.
pub fn bipartite_factor_m_ec(g: &MultiGraph, m: usize, mode: BipartiteMode) -> Result<(BTreeSet<EdgeId>, Vec<bool>)> {
    if m == 0 {
        return Err(Error::domain("m must be positive"));
    }
    match mode {
        BipartiteMode::Edge => {
            let lambda = connectivity::edge_connectivity_value(g);
            if lambda < 2 * m - 1 {
                return Err(Error::pre(format!("graph is {lambda}-edge-connected, needs {}", 2 * m - 1)));
            }
        }
        BipartiteMode::Tree => {
            if !tree_packing::is_m_tree_connected(g, 2 * m)? {
                return Err(Error::pre(format!("graph is not {}-tree-connected", 2 * m)));
            }
        }
    }
    let sides = half_cut_bipartition(g);
    let f: BTreeSet<EdgeId> = g.edges().iter().filter(|e| sides[e.u] != sides[e.v]).map(|e| e.id).collect();
    let h = g.spanning_subgraph(f.iter().copied())?;
    let ok = match mode {
        BipartiteMode::Edge => connectivity::edge_connectivity_value(&h) >= m,
        BipartiteMode::Tree => tree_packing::is_m_tree_connected(&h, m)?,
    };
    if !ok {
        return Err(Error::contract("bipartite factor misses the required strength"));
    }
    Ok((f, sides))
}

/// Whether the non-bipartite pipeline certifies windows or residues only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PipelineMode {
    /// Requires (6k-7)-edge-connectivity and certifies the windows.
    Strict,
    /// Runs every stage on smaller inputs and checks residues only.
    Smoke,
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Domain(m) => Error::Domain(format!("{name}: {m}")),
        Error::Precondition(m) => Error::Precondition(format!("{name}: {m}")),
        Error::Contract(m) => Error::Contract(format!("{name}: {m}")),
        Error::Infeasible(m) => Error::Infeasible(format!("{name}: {m}")),
        other => other,
    })
}

/// Residue budget xi_k: k - 1 for odd k, k/2 - 1 for even k.
pub fn xi(k: usize) -> usize {
    if k % 2 == 1 {
        k - 1
    } else {
        k / 2 - 1
    }
}

/// An f-factor (mod k, k >= 3) of a non-bipartite graph with bipartite
/// index at least xi_k, without any compatibility condition on f.
pub fn nonbipartite_f_factor(g: &MultiGraph, f: &ResidueMap, mode: PipelineMode) -> Result<FactorResult> {
    let n = g.vertex_count();
    let k = f.modulus();
    if k < 3 || f.len() != n {
        return Err(Error::domain("need k >= 3 and f over V(G)"));
    }
    if k.is_multiple_of(2) && f.values().iter().sum::<usize>() % 2 != 0 {
        return Err(Error::pre("sum of f is odd for even k"));
    }
    let (bi, _) = stage("index", connectivity::bipartite_index(g))?;
    if bi == 0 {
        return Err(Error::domain("graph is bipartite"));
    }
    let xi = xi(k);
    if bi < xi {
        return Err(Error::pre(format!("index: bi(G) = {bi} < {xi}")));
    }
    if mode == PipelineMode::Strict {
        let lambda = connectivity::edge_connectivity_value(g);
        if lambda < 6 * k - 7 {
            return Err(Error::pre(format!("graph is {lambda}-edge-connected, needs {}", 6 * k - 7)));
        }
    }
    let (hset, sides) = match mode {
        PipelineMode::Strict => stage("bipartite factor", bipartite_factor_m_ec(g, 3 * k - 3, BipartiteMode::Edge))?,
        PipelineMode::Smoke => {
            let sides = half_cut_bipartition(g);
            let h = g.edges().iter().filter(|e| sides[e.u] != sides[e.v]).map(|e| e.id).collect();
            (h, sides)
        }
    };
    let rest: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !hset.contains(e)).collect();
    let (w, fset): (Vec<EdgeId>, BTreeSet<EdgeId>) = if rest.len() == xi {
        (rest.clone(), BTreeSet::new())
    } else {
        let leftover = g.spanning_subgraph(rest.iter().copied())?;
        let split = stage("balanced split", balanced_split(&leftover))?;
        let mut w1 = vec![split.xy];
        w1.extend(split.g1.iter().copied().filter(|&e| e != split.xy).take(xi.div_ceil(2) - 1));
        let w2: Vec<EdgeId> = split.g2.iter().copied().take(xi / 2).collect();
        let fset = split.g1.iter().copied().filter(|e| !w1.contains(e)).collect();
        (w1.into_iter().chain(w2).collect(), fset)
    };
    let df = degrees_within(g, &fset);
    let f_after_f = ResidueMap::new(k, (0..n).map(|v| f.get(v) as i64 - df[v] as i64).collect())?;
    let wg = g.spanning_subgraph(w.iter().copied())?;
    let a = VertexSet::from_iter(n, (0..n).filter(|&v| !sides[v]));
    let mset = stage("compatibility", compatibility_factor(&wg, &a, &f_after_f))?;
    let dm = degrees_within(g, &mset);
    let fp = ResidueMap::new(k, (0..n).map(|v| f_after_f.get(v) as i64 - dm[v] as i64).collect())?;
    let hg = g.spanning_subgraph(hset.iter().copied())?;
    let hprime = match mode {
        PipelineMode::Strict => {
            stage("bipartite f-factor", bipartite_f_factor_on(&hg, &sides, &fp, Regime::Edge3k3, None))?.edges
        }
        PipelineMode::Smoke => {
            if !is_compatible(&sides, &fp) {
                return Err(Error::contract("bipartite f-factor: residual f is not compatible"));
            }
            let p = factor_residues_to_p(&hg, &sides, &fp)?;
            match orientation::orient_mod_k_search(&hg, &p, &BoundSpec::new(Bounds::Unbounded))? {
                SearchOutcome::Found(o) => orientation_to_factor(&hg, &sides, &o),
                other => return Err(Error::Infeasible(format!("bipartite f-factor: search gave {other:?}"))),
            }
        }
    };
    let edges: BTreeSet<EdgeId> = hprime.into_iter().chain(fset).chain(mset).collect();
    match mode {
        PipelineMode::Strict => {
            let slack = if k % 2 == 1 { (3 * k / 2) as i64 } else { ((5 * k - 1) / 4) as i64 };
            let windows = g.degrees().iter().map(|&d| ((d / 2) as i64 - slack, d.div_ceil(2) as i64 + slack)).collect();
            FactorResult::certify(g, edges, f, windows, 0, FactorBound::NonBipartite)
        }
        PipelineMode::Smoke => FactorResult::certify(g, edges, f, Vec::new(), 0, FactorBound::ResiduesOnly),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> MultiGraph {
        MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn mixed_parity_on_c4() {
        let g = c4();
        let g1: BTreeSet<EdgeId> = [EdgeId(0), EdgeId(2)].into();
        // h read off from 0->1, 3->2 with F2 = {30}
        let h = ResidueMap::new(2, vec![0, 0, 0, 0]).unwrap();
        let (o, f2) = mixed_parity_extension(&g, &g1, &h).unwrap();
        let outs = o.out_degrees(&g);
        for v in 0..4 {
            let fd = f2.iter().filter(|&&e| g.edge(e).unwrap().touches(v)).count();
            assert_eq!((outs[v] + fd) % 2, 0);
        }
        assert!(f2.iter().all(|e| !g1.contains(e)));
    }

    #[test]
    fn all_g1_is_parity_orientation() {
        let g = c4();
        let all: BTreeSet<EdgeId> = g.edge_ids().into_iter().collect();
        let h = ResidueMap::new(2, vec![1, 1, 1, 1]).unwrap();
        let (o, f2) = mixed_parity_extension(&g, &all, &h).unwrap();
        assert!(f2.is_empty());
        assert!(o.out_degrees(&g).iter().all(|&d| d % 2 == 1));
    }

    #[test]
    fn empty_g1_zero_h_gives_empty_factor() {
        let g = c4();
        let h = ResidueMap::constant(2, 4, 0).unwrap();
        let (o, f2) = mixed_parity_extension(&g, &BTreeSet::new(), &h).unwrap();
        assert!(o.is_empty() && f2.is_empty());
    }

    #[test]
    fn parity_mismatch_rejected() {
        let g = c4();
        let h = ResidueMap::new(2, vec![1, 0, 0, 0]).unwrap();
        assert!(mixed_parity_extension(&g, &BTreeSet::new(), &h).is_err());
    }

    fn complete(n: usize, mult: usize) -> MultiGraph {
        let mut g = MultiGraph::new(n);
        for _ in 0..mult {
            for i in 0..n {
                for j in i + 1..n {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    fn k33(mult: usize) -> MultiGraph {
        let mut g = MultiGraph::new(6);
        for _ in 0..mult {
            for a in 0..3 {
                for b in 3..6 {
                    g.add_edge(a, b).unwrap();
                }
            }
        }
        g
    }

    fn all_maps(k: usize, n: usize) -> Vec<ResidueMap> {
        (0..k.pow(n as u32))
            .map(|mut c| {
                let vals = (0..n)
                    .map(|_| {
                        let x = (c % k) as i64;
                        c /= k;
                        x
                    })
                    .collect();
                ResidueMap::new(k, vals).unwrap()
            })
            .collect()
    }

    /// Brute force: is there any subset of E(G) with the residues inside the windows?
    fn some_factor_exists(g: &MultiGraph, f: &ResidueMap, windows: &[(i64, i64)], connected: bool) -> bool {
        let ids = g.edge_ids();
        (0..1u64 << ids.len()).any(|mask| {
            let set: BTreeSet<EdgeId> = (0..ids.len()).filter(|i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
            let d = degrees_within(g, &set);
            (0..g.vertex_count())
                .all(|v| f.matches(v, d[v]) && windows[v].0 <= d[v] as i64 && d[v] as i64 <= windows[v].1)
                && (!connected || g.spanning_subgraph(set.iter().copied()).unwrap().is_connected())
        })
    }

    #[test]
    fn trail_colouring_on_lifted_k4() {
        let g = complete(4, 1);
        let mut led = LiftLedger::new(&g);
        // 01, 02 -> 12
        led.lift(0, EdgeId(0), EdgeId(1)).unwrap();
        for f in all_maps(2, 4).into_iter().filter(|f| f.values().iter().sum::<usize>() % 2 == 0) {
            let h = trail_colored_factor(&led, &f).unwrap();
            assert!(some_factor_exists(&g, &f, &h.windows, false));
            // d_G - d_L = 2 at vertex 0 only, so the window there is [1, 2]
            assert_eq!(h.windows[0], (1, 2));
        }
    }

    #[test]
    fn trail_colouring_with_long_trails() {
        let g = complete(4, 2);
        let mut led = LiftLedger::new(&g);
        let a = led.lift(0, EdgeId(0), EdgeId(1)).unwrap().unwrap();
        led.lift(1, a, EdgeId(4)).unwrap();
        led.lift(2, EdgeId(7), EdgeId(11)).unwrap();
        assert!(led.current().is_connected());
        for f in all_maps(2, 4).into_iter().filter(|f| f.values().iter().sum::<usize>() % 2 == 0) {
            let h = trail_colored_factor(&led, &f).unwrap();
            h.verify(&g).unwrap();
        }
    }

    #[test]
    fn trail_colouring_rejects_odd_sum() {
        let g = complete(4, 1);
        let led = LiftLedger::new(&g);
        let f = ResidueMap::new(2, vec![1, 0, 0, 0]).unwrap();
        assert!(matches!(trail_colored_factor(&led, &f), Err(Error::Precondition(_))));
    }

    #[test]
    fn unlifted_ledger_gives_trivial_window() {
        // L = G, window [0, d]
        let g = complete(4, 1);
        let led = LiftLedger::new(&g);
        let f = ResidueMap::new(2, vec![1, 1, 1, 1]).unwrap();
        let h = trail_colored_factor(&led, &f).unwrap();
        assert_eq!(h.windows, vec![(0, 3); 4]);
    }

    #[test]
    fn mod2_bounded_on_k5() {
        let g = complete(5, 1);
        for f in all_maps(2, 5).into_iter().filter(|f| f.values().iter().sum::<usize>() % 2 == 0) {
            let h = f_factor_mod2_bounded(&g, &f, 1, &[0; 5], None).unwrap();
            assert_eq!(h.tree_level, 1);
            assert!(h.windows.iter().all(|&w| w == (0, 4)));
            let pinned = f_factor_mod2_bounded(&g, &f, 1, &[0; 5], Some(2)).unwrap();
            assert!(pinned.degrees[2] <= 2);
        }
    }

    #[test]
    fn mod2_bounded_without_trees_on_c4() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        for f in all_maps(2, 4).into_iter().filter(|f| f.values().iter().sum::<usize>() % 2 == 0) {
            let h = f_factor_mod2_bounded(&g, &f, 0, &[0; 4], None).unwrap();
            assert!(some_factor_exists(&g, &f, &h.windows, false));
        }
    }

    #[test]
    fn mod2_bounded_doubled_c4_with_slack() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let f = ResidueMap::new(2, vec![0, 1, 1, 0]).unwrap();
        let h = f_factor_mod2_bounded(&g, &f, 1, &[1, 0, 1, 0], None).unwrap();
        assert!(some_factor_exists(&g, &f, &h.windows, true));
        assert!(matches!(f_factor_mod2_bounded(&g, &f, 1, &[2, 0, 0, 0], None), Err(Error::Precondition(_))));
        assert!(matches!(f_factor_mod2_bounded(&g, &f, 2, &[0; 4], None), Err(Error::Precondition(_))));
    }

    #[test]
    fn connected_factor_and_eulerian_subgraph() {
        let mut g = MultiGraph::new(8);
        for v in 0..8 {
            g.add_edge(v, (v + 1) % 8).unwrap();
            g.add_edge(v, (v + 2) % 8).unwrap();
        }
        let e = spanning_eulerian_subgraph(&g).unwrap();
        assert!(e.degrees.iter().all(|&d| d % 2 == 0 && d >= 2));
        assert!(g.spanning_subgraph(e.edges.iter().copied()).unwrap().is_connected());
        let f = ResidueMap::new(2, vec![1, 1, 0, 0, 1, 1, 0, 0]).unwrap();
        let h = connected_f_factor(&g, &f).unwrap();
        assert_eq!(h.bound, FactorBound::ConnectedMod2);
    }

    #[test]
    fn bipartition_and_conversions() {
        let g = k33(1);
        let sides = bipartition(&g).unwrap();
        assert_eq!(sides, vec![false, false, false, true, true, true]);
        assert!(bipartition(&complete(3, 1)).is_none());
        let h: BTreeSet<EdgeId> = [EdgeId(0), EdgeId(4), EdgeId(8)].into();
        let o = factor_to_orientation(&g, &sides, &h);
        assert_eq!(orientation_to_factor(&g, &sides, &o), h);
        let f = ResidueMap::constant(3, 6, 1).unwrap();
        let p = factor_residues_to_p(&g, &sides, &f).unwrap();
        let outs = o.out_degrees(&g);
        assert!((0..6).all(|v| p.matches(v, outs[v])));
    }

    #[test]
    fn bipartite_factor_on_doubled_k33() {
        let g = k33(2);
        let sides = bipartition(&g).unwrap();
        let mut count = 0;
        for f in all_maps(3, 6) {
            if !is_compatible(&sides, &f) {
                assert!(matches!(bipartite_f_factor(&g, &f, Regime::Edge3k3, None), Err(Error::Precondition(_))));
                continue;
            }
            let h = bipartite_f_factor(&g, &f, Regime::Edge3k3, None).unwrap();
            let o = factor_to_orientation(&g, &sides, &h.edges);
            let p = factor_residues_to_p(&g, &sides, &f).unwrap();
            let outs = o.out_degrees(&g);
            assert!((0..6).all(|v| p.matches(v, outs[v])));
            count += 1;
        }
        assert_eq!(count, 243);
    }

    #[test]
    fn pinned_bipartite_factor() {
        let g = k33(2);
        let f = ResidueMap::constant(3, 6, 0).unwrap();
        let h = bipartite_f_factor(&g, &f, Regime::Edge3k3, Some(Pin { vertex: 4, target: 3 })).unwrap();
        assert_eq!(h.degrees[4], 3);
        // 6 = 0 (mod 3) but leaves the window [1, 5]
        let far = bipartite_f_factor(&g, &f, Regime::Edge3k3, Some(Pin { vertex: 4, target: 6 }));
        assert!(matches!(far, Err(Error::Infeasible(_))));
    }

    /// Oracle: some orientation has every out-degree divisible by k.
    fn star_oracle(g: &MultiGraph, k: usize) -> bool {
        let m = g.edge_count();
        (0..1u64 << m).any(|mask| {
            let mut out = vec![0; g.vertex_count()];
            for (i, e) in g.edges().iter().enumerate() {
                out[if mask >> i & 1 == 1 { e.u } else { e.v }] += 1;
            }
            out.iter().all(|d| d % k == 0)
        })
    }

    #[test]
    fn stars_on_small_graphs() {
        let k4 = complete(4, 1);
        assert!(!star_oracle(&k4, 3));
        assert_eq!(star_decomposition(&k4, 3).unwrap(), StarDecomposition::Infeasible);
        assert!(matches!(star_decomposition(&k4, 4), Err(Error::Domain(_))));
        for (g, k) in [(k33(1), 3), (k4.clone(), 2), (k4, 1), (complete(5, 1), 2)] {
            assert!(star_oracle(&g, k));
            match star_decomposition(&g, k).unwrap() {
                StarDecomposition::Stars { stars, .. } => assert!(verify_stars(&g, k, &stars)),
                StarDecomposition::Infeasible => panic!("oracle found stars"),
            }
        }
    }

    #[test]
    fn certified_stars_on_k7() {
        // simple, 6-regular, essentially 10-edge-connected; k = 3
        let g = complete(7, 1);
        match star_decomposition(&g, 3).unwrap() {
            StarDecomposition::Stars { stars, centers_certified } => {
                assert!(centers_certified && verify_stars(&g, 3, &stars));
                let mut count = [0; 7];
                stars.iter().for_each(|s| count[s.center] += 1);
                assert_eq!(count, [1; 7]);
            }
            StarDecomposition::Infeasible => panic!(),
        }
    }

    #[test]
    fn balanced_split_examples() {
        let c4 = c4();
        let s = balanced_split(&c4).unwrap();
        assert_eq!((s.g1.len(), s.g2.len()), (2, 2));
        let tri_pair = MultiGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let s = balanced_split(&tri_pair).unwrap();
        assert_eq!((s.g1.len(), s.g2.len()), (3, 3));
        let path = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        balanced_split(&path).unwrap();
        let bundle = MultiGraph::from_edges(2, &[(0, 1); 5]).unwrap();
        let s = balanced_split(&bundle).unwrap();
        assert_eq!(s.g1.len(), 3);
        assert!(balanced_split(&MultiGraph::new(3)).is_err());
    }

    #[test]
    fn compatibility_on_k4() {
        let g = complete(4, 1);
        let a = VertexSet::from_iter(4, [0, 1]);
        let sides = vec![false, false, true, true];
        for f in all_maps(3, 4) {
            let m = compatibility_factor(&g, &a, &f).unwrap();
            let dm = degrees_within(&g, &m);
            let rest = ResidueMap::new(3, (0..4).map(|v| f.get(v) as i64 - dm[v] as i64).collect()).unwrap();
            assert!(is_compatible(&sides, &rest));
            assert!(m.iter().all(|&e| {
                let e = g.edge(e).unwrap();
                sides[e.u] == sides[e.v]
            }));
        }
        let f5 = ResidueMap::constant(5, 4, 1).unwrap();
        assert!(matches!(compatibility_factor(&g, &a, &f5), Err(Error::Precondition(_))));
    }

    #[test]
    fn half_cut_on_bipartite_graph_is_whole_graph() {
        let g = k33(1);
        let (f, _) = bipartite_factor_m_ec(&g, 2, BipartiteMode::Edge).unwrap();
        assert_eq!(f.len(), 9);
        let k5 = complete(5, 1);
        let sides = half_cut_bipartition(&k5);
        let cross = k5.edges().iter().filter(|e| sides[e.u] != sides[e.v]).count();
        assert_eq!(cross, 6);
    }

    #[test]
    fn nonbipartite_strict_on_multiplied_k4() {
        let g = complete(4, 4);
        for f in all_maps(3, 4) {
            let h = nonbipartite_f_factor(&g, &f, PipelineMode::Strict).unwrap();
            assert_eq!(h.bound, FactorBound::NonBipartite);
        }
        assert!(matches!(
            nonbipartite_f_factor(&k33(4), &ResidueMap::constant(3, 6, 0).unwrap(), PipelineMode::Strict),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn nonbipartite_smoke_on_doubled_k5() {
        let g = complete(5, 2);
        for f in all_maps(3, 5) {
            let h = nonbipartite_f_factor(&g, &f, PipelineMode::Smoke).unwrap();
            assert!(h.windows.is_empty());
        }
        let odd = ResidueMap::new(4, vec![1, 0, 0, 0, 0]).unwrap();
        assert!(nonbipartite_f_factor(&g, &odd, PipelineMode::Smoke).is_err());
    }

    #[test]
    fn leftover_exactly_at_budget() {
        // two edges inside one side of 4K33: the leftover is exactly xi_3 = 2
        let mut g = k33(4);
        g.add_edge(0, 1).unwrap();
        g.add_edge(0, 1).unwrap();
        for f in all_maps(3, 6).into_iter().step_by(7) {
            nonbipartite_f_factor(&g, &f, PipelineMode::Strict).unwrap();
        }
        let low = MultiGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let f5 = ResidueMap::constant(5, 3, 0).unwrap();
        assert!(matches!(nonbipartite_f_factor(&low, &f5, PipelineMode::Smoke), Err(Error::Precondition(_))));
    }

    #[test]
    fn bipartite_factor_examples() {
        let (f, sides) = bipartite_factor_m_ec(&complete(4, 1), 1, BipartiteMode::Edge).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(sides.iter().filter(|&&s| s).count(), 2);
        let (f, _) = bipartite_factor_m_ec(&complete(4, 2), 2, BipartiteMode::Tree).unwrap();
        assert_eq!(f.len(), 8);
        assert!(matches!(bipartite_factor_m_ec(&complete(4, 1), 2, BipartiteMode::Tree), Err(Error::Precondition(_))));
    }
}
