//! Loopless multigraphs with stable edge identifiers, vertex sets,
//! orientations, contraction and Eulerian tours.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable edge identifier. Never reused within one graph's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// The endpoint opposite to `w`. `w` must be an endpoint.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            debug_assert_eq!(self.v, w);
            self.u
        }
    }

    pub fn touches(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }
}

/// Undirected loopless multigraph on vertices `0..n`.
///
/// Edges are kept sorted by id; ids grow monotonically so removal never
/// disturbs the ids of surviving edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<Edge>,
    next_id: u32,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { n, edges: Vec::new(), next_id: 0 }
    }

    pub fn from_edges(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut g = MultiGraph::new(n);
        for &(u, v) in pairs {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    /// First id that `add_edge` would hand out.
    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_id)
    }

    /// Raise the id counter so that fresh ids never collide with `floor`.
    pub fn reserve_ids_from(&mut self, floor: EdgeId) {
        self.next_id = self.next_id.max(floor.0);
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<EdgeId> {
        let id = EdgeId(self.next_id);
        self.insert_edge(id, u, v)?;
        Ok(id)
    }

    /// Insert an edge with a caller-chosen id (used when rebuilding a graph
    /// that must share ids with another one).
    pub fn insert_edge(&mut self, id: EdgeId, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::domain(format!("edge ({u},{v}) out of range for n = {}", self.n)));
        }
        if u == v {
            return Err(Error::domain(format!("loop at vertex {u}")));
        }
        match self.edges.binary_search_by_key(&id, |e| e.id) {
            Ok(_) => return Err(Error::domain(format!("duplicate edge id {id}"))),
            Err(pos) => self.edges.insert(pos, Edge { id, u, v }),
        }
        self.next_id = self.next_id.max(id.0 + 1);
        Ok(())
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    fn position(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.position(id).map(|i| &self.edges[i])
    }

    pub fn has_edge(&self, id: EdgeId) -> bool {
        self.position(id).is_some()
    }

    pub fn expect_edge(&self, id: EdgeId) -> Result<Edge> {
        self.edge(id).copied().ok_or_else(|| Error::domain(format!("unknown edge {id}")))
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<Edge> {
        let pos = self.position(id).ok_or_else(|| Error::domain(format!("unknown edge {id}")))?;
        Ok(self.edges.remove(pos))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    /// Edges incident with `v`, ascending by id.
    pub fn incident(&self, v: usize) -> Vec<Edge> {
        self.edges.iter().filter(|e| e.touches(v)).copied().collect()
    }

    /// Distinct neighbours of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident(v).iter().map(|e| e.other(v)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.edges.iter().filter(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u)).count()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().all(|e| seen.insert((e.u.min(e.v), e.u.max(e.v))))
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = Dsu::new(self.n);
        for e in &self.edges {
            dsu.union(e.u, e.v);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n {
            groups.entry(dsu.find(v)).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Number of components of the graph with vertex `u` deleted.
    pub fn components_without(&self, u: usize) -> usize {
        let mut dsu = Dsu::new(self.n);
        for e in &self.edges {
            if !e.touches(u) {
                dsu.union(e.u, e.v);
            }
        }
        let mut roots: Vec<usize> = (0..self.n).filter(|&v| v != u).map(|v| dsu.find(v)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Spanning subgraph keeping exactly the listed edges (ids preserved).
    pub fn spanning_subgraph<I: IntoIterator<Item = EdgeId>>(&self, keep: I) -> Result<MultiGraph> {
        let mut ids: Vec<EdgeId> = keep.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        let mut h = MultiGraph::new(self.n);
        for id in ids {
            let e = self.expect_edge(id)?;
            h.insert_edge(id, e.u, e.v)?;
        }
        h.reserve_ids_from(self.next_edge_id());
        Ok(h)
    }

    /// Spanning subgraph without the listed edges (ids preserved).
    pub fn without_edges(&self, drop: &[EdgeId]) -> MultiGraph {
        let mut h = self.clone();
        h.edges.retain(|e| !drop.contains(&e.id));
        h
    }

    /// Subgraph induced by `vertices`, relabelled to `0..k` in ascending order.
    /// Returns the graph and the old vertex for each new index.
    pub fn induced(&self, vertices: &VertexSet) -> (MultiGraph, Vec<usize>) {
        let old: Vec<usize> = vertices.iter().collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            new_of[v] = i;
        }
        let mut h = MultiGraph::new(old.len());
        for e in &self.edges {
            if new_of[e.u] != usize::MAX && new_of[e.v] != usize::MAX {
                h.insert_edge(e.id, new_of[e.u], new_of[e.v]).expect("relabelled edge is valid");
            }
        }
        h.reserve_ids_from(self.next_edge_id());
        (h, old)
    }

    /// Delete vertex `u` together with its edges, shifting higher indices down.
    pub fn remove_vertex(&self, u: usize) -> MultiGraph {
        let keep = VertexSet::from_iter(self.n, (0..self.n).filter(|&v| v != u));
        self.induced(&keep).0
    }

    /// Cut size d(A).
    pub fn boundary_degree(&self, a: &VertexSet) -> usize {
        self.edges.iter().filter(|e| a.contains(e.u) != a.contains(e.v)).count()
    }

    /// Number of edges with both ends in A.
    pub fn inner_edges(&self, a: &VertexSet) -> usize {
        self.edges.iter().filter(|e| a.contains(e.u) && a.contains(e.v)).count()
    }

    /// Number of edges with one end in A and the other in B.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> usize {
        self.edges
            .iter()
            .filter(|e| (a.contains(e.u) && b.contains(e.v)) || (a.contains(e.v) && b.contains(e.u)))
            .count()
    }

    /// Edge ids of the cut [A, A^c], ascending.
    pub fn cut_edges(&self, a: &VertexSet) -> Vec<EdgeId> {
        self.edges.iter().filter(|e| a.contains(e.u) != a.contains(e.v)).map(|e| e.id).collect()
    }

    /// G/A. Edges inside A vanish, every other edge keeps its id.
    pub fn contract(&self, a: &VertexSet) -> Result<Contraction> {
        if a.is_empty() {
            return Err(Error::domain("cannot contract an empty set"));
        }
        let rep = a.iter().next().unwrap();
        let mut map = vec![0; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if a.contains(v) && v != rep {
                continue;
            }
            map[v] = next;
            next += 1;
        }
        let merged = map[rep];
        for v in a.iter() {
            map[v] = merged;
        }
        let mut g = MultiGraph::new(next);
        for e in &self.edges {
            if a.contains(e.u) && a.contains(e.v) {
                continue;
            }
            g.insert_edge(e.id, map[e.u], map[e.v])?;
        }
        g.reserve_ids_from(self.next_edge_id());
        Ok(Contraction { graph: g, map, merged })
    }

    /// Closed Eulerian tour over every edge. Requires all degrees even and the
    /// edge set connected. At each vertex the unused edge of smallest id is
    /// taken first. `start` forces the first edge (traversed away from its
    /// `from` vertex).
    pub fn euler_tour(&self, start_vertex: Option<usize>, start: Option<(EdgeId, usize)>) -> Result<Vec<Step>> {
        if self.edges.is_empty() {
            return Ok(Vec::new());
        }
        if let Some(v) = self.degrees().iter().position(|d| d % 2 == 1) {
            return Err(Error::pre(format!("vertex {v} has odd degree")));
        }
        let mut nontrivial = self.components().into_iter().filter(|c| c.iter().any(|&v| self.degree(v) > 0));
        nontrivial.next();
        if nontrivial.next().is_some() {
            return Err(Error::pre("edge set is not connected"));
        }
        let s = match (start, start_vertex) {
            (Some((_, from)), _) => from,
            (None, Some(v)) => v,
            (None, None) => self.edges[0].u,
        };
        if self.degree(s) == 0 {
            return Err(Error::domain(format!("start vertex {s} is isolated")));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push(i);
            adj[e.v].push(i);
        }
        let circuit = hierholzer(self.n, &adj, &self.edges, s, |i, v| self.edges[i].other(v));
        let mut tour: Vec<Step> = circuit;
        if let Some((eid, from)) = start {
            let pos = tour
                .iter()
                .position(|st| st.edge == eid)
                .ok_or_else(|| Error::domain(format!("unknown edge {eid}")))?;
            if tour[pos].from != from {
                tour.reverse();
                for st in tour.iter_mut() {
                    std::mem::swap(&mut st.from, &mut st.to);
                }
            }
            let pos = tour.iter().position(|st| st.edge == eid).unwrap();
            tour.rotate_left(pos);
        }
        Ok(tour)
    }

    /// Closed directed Eulerian tour: every vertex must have in = out and the
    /// arcs must be connected. `start` forces the first arc.
    pub fn directed_euler_tour(&self, orient: &Orientation, start: Option<EdgeId>) -> Result<Vec<Step>> {
        if self.edges.is_empty() {
            return Ok(Vec::new());
        }
        orient.require_total(self)?;
        let outd = orient.out_degrees(self);
        let deg = self.degrees();
        for v in 0..self.n {
            if 2 * outd[v] != deg[v] {
                return Err(Error::pre(format!("vertex {v} is not balanced")));
            }
        }
        let mut nontrivial = self.components().into_iter().filter(|c| c.iter().any(|&v| deg[v] > 0));
        nontrivial.next();
        if nontrivial.next().is_some() {
            return Err(Error::pre("arc set is not connected"));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            let (t, _) = orient.arc(e).unwrap();
            adj[t].push(i);
        }
        let s = match start {
            Some(id) => orient.arc(&self.expect_edge(id)?).unwrap().0,
            None => orient.arc(&self.edges[0]).unwrap().0,
        };
        let mut tour = hierholzer(self.n, &adj, &self.edges, s, |i, _| orient.arc(&self.edges[i]).unwrap().1);
        if let Some(id) = start {
            let pos = tour.iter().position(|st| st.edge == id).unwrap();
            tour.rotate_left(pos);
        }
        Ok(tour)
    }
}

/// One traversal step of a tour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub edge: EdgeId,
    pub from: usize,
    pub to: usize,
}

fn hierholzer(
    n: usize,
    adj: &[Vec<usize>],
    edges: &[Edge],
    s: usize,
    head: impl Fn(usize, usize) -> usize,
) -> Vec<Step> {
    let mut ptr = vec![0usize; n];
    let mut used = vec![false; edges.len()];
    let mut stack: Vec<(usize, Option<(usize, usize)>)> = vec![(s, None)];
    let mut circuit = Vec::with_capacity(edges.len());
    while let Some(&(v, _)) = stack.last() {
        while ptr[v] < adj[v].len() && used[adj[v][ptr[v]]] {
            ptr[v] += 1;
        }
        if ptr[v] < adj[v].len() {
            let i = adj[v][ptr[v]];
            used[i] = true;
            stack.push((head(i, v), Some((i, v))));
        } else {
            let (w, arrived) = stack.pop().unwrap();
            if let Some((i, from)) = arrived {
                circuit.push(Step { edge: edges[i].id, from, to: w });
            }
        }
    }
    circuit.reverse();
    circuit
}

/// Result of contracting a vertex set.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: MultiGraph,
    /// New index of every old vertex.
    pub map: Vec<usize>,
    /// New index of the merged vertex.
    pub merged: usize,
}

/// Subset of `0..n`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet {
    n: usize,
    members: Vec<bool>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { n, members: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        VertexSet { n, members: vec![true; n] }
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(n: usize, it: I) -> Self {
        let mut s = VertexSet::empty(n);
        for v in it {
            s.insert(v);
        }
        s
    }

    /// Members are the set bits of `mask`. Requires n <= 64.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        VertexSet::from_iter(n, (0..n).filter(|&v| mask >> v & 1 == 1))
    }

    pub fn mask(&self) -> u64 {
        self.iter().fold(0u64, |m, v| m | 1 << v)
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} outside universe {}", self.n);
        self.members[v] = true;
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.n {
            self.members[v] = false;
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.members[v]
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.members[v])
    }

    pub fn complement(&self) -> VertexSet {
        VertexSet { n: self.n, members: self.members.iter().map(|b| !b).collect() }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Direction of an edge relative to its stored endpoint order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    /// u -> v
    Forward,
    /// v -> u
    Backward,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        }
    }
}

/// Partial or total orientation keyed by edge id. Unlisted edges are undirected.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    dirs: BTreeMap<EdgeId, Dir>,
}

impl Orientation {
    pub fn new() -> Self {
        Orientation::default()
    }

    /// Every edge oriented u -> v.
    pub fn all_forward(g: &MultiGraph) -> Self {
        Orientation { dirs: g.edges().iter().map(|e| (e.id, Dir::Forward)).collect() }
    }

    pub fn get(&self, id: EdgeId) -> Option<Dir> {
        self.dirs.get(&id).copied()
    }

    pub fn set(&mut self, id: EdgeId, d: Dir) {
        self.dirs.insert(id, d);
    }

    pub fn unset(&mut self, id: EdgeId) {
        self.dirs.remove(&id);
    }

    /// Orient `e` so that it leaves `tail`.
    pub fn set_from(&mut self, e: &Edge, tail: usize) {
        let d = if e.u == tail { Dir::Forward } else { Dir::Backward };
        debug_assert!(e.touches(tail));
        self.dirs.insert(e.id, d);
    }

    /// (tail, head) of an oriented edge.
    pub fn arc(&self, e: &Edge) -> Option<(usize, usize)> {
        self.get(e.id).map(|d| match d {
            Dir::Forward => (e.u, e.v),
            Dir::Backward => (e.v, e.u),
        })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, Dir)> + '_ {
        self.dirs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_total(&self, g: &MultiGraph) -> bool {
        g.edges().iter().all(|e| self.dirs.contains_key(&e.id))
    }

    pub fn require_total(&self, g: &MultiGraph) -> Result<()> {
        match g.edges().iter().find(|e| !self.dirs.contains_key(&e.id)) {
            Some(e) => Err(Error::domain(format!("edge {} is not oriented", e.id))),
            None => Ok(()),
        }
    }

    /// Out-degrees counted over oriented edges of `g`.
    pub fn out_degrees(&self, g: &MultiGraph) -> Vec<usize> {
        let mut d = vec![0; g.vertex_count()];
        for e in g.edges() {
            if let Some((t, _)) = self.arc(e) {
                d[t] += 1;
            }
        }
        d
    }

    pub fn in_degrees(&self, g: &MultiGraph) -> Vec<usize> {
        let mut d = vec![0; g.vertex_count()];
        for e in g.edges() {
            if let Some((_, h)) = self.arc(e) {
                d[h] += 1;
            }
        }
        d
    }

    pub fn out_degree(&self, g: &MultiGraph, v: usize) -> usize {
        g.edges().iter().filter(|e| self.arc(e).is_some_and(|(t, _)| t == v)).count()
    }

    pub fn reversed(&self) -> Orientation {
        Orientation { dirs: self.dirs.iter().map(|(&k, &d)| (k, d.flip())).collect() }
    }

    /// Keep only the entries for edges present in `g`.
    pub fn restricted_to(&self, g: &MultiGraph) -> Orientation {
        Orientation { dirs: g.edges().iter().filter_map(|e| self.get(e.id).map(|d| (e.id, d))).collect() }
    }

    /// Copy entries from `other`, overwriting.
    pub fn extend_from(&mut self, other: &Orientation) {
        for (k, d) in other.iter() {
            self.dirs.insert(k, d);
        }
    }
}

/// Map V -> Z_k, stored as canonical representatives in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueMap {
    modulus: usize,
    values: Vec<usize>,
}

impl ResidueMap {
    /// Values are reduced modulo `modulus` (which must be positive).
    pub fn new(modulus: usize, values: Vec<i64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::domain("modulus must be positive"));
        }
        let k = modulus as i64;
        Ok(ResidueMap { modulus, values: values.into_iter().map(|x| x.rem_euclid(k) as usize).collect() })
    }

    pub fn constant(modulus: usize, n: usize, value: i64) -> Result<Self> {
        ResidueMap::new(modulus, vec![value; n])
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> usize {
        self.values[v]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn set(&mut self, v: usize, value: i64) {
        self.values[v] = value.rem_euclid(self.modulus as i64) as usize;
    }

    /// Add `delta` at `v`, modulo k.
    pub fn shift(&mut self, v: usize, delta: i64) {
        let x = self.values[v] as i64 + delta;
        self.set(v, x);
    }

    /// Is `x` congruent to p(v)?
    pub fn matches(&self, v: usize, x: usize) -> bool {
        x % self.modulus == self.values[v]
    }

    /// The compatibility condition |E| = sum p (mod k).
    pub fn compatible_with(&self, g: &MultiGraph) -> bool {
        self.values.len() == g.vertex_count()
            && g.edge_count() % self.modulus == self.values.iter().sum::<usize>() % self.modulus
    }

    pub fn require_compatible(&self, g: &MultiGraph) -> Result<()> {
        if self.values.len() != g.vertex_count() {
            return Err(Error::domain("residue map has wrong length"));
        }
        if !self.compatible_with(g) {
            return Err(Error::domain(format!(
                "|E| = {} is not congruent to sum p modulo {}",
                g.edge_count(),
                self.modulus
            )));
        }
        Ok(())
    }
}

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
