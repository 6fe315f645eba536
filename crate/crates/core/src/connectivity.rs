//! Edge connectivity, parity cut conditions, bipartite index and essential
//! edge connectivity.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, VertexSet};

/// Largest order for which exhaustive subset enumeration is attempted.
pub const SUBSET_GUARD: usize = 20;

/// Largest order for which the lexicographically smallest minimum cut is
/// located by enumeration. Above this the Stoer-Wagner witness is returned.
const LEX_CUT_LIMIT: usize = 16;

/// A violated or minimum cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCertificate {
    pub side: VertexSet,
    pub value: usize,
}

pub(crate) fn require_guard(n: usize) -> Result<()> {
    if n > SUBSET_GUARD {
        Err(Error::SizeGuard { n, limit: SUBSET_GUARD })
    } else {
        Ok(())
    }
}

/// Symmetric multiplicity matrix.
pub(crate) fn weight_matrix(g: &MultiGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut w = vec![vec![0usize; n]; n];
    for e in g.edges() {
        w[e.u][e.v] += 1;
        w[e.v][e.u] += 1;
    }
    w
}

/// Fast cut evaluation over bitmask vertex sets (n <= 64).
#[derive(Debug, Clone)]
pub(crate) struct CutOracle {
    pairs: Vec<(u64, u64)>,
}

impl CutOracle {
    pub(crate) fn new(g: &MultiGraph) -> Self {
        assert!(g.vertex_count() <= 64);
        CutOracle { pairs: g.edges().iter().map(|e| (1u64 << e.u, 1u64 << e.v)).collect() }
    }

    pub(crate) fn cut(&self, mask: u64) -> usize {
        self.pairs.iter().filter(|&&(a, b)| (mask & a == 0) != (mask & b == 0)).count()
    }

    pub(crate) fn inner(&self, mask: u64) -> usize {
        self.pairs.iter().filter(|&&(a, b)| mask & a != 0 && mask & b != 0).count()
    }
}

/// Global edge connectivity lambda(G) by Stoer-Wagner.
/// Graphs with fewer than two vertices report `usize::MAX`.
pub fn edge_connectivity_value(g: &MultiGraph) -> usize {
    stoer_wagner(g).0
}

/// lambda(G) together with a minimum cut. For n <= 16 the witness is the
/// lexicographically smallest side (sorted member lists compared), which
/// always contains vertex 0.
pub fn edge_connectivity(g: &MultiGraph) -> (usize, Option<CutCertificate>) {
    let n = g.vertex_count();
    let (value, side) = stoer_wagner(g);
    if n < 2 {
        return (value, None);
    }
    if n <= LEX_CUT_LIMIT {
        let oracle = CutOracle::new(g);
        let mut best: Option<Vec<usize>> = None;
        let full = (1u64 << n) - 1;
        for rest in 0..(1u64 << (n - 1)) {
            let mask = 1 | rest << 1;
            if mask == full || oracle.cut(mask) != value {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if best.as_ref().is_none_or(|b| members < *b) {
                best = Some(members);
            }
        }
        let side = VertexSet::from_iter(n, best.expect("a minimum cut exists"));
        return (value, Some(CutCertificate { side, value }));
    }
    let mut side = side;
    if !side.contains(0) {
        side = side.complement();
    }
    (value, Some(CutCertificate { side, value }))
}

pub fn is_k_edge_connected(g: &MultiGraph, k: usize) -> bool {
    k == 0 || edge_connectivity_value(g) >= k
}

fn stoer_wagner(g: &MultiGraph) -> (usize, VertexSet) {
    let n = g.vertex_count();
    if n < 2 {
        return (usize::MAX, VertexSet::empty(n));
    }
    let mut w = weight_matrix(g);
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = (usize::MAX, Vec::new());
    while active.len() > 1 {
        let mut weights = vec![0usize; n];
        let mut added = vec![false; n];
        let mut order = Vec::with_capacity(active.len());
        let mut phase_cut = 0;
        for _ in 0..active.len() {
            let sel = active
                .iter()
                .copied()
                .filter(|&v| !added[v])
                .max_by(|&a, &b| weights[a].cmp(&weights[b]).then(b.cmp(&a)))
                .unwrap();
            added[sel] = true;
            order.push(sel);
            phase_cut = weights[sel];
            for &v in &active {
                if !added[v] {
                    weights[v] += w[sel][v];
                }
            }
        }
        let last = order[order.len() - 1];
        let prev = order[order.len() - 2];
        if phase_cut < best.0 {
            best = (phase_cut, groups[last].clone());
        }
        // merge last into prev
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &v in &active {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        active.retain(|&v| v != last);
    }
    (best.0, VertexSet::from_iter(n, best.1))
}

/// Maximum flow between `s` and `t` on unit multiplicities (Edmonds-Karp).
pub(crate) fn max_flow(w: &[Vec<usize>], s: usize, t: usize) -> usize {
    let n = w.len();
    let mut cap: Vec<Vec<i64>> = w.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    let mut flow = 0;
    loop {
        let mut pred = vec![usize::MAX; n];
        pred[s] = s;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            if x == t {
                break;
            }
            for y in 0..n {
                if pred[y] == usize::MAX && cap[x][y] > 0 {
                    pred[y] = x;
                    q.push_back(y);
                }
            }
        }
        if pred[t] == usize::MAX {
            return flow;
        }
        let mut y = t;
        while y != s {
            let x = pred[y];
            cap[x][y] -= 1;
            cap[y][x] += 1;
            y = x;
        }
        flow += 1;
    }
}

/// min d(A) over nonempty A strictly inside V - u (u itself unconstrained).
/// Returns `usize::MAX` when V - u has fewer than two vertices.
pub fn min_cut_avoiding(g: &MultiGraph, u: usize) -> usize {
    let n = g.vertex_count();
    let others: Vec<usize> = (0..n).filter(|&v| v != u).collect();
    if others.len() < 2 {
        return usize::MAX;
    }
    let w = weight_matrix(g);
    let x0 = others[0];
    others[1..].iter().map(|&y| max_flow(&w, x0, y)).min().unwrap()
}

/// Cut conditions preserved by lifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutMode {
    /// d(A) >= 2m' + 1 when d(A) is odd, d(A) >= 2m when d(A) is even.
    CutParity { m: usize, m_prime: usize },
    /// d(A) >= 2n when |A| is even, d(A) >= 2n' when |A| is odd.
    SetParity { n: usize, n_prime: usize },
}

impl CutMode {
    pub fn holds(&self, cut: usize, size: usize) -> bool {
        match *self {
            CutMode::CutParity { m, m_prime } => {
                if cut % 2 == 1 {
                    cut > 2 * m_prime
                } else {
                    cut >= 2 * m
                }
            }
            CutMode::SetParity { n, n_prime } => {
                if size.is_multiple_of(2) {
                    cut >= 2 * n
                } else {
                    cut >= 2 * n_prime
                }
            }
        }
    }
}

/// Outcome of an exhaustive cut check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutCheck {
    Holds,
    Violated(CutCertificate),
}

impl CutCheck {
    pub fn holds(&self) -> bool {
        matches!(self, CutCheck::Holds)
    }
}

/// Check `mode` on every nonempty proper A. With `excluded = Some(u)` the
/// sets range over nonempty proper subsets of V - u; otherwise over all
/// nonempty proper subsets (each cut visited once, via the side avoiding the
/// last vertex). Refuses n > 20.
pub fn is_parity_edge_connected(g: &MultiGraph, mode: CutMode, excluded: Option<usize>) -> Result<CutCheck> {
    let n = g.vertex_count();
    require_guard(n)?;
    let oracle = CutOracle::new(g);
    let found = match excluded {
        Some(u) => {
            if u >= n {
                return Err(Error::domain(format!("vertex {u} out of range")));
            }
            let ground: u64 = ((1u64 << n) - 1) & !(1u64 << u);
            first_subset(ground, true, |a| {
                let cut = oracle.cut(a);
                !mode.holds(cut, a.count_ones() as usize)
            })
        }
        None => {
            if n < 2 {
                return Ok(CutCheck::Holds);
            }
            let ground: u64 = (1u64 << (n - 1)) - 1;
            // A ranges over nonempty subsets avoiding the pivot n-1; A^c has the
            // same cut, so both set sizes are tested.
            first_subset(ground, false, |a| {
                let cut = oracle.cut(a);
                let sz = a.count_ones() as usize;
                !mode.holds(cut, sz) || !mode.holds(cut, n - sz)
            })
        }
    };
    Ok(match found {
        None => CutCheck::Holds,
        Some(a) => {
            let side = VertexSet::from_mask(n, a);
            let value = oracle.cut(a);
            CutCheck::Violated(CutCertificate { side, value })
        }
    })
}

/// First nonempty submask of `ground` (in increasing numeric order) for which
/// `bad` holds; `proper` excludes `ground` itself.
pub(crate) fn first_subset(ground: u64, proper: bool, mut bad: impl FnMut(u64) -> bool) -> Option<u64> {
    // enumerate submasks in increasing order
    let mut sub: u64 = 0;
    loop {
        sub = (sub.wrapping_sub(ground)) & ground;
        if sub == 0 {
            return None;
        }
        if proper && sub == ground {
            return None;
        }
        if bad(sub) {
            return Some(sub);
        }
    }
}

/// Minimum number of edges whose removal leaves a bipartite graph, with an
/// optimal 2-colouring (vertex 0 on side false). Exact branch and bound.
pub fn bipartite_index(g: &MultiGraph) -> Result<(usize, Vec<bool>)> {
    let n = g.vertex_count();
    require_guard(n)?;
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let w = weight_matrix(g);
    let mut best = (usize::MAX, vec![false; n]);
    let mut side = vec![false; n];
    fn rec(v: usize, cost: usize, w: &[Vec<usize>], side: &mut Vec<bool>, best: &mut (usize, Vec<bool>)) {
        let n = w.len();
        if cost >= best.0 {
            return;
        }
        if v == n {
            *best = (cost, side.clone());
            return;
        }
        for choice in [false, true] {
            side[v] = choice;
            let add: usize = (0..v).filter(|&x| side[x] == choice).map(|x| w[x][v]).sum();
            rec(v + 1, cost + add, w, side, best);
        }
    }
    side[0] = false;
    rec(1, 0, &w, &mut side, &mut best);
    Ok(best)
}

/// Essential edge connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EssentialConnectivity {
    /// Size of the smallest cut whose edges do not all share a vertex.
    Finite(usize),
    /// Every cut is trivial; carries |E| as a finite stand-in for infinity.
    Unbounded { edge_bound: usize },
}

impl EssentialConnectivity {
    /// Is G essentially `lambda`-edge-connected?
    pub fn at_least(&self, lambda: usize) -> bool {
        match *self {
            EssentialConnectivity::Finite(v) => v >= lambda,
            EssentialConnectivity::Unbounded { .. } => true,
        }
    }
}

/// Largest lambda such that every cut with fewer than lambda edges consists
/// of edges sharing a common vertex. Refuses n > 20.
pub fn essential_edge_connectivity(g: &MultiGraph) -> Result<EssentialConnectivity> {
    let n = g.vertex_count();
    require_guard(n)?;
    if n < 2 {
        return Ok(EssentialConnectivity::Unbounded { edge_bound: g.edge_count() });
    }
    let ends: Vec<(u64, u64)> = g.edges().iter().map(|e| (1u64 << e.u, 1u64 << e.v)).collect();
    let ground = (1u64 << (n - 1)) - 1;
    let mut best = usize::MAX;
    let mut sub: u64 = 0;
    loop {
        sub = sub.wrapping_sub(ground) & ground;
        if sub == 0 {
            break;
        }
        let mut common = u64::MAX;
        let mut size = 0;
        for &(a, b) in &ends {
            if (sub & a == 0) != (sub & b == 0) {
                common &= a | b;
                size += 1;
            }
        }
        if size > 0 && common == 0 && size < best {
            best = size;
        }
    }
    Ok(if best == usize::MAX {
        EssentialConnectivity::Unbounded { edge_bound: g.edge_count() }
    } else {
        EssentialConnectivity::Finite(best)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> MultiGraph {
        let mut g = MultiGraph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j).unwrap();
            }
        }
        g
    }

    fn brute_lambda(g: &MultiGraph) -> usize {
        let n = g.vertex_count();
        let o = CutOracle::new(g);
        (1..(1u64 << n) - 1).map(|m| o.cut(m)).min().unwrap()
    }

    #[test]
    fn k5_is_4_connected() {
        let (v, c) = edge_connectivity(&complete(5));
        assert_eq!(v, 4);
        assert_eq!(c.unwrap().side.to_vec(), vec![0]);
    }

    #[test]
    fn path_has_bridge() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (v, c) = edge_connectivity(&g);
        assert_eq!(v, 1);
        assert_eq!(c.unwrap().side.to_vec(), vec![0]);
    }

    #[test]
    fn disconnected_is_zero() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(edge_connectivity_value(&g), 0);
    }

    #[test]
    fn stoer_wagner_matches_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..8);
            let m = rng.gen_range(0..16);
            let mut g = MultiGraph::new(n);
            for _ in 0..m {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    g.add_edge(u, v).unwrap();
                }
            }
            assert_eq!(edge_connectivity_value(&g), brute_lambda(&g));
            let u = rng.gen_range(0..n);
            let o = CutOracle::new(&g);
            let ground = ((1u64 << n) - 1) & !(1 << u);
            let mut brute = usize::MAX;
            let mut s = 0u64;
            loop {
                s = s.wrapping_sub(ground) & ground;
                if s == 0 || s == ground {
                    break;
                }
                brute = brute.min(o.cut(s));
            }
            assert_eq!(min_cut_avoiding(&g, u), brute);
        }
    }

    #[test]
    fn doubled_c4_parity_check() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 3), (2, 3), (3, 0), (3, 0)]).unwrap();
        let ok = is_parity_edge_connected(&g, CutMode::CutParity { m: 2, m_prime: 1 }, None).unwrap();
        assert!(ok.holds());
        let bad = is_parity_edge_connected(&g, CutMode::CutParity { m: 3, m_prime: 3 }, None).unwrap();
        assert!(matches!(bad, CutCheck::Violated(c) if c.value == 4));
    }

    #[test]
    fn excluded_vertex_ignores_its_singleton() {
        // star centre 0 with leaves 1..3: only cuts inside {1,2,3}
        let g = MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = is_parity_edge_connected(&g, CutMode::CutParity { m: 0, m_prime: 0 }, Some(0)).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn size_guard() {
        let g = MultiGraph::new(21);
        assert!(matches!(
            is_parity_edge_connected(&g, CutMode::CutParity { m: 1, m_prime: 1 }, None),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn bipartite_indices() {
        assert_eq!(bipartite_index(&complete(3)).unwrap().0, 1);
        let k33 = MultiGraph::from_edges(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)])
            .unwrap();
        assert_eq!(bipartite_index(&k33).unwrap().0, 0);
        assert_eq!(bipartite_index(&complete(4)).unwrap().0, 2);
    }

    #[test]
    fn essential_connectivity_examples() {
        let g = MultiGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4)]).unwrap();
        assert_eq!(essential_edge_connectivity(&g).unwrap(), EssentialConnectivity::Finite(2));
        let star = MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(essential_edge_connectivity(&star).unwrap(), EssentialConnectivity::Unbounded { edge_bound: 3 });
        // the 2+2 split of K4 is a 4-edge cut with no common vertex
        assert_eq!(essential_edge_connectivity(&complete(4)).unwrap(), EssentialConnectivity::Finite(4));
    }
}
