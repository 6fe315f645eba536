//! The half-integral set function alpha(A) = p(A) - d(A)/2 taken modulo k
//! in the window [-k/2, k/2].

use serde::{Deserialize, Serialize};

use crate::connectivity::CutOracle;
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, ResidueMap, VertexSet};
use crate::lifting::{self, LiftStep};

/// Exhaustive pair checks are quadratic in 2^n; keep them small.
pub const ALPHA_CHECK_LIMIT: usize = 10;

/// alpha(A) stored doubled. Holds two values exactly when |alpha| = k/2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaValue {
    /// Doubled values, ascending (negative first when two-valued).
    pub twice: Vec<i64>,
}

impl AlphaValue {
    /// Doubled absolute value; well defined even when two-valued.
    pub fn abs_twice(&self) -> i64 {
        self.twice[0].abs()
    }

    pub fn is_zero(&self) -> bool {
        self.twice == [0]
    }

    /// Representative used for congruence tests.
    pub fn rep(&self) -> i64 {
        self.twice[0]
    }
}

/// Doubled alpha from the doubled residue 2p(A) - d(A).
pub fn alpha_from_raw(raw_twice: i64, k: usize) -> AlphaValue {
    let k = k as i64;
    let r = raw_twice.rem_euclid(2 * k);
    if r == k {
        AlphaValue { twice: vec![-k, k] }
    } else if r < k {
        AlphaValue { twice: vec![r] }
    } else {
        AlphaValue { twice: vec![r - 2 * k] }
    }
}

/// p(A) = sum of p over A minus e(A) (as an integer, not reduced).
pub fn p_of_set(g: &MultiGraph, p: &ResidueMap, a: &VertexSet) -> i64 {
    a.iter().map(|v| p.get(v) as i64).sum::<i64>() - g.inner_edges(a) as i64
}

pub fn alpha_of_set(g: &MultiGraph, p: &ResidueMap, a: &VertexSet) -> Result<AlphaValue> {
    if p.len() != g.vertex_count() || a.universe() != g.vertex_count() {
        return Err(Error::domain("size mismatch between graph, residues and set"));
    }
    let raw = 2 * p_of_set(g, p, a) - g.boundary_degree(a) as i64;
    Ok(alpha_from_raw(raw, p.modulus()))
}

pub fn alpha_of_vertex(g: &MultiGraph, p: &ResidueMap, v: usize) -> Result<AlphaValue> {
    alpha_of_set(g, p, &VertexSet::from_iter(g.vertex_count(), [v]))
}

/// Doubled |alpha| of every subset mask (n <= 20).
pub(crate) fn alpha_table(g: &MultiGraph, p: &ResidueMap) -> Vec<AlphaValue> {
    let n = g.vertex_count();
    let oracle = CutOracle::new(g);
    (0..(1u64 << n))
        .map(|mask| {
            let psum: i64 = (0..n).filter(|&v| mask >> v & 1 == 1).map(|v| p.get(v) as i64).sum();
            let raw = 2 * (psum - oracle.inner(mask) as i64) - oracle.cut(mask) as i64;
            alpha_from_raw(raw, p.modulus())
        })
        .collect()
}

/// A failed instance of one of the six listed properties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaViolation {
    pub property: u8,
    pub sets: Vec<VertexSet>,
}

/// Check all six properties exhaustively (n <= 10).
pub fn check_alpha_properties(g: &MultiGraph, p: &ResidueMap) -> Result<Vec<AlphaViolation>> {
    let n = g.vertex_count();
    if n > ALPHA_CHECK_LIMIT {
        return Err(Error::SizeGuard { n, limit: ALPHA_CHECK_LIMIT });
    }
    p.require_compatible(g)?;
    let k = p.modulus() as i64;
    let table = alpha_table(g, p);
    let oracle = CutOracle::new(g);
    let full = (1u64 << n) - 1;
    let set = |m: u64| VertexSet::from_mask(n, m);
    let mut out = Vec::new();
    let cong = |a: i64, b: i64| (a - b).rem_euclid(2 * k) == 0;
    for a in 0..=full {
        let aa = &table[a as usize];
        for b in 0..=full {
            let bb = &table[b as usize];
            let plus = cong(aa.rep(), bb.rep()) || cong(aa.rep(), -bb.rep());
            if plus && aa.abs_twice() != bb.abs_twice() {
                out.push(AlphaViolation { property: 1, sets: vec![set(a), set(b)] });
            }
            if a & b == 0 && !cong(table[(a | b) as usize].rep(), aa.rep() + bb.rep()) {
                out.push(AlphaViolation { property: 2, sets: vec![set(a), set(b)] });
            }
        }
        if aa.abs_twice() != table[(full & !a) as usize].abs_twice() {
            out.push(AlphaViolation { property: 3, sets: vec![set(a)] });
        }
        for v0 in 0..n {
            if a >> v0 & 1 == 0
                && table[1usize << v0].is_zero()
                && aa.abs_twice() != table[(a | 1 << v0) as usize].abs_twice()
            {
                out.push(AlphaViolation { property: 4, sets: vec![set(a), set(1 << v0)] });
            }
        }
        let d = oracle.cut(a) as i64;
        if d >= 3 * k - 3 && d < 2 * k - 2 + aa.abs_twice() {
            out.push(AlphaViolation { property: 5, sets: vec![set(a)] });
        }
        if (d - aa.abs_twice()).rem_euclid(2) != 0 {
            out.push(AlphaViolation { property: 6, sets: vec![set(a)] });
        }
    }
    Ok(out)
}

/// Residues after a lift: p - chi_u, and additionally - chi_x when the two
/// lifted edges were parallel.
pub fn lifted_residues(p: &ResidueMap, step: &LiftStep) -> ResidueMap {
    let mut q = p.clone();
    q.shift(step.pivot, -1);
    if step.is_parallel() {
        q.shift(step.x, -1);
    }
    q
}

/// Lift `first`,`second` at `pivot` and report every set whose |alpha|
/// changed under the adjusted residues.
pub fn check_lift_invariance(
    g: &MultiGraph,
    p: &ResidueMap,
    pivot: usize,
    first: crate::graph::EdgeId,
    second: crate::graph::EdgeId,
) -> Result<Vec<VertexSet>> {
    let n = g.vertex_count();
    crate::connectivity::require_guard(n)?;
    let mut led = lifting::LiftLedger::new(g);
    led.lift(pivot, first, second)?;
    let step = led.steps()[0];
    let h = led.current();
    let q = lifted_residues(p, &step);
    let before = alpha_table(g, p);
    let after = alpha_table(h, &q);
    Ok((0..(1u64 << n))
        .filter(|&m| before[m as usize].abs_twice() != after[m as usize].abs_twice())
        .map(|m| VertexSet::from_mask(n, m))
        .collect())
}
