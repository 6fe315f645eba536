//! Seeded graph generators. Every emitted graph is re-checked against the
//! ensemble's declared edge-connectivity.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connectivity;
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Rejection-sampling cap per emitted graph.
pub const MAX_ATTEMPTS: usize = 10_000;

/// Independent stream `index` of the generator seeded by `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenKind {
    /// Union of `cycles` uniformly random Hamiltonian cycles.
    HamiltonianUnion {
        n: usize,
        cycles: usize,
    },
    Circulant {
        n: usize,
        connections: Vec<usize>,
    },
    /// Cartesian product of a cycle and a complete graph.
    Cartesian {
        cycle: usize,
        complete: usize,
    },
    Complete {
        n: usize,
    },
    /// Every edge of `base` repeated `times` times.
    Scaled {
        base: Box<GenKind>,
        times: usize,
    },
    /// Uniform loopless multigraph with n and m drawn from the ranges.
    Random {
        n: (usize, usize),
        m: (usize, usize),
    },
}

impl GenKind {
    pub fn is_random(&self) -> bool {
        match self {
            GenKind::HamiltonianUnion { .. } | GenKind::Random { .. } => true,
            GenKind::Scaled { base, .. } => base.is_random(),
            _ => false,
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<MultiGraph> {
        match self {
            GenKind::HamiltonianUnion { n, cycles } => hamiltonian_union(*n, *cycles, rng),
            GenKind::Circulant { n, connections } => circulant(*n, connections),
            GenKind::Cartesian { cycle, complete } => cartesian_cycle_complete(*cycle, *complete),
            GenKind::Complete { n } => Ok(complete_graph(*n, 1)),
            GenKind::Scaled { base, times } => Ok(scaled(&base.sample(rng)?, *times)),
            GenKind::Random { n, m } => {
                if n.0 < 2 || n.0 > n.1 || m.0 > m.1 {
                    return Err(Error::domain("bad ranges for the random generator"));
                }
                let nv = rng.gen_range(n.0..=n.1);
                let me = rng.gen_range(m.0..=m.1);
                random_multigraph(nv, me, rng)
            }
        }
    }
}

/// A reproducible batch of graphs, each at least `lambda`-edge-connected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ensemble {
    pub kind: GenKind,
    pub seed: u64,
    pub count: usize,
    pub lambda: usize,
}

impl Ensemble {
    pub fn generate(&self) -> Result<Vec<MultiGraph>> {
        (0..self.count).map(|i| self.instance(i)).collect()
    }

    /// Graph number `index`, independent of the others.
    pub fn instance(&self, index: usize) -> Result<MultiGraph> {
        let mut rng = rng_for(self.seed, index as u64);
        sample_until(&mut rng, |r| self.kind.sample(r), |g| meets_lambda(g, self.lambda), self.kind.is_random())
    }
}

fn meets_lambda(g: &MultiGraph, lambda: usize) -> bool {
    lambda == 0 || g.vertex_count() < 2 || connectivity::edge_connectivity_value(g) >= lambda
}

/// Draw until `accept` holds; deterministic generators get one try.
pub fn sample_until(
    rng: &mut ChaCha8Rng,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Result<MultiGraph>,
    accept: impl Fn(&MultiGraph) -> bool,
    random: bool,
) -> Result<MultiGraph> {
    let tries = if random { MAX_ATTEMPTS } else { 1 };
    for _ in 0..tries {
        let g = draw(rng)?;
        if accept(&g) {
            return Ok(g);
        }
    }
    Err(Error::pre("generator could not meet the declared invariant"))
}

pub fn complete_graph(n: usize, mult: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    for _ in 0..mult {
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j).expect("distinct endpoints");
            }
        }
    }
    g
}

/// Complete bipartite multigraph K_{a,b}, sides 0..a and a..a+b.
pub fn complete_bipartite(a: usize, b: usize, mult: usize) -> MultiGraph {
    let mut g = MultiGraph::new(a + b);
    for _ in 0..mult {
        for x in 0..a {
            for y in a..a + b {
                g.add_edge(x, y).expect("distinct endpoints");
            }
        }
    }
    g
}

pub fn circulant(n: usize, connections: &[usize]) -> Result<MultiGraph> {
    if n < 3 {
        return Err(Error::domain("circulant needs n >= 3"));
    }
    let mut g = MultiGraph::new(n);
    for &c in connections {
        if c == 0 || 2 * c > n {
            return Err(Error::domain(format!("connection {c} outside 1..={}", n / 2)));
        }
        let starts = if 2 * c == n { n / 2 } else { n };
        for v in 0..starts {
            g.add_edge(v, (v + c) % n)?;
        }
    }
    Ok(g)
}

/// C_cycle x K_complete; vertex (i, j) is i * complete + j.
pub fn cartesian_cycle_complete(cycle: usize, complete: usize) -> Result<MultiGraph> {
    if cycle < 3 || complete == 0 {
        return Err(Error::domain("need a cycle of length >= 3 and a nonempty complete graph"));
    }
    let mut g = MultiGraph::new(cycle * complete);
    for i in 0..cycle {
        for j in 0..complete {
            g.add_edge(i * complete + j, (i + 1) % cycle * complete + j)?;
            for l in j + 1..complete {
                g.add_edge(i * complete + j, i * complete + l)?;
            }
        }
    }
    Ok(g)
}

pub fn scaled(g: &MultiGraph, times: usize) -> MultiGraph {
    let mut h = MultiGraph::new(g.vertex_count());
    for _ in 0..times {
        for e in g.edges() {
            h.add_edge(e.u, e.v).expect("edge of a loopless graph");
        }
    }
    h
}

pub fn hamiltonian_union(n: usize, cycles: usize, rng: &mut ChaCha8Rng) -> Result<MultiGraph> {
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    let mut g = MultiGraph::new(n);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..cycles {
        perm.shuffle(rng);
        for i in 0..n {
            g.add_edge(perm[i], perm[(i + 1) % n])?;
        }
    }
    Ok(g)
}

pub fn random_multigraph(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<MultiGraph> {
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    let mut g = MultiGraph::new(n);
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let v = (u + rng.gen_range(1..n)) % n;
        g.add_edge(u, v)?;
    }
    Ok(g)
}

/// Random bipartite multigraph with sides 0..a and a..a+b.
pub fn random_bipartite(a: usize, b: usize, m: usize, rng: &mut ChaCha8Rng) -> MultiGraph {
    let mut g = MultiGraph::new(a + b);
    for _ in 0..m {
        g.add_edge(rng.gen_range(0..a), a + rng.gen_range(0..b)).expect("sides are disjoint");
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circulant_11() {
        let g = circulant(11, &[1, 2, 3, 4, 5]).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 10));
        assert_eq!(connectivity::edge_connectivity_value(&g), 10);
        let even = circulant(8, &[4]).unwrap();
        assert_eq!(even.edge_count(), 4);
    }

    #[test]
    fn cartesian_c3_k5() {
        let g = cartesian_cycle_complete(3, 5).unwrap();
        assert_eq!(g.vertex_count(), 15);
        assert!(g.degrees().iter().all(|&d| d == 6));
    }

    #[test]
    fn two_hamiltonian_cycles() {
        let ens = Ensemble { kind: GenKind::HamiltonianUnion { n: 6, cycles: 2 }, seed: 1, count: 3, lambda: 2 };
        let gs = ens.generate().unwrap();
        for g in &gs {
            assert!(g.degrees().iter().all(|&d| d == 4));
            assert!(connectivity::edge_connectivity_value(g) >= 2);
        }
        assert_eq!(gs, ens.generate().unwrap());
    }

    #[test]
    fn declared_connectivity_is_enforced() {
        let ens = Ensemble { kind: GenKind::Complete { n: 4 }, seed: 0, count: 1, lambda: 4 };
        assert!(ens.generate().is_err());
        let ok = Ensemble {
            kind: GenKind::Scaled { base: Box::new(GenKind::Complete { n: 4 }), times: 2 },
            lambda: 6,
            ..ens
        };
        assert_eq!(ok.generate().unwrap()[0].edge_count(), 12);
    }
}
