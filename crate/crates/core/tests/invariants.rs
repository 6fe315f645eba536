use std::collections::BTreeSet;

use modk::alpha::{check_alpha_properties, check_lift_invariance};
use modk::connectivity::is_k_edge_connected;
use modk::harness::io::{parse_graph, write_graph};
use modk::orientation::{orient_mod2_bounded, verify_orientation, BoundSpec, Bounds};
use modk::tree_packing::{is_m_tree_connected, partition_boundary, spanning_tree_packing, Packing};
use modk::{EdgeId, MultiGraph, ResidueMap};
use proptest::prelude::*;

/// Hamiltonian cycle on n vertices plus extra edges, so 2-edge-connected.
fn cyclic(max_n: usize, max_extra: usize) -> impl Strategy<Value = MultiGraph> {
    (3..=max_n)
        .prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=max_extra)))
        .prop_map(|(n, extra)| {
            let mut g = MultiGraph::new(n);
            for v in 0..n {
                g.add_edge(v, (v + 1) % n).unwrap();
            }
            for (a, b) in extra {
                if a != b {
                    g.add_edge(a, b).unwrap();
                }
            }
            g
        })
}

/// Residues mod k with the sum forced to |E| by the last vertex.
fn compatible(g: &MultiGraph, k: usize, raw: &[i64]) -> ResidueMap {
    let n = g.vertex_count();
    let mut vals = raw[..n].to_vec();
    let rest: i64 = vals[..n - 1].iter().sum();
    vals[n - 1] = g.edge_count() as i64 - rest;
    ResidueMap::new(k, vals).unwrap()
}

fn residue_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..5, 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mod2_orientation_is_balanced(g in cyclic(7, 8), raw in residue_strategy(), z in 0usize..7) {
        let p = compatible(&g, 2, &raw);
        let z0 = z % g.vertex_count();
        let o = orient_mod2_bounded(&g, &p, z0, None).unwrap();
        let rep = verify_orientation(&g, &o, &p, &BoundSpec::new(Bounds::FloorCeil(1)));
        prop_assert!(rep.ok, "{:?}", rep.violations);
    }

    #[test]
    fn alpha_properties(g in cyclic(6, 6), raw in residue_strategy(), k in 3usize..=5) {
        let p = compatible(&g, k, &raw);
        prop_assert!(check_alpha_properties(&g, &p).unwrap().is_empty());
    }

    #[test]
    fn alpha_survives_lifts(g in cyclic(6, 6), raw in residue_strategy(), k in 3usize..=5, pick in any::<(usize, usize, usize)>()) {
        let p = compatible(&g, k, &raw);
        let pivot = pick.0 % g.vertex_count();
        let at: Vec<EdgeId> = g.incident(pivot).iter().map(|e| e.id).collect();
        let i = pick.1 % at.len();
        let j = (i + 1 + pick.2 % (at.len() - 1)) % at.len();
        prop_assert!(check_lift_invariance(&g, &p, pivot, at[i], at[j]).unwrap().is_empty());
    }

    #[test]
    fn packing_or_deficient_partition(g in cyclic(6, 10), m in 1usize..=2) {
        let n = g.vertex_count();
        match spanning_tree_packing(&g, m).unwrap() {
            Packing::Trees(trees) => {
                prop_assert_eq!(trees.len(), m);
                let mut used = BTreeSet::new();
                for t in &trees {
                    prop_assert_eq!(t.len(), n - 1);
                    let sub = g.spanning_subgraph(t.iter().copied()).unwrap();
                    prop_assert!(sub.is_connected());
                    prop_assert!(t.iter().all(|e| used.insert(*e)));
                }
                prop_assert!(is_m_tree_connected(&g, m).unwrap());
            }
            Packing::Deficient(parts) => {
                let mut seen: Vec<usize> = parts.iter().flatten().copied().collect();
                seen.sort_unstable();
                prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
                prop_assert!(partition_boundary(&g, &parts) < 2 * m * (parts.len() - 1));
                prop_assert!(!is_m_tree_connected(&g, m).unwrap());
            }
        }
    }

    #[test]
    fn two_trees_imply_four_edge_connected(g in cyclic(6, 10)) {
        if is_m_tree_connected(&g, 2).unwrap() {
            prop_assert!(is_k_edge_connected(&g, 2));
        }
        if is_k_edge_connected(&g, 4) {
            prop_assert!(is_m_tree_connected(&g, 2).unwrap());
        }
    }

    #[test]
    fn graph_text_round_trip(g in cyclic(8, 12)) {
        let h = parse_graph(&write_graph(&g)).unwrap();
        prop_assert_eq!(h.vertex_count(), g.vertex_count());
        let ends = |g: &MultiGraph| g.edges().iter().map(|e| (e.id, e.u, e.v)).collect::<Vec<_>>();
        prop_assert_eq!(ends(&h), ends(&g));
    }
}
