use std::collections::BTreeSet;

use modk::decomposition::{eulerian_rule_decomposition, rule_windows, Rule};
use modk::{Dir, EdgeId, MultiGraph, Orientation};
use proptest::prelude::*;

/// Connected directed multigraph on n vertices: a spanning path plus extras.
fn instance() -> impl Strategy<Value = (MultiGraph, Orientation, Vec<u8>, Vec<usize>, Vec<usize>)> {
    (2usize..=6)
        .prop_flat_map(|n| {
            let extra = prop::collection::vec((0..n, 0..n, any::<bool>()), 0..8);
            let path_dirs = prop::collection::vec(any::<bool>(), n - 1);
            (Just(n), extra, path_dirs)
        })
        .prop_flat_map(|(n, extra, path_dirs)| {
            let mut g = MultiGraph::new(n);
            let mut o = Orientation::new();
            for (i, &d) in path_dirs.iter().enumerate() {
                let id = g.add_edge(i, i + 1).unwrap();
                o.set(id, if d { Dir::Forward } else { Dir::Backward });
            }
            for (a, b, d) in extra {
                if a != b {
                    let id = g.add_edge(a, b).unwrap();
                    o.set(id, if d { Dir::Forward } else { Dir::Backward });
                }
            }
            let m = g.edge_count();
            let classes = prop::collection::vec(0u8..3, m);
            let slack = prop::collection::vec(0usize..3, n);
            (Just(g), Just(o), classes, slack.clone(), slack)
        })
}

/// Every superset split within the windows, by enumeration.
fn feasible_splits(g: &MultiGraph, w: &[Vec<(i64, i64)>; 2], f1: &BTreeSet<EdgeId>, f2: &BTreeSet<EdgeId>) -> usize {
    let free: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !f1.contains(e) && !f2.contains(e)).collect();
    let n = g.vertex_count();
    let mut count = 0;
    for mask in 0u32..(1 << free.len()) {
        let mut d1 = vec![0i64; n];
        let mut d2 = vec![0i64; n];
        for e in g.edges() {
            let in1 = f1.contains(&e.id) || free.iter().position(|&x| x == e.id).is_some_and(|i| mask >> i & 1 == 1);
            let d = if in1 { &mut d1 } else { &mut d2 };
            d[e.u] += 1;
            d[e.v] += 1;
        }
        if (0..n).all(|v| w[0][v].0 <= d1[v] && d1[v] <= w[0][v].1 && w[1][v].0 <= d2[v] && d2[v] <= w[1][v].1) {
            count += 1;
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rule_windows_hold((g, o, classes, s1, s2) in instance()) {
        let ids = g.edge_ids();
        let mut f1: BTreeSet<EdgeId> = ids.iter().zip(&classes).filter(|(_, &c)| c == 1).map(|(&e, _)| e).collect();
        let f2: BTreeSet<EdgeId> = ids.iter().zip(&classes).filter(|(_, &c)| c == 2).map(|(&e, _)| e).collect();
        if f1.is_empty() && f2.is_empty() {
            f1.insert(ids[0]);
        }
        let outs = o.out_degrees(&g);
        let ins = o.in_degrees(&g);
        // top up s1 so the slack condition holds
        let s1: Vec<usize> = (0..g.vertex_count())
            .map(|v| s1[v].max(outs[v].saturating_sub(ins[v]).saturating_sub(s2[v])))
            .collect();
        let d = eulerian_rule_decomposition(&g, &o, &f1, &f2, &s1, &s2).unwrap();
        prop_assert!(f1.is_subset(&d.g1) && f2.is_subset(&d.g2));
        prop_assert_eq!(d.g1.len() + d.g2.len(), g.edge_count());
        if g.edge_count() <= 12 {
            let w = rule_windows(&g, &o, &f1, &f2, &s1, &s2);
            prop_assert!(feasible_splits(&g, &w, &f1, &f2) >= 1);
        }
        let kept = if d.swapped { f2.len() } else { f1.len() };
        prop_assert_eq!(d.trace.iter().filter(|t| t.rule == Rule::InF1).count(), kept);
    }
}
