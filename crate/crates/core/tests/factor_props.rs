use std::collections::BTreeSet;

use modk::factor::{
    balanced_split, bipartition, factor_residues_to_p, factor_to_orientation, orientation_to_factor,
    star_decomposition, trail_colored_factor, verify_stars, StarDecomposition,
};
use modk::lifting::LiftLedger;
use modk::{EdgeId, MultiGraph, ResidueMap};
use proptest::prelude::*;

/// Connected multigraph: spanning path plus extra edges.
fn connected(max_n: usize, max_extra: usize) -> impl Strategy<Value = MultiGraph> {
    (2usize..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=max_extra).prop_map(move |extra| {
            let mut g = MultiGraph::new(n);
            for i in 0..n - 1 {
                g.add_edge(i, i + 1).unwrap();
            }
            for (a, b) in extra {
                if a != b {
                    g.add_edge(a, b).unwrap();
                }
            }
            g
        })
    })
}

fn any_graph() -> impl Strategy<Value = MultiGraph> {
    (2usize..=7).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 1..12).prop_map(move |pairs| {
            let mut g = MultiGraph::new(n);
            for (a, b) in pairs {
                if a != b {
                    g.add_edge(a, b).unwrap();
                }
            }
            g
        })
    })
}

/// Out-degrees divisible by k for some orientation, by enumeration.
fn star_orientation_exists(g: &MultiGraph, k: usize) -> bool {
    (0..1u32 << g.edge_count()).any(|mask| {
        let mut out = vec![0; g.vertex_count()];
        for (i, e) in g.edges().iter().enumerate() {
            out[if mask >> i & 1 == 1 { e.u } else { e.v }] += 1;
        }
        out.iter().all(|d| d % k == 0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trail_colouring_meets_window(
        g in connected(6, 10),
        picks in prop::collection::vec((0usize..64, 0usize..64, 0usize..64), 0..5),
        fbits in prop::collection::vec(0i64..2, 6),
    ) {
        let n = g.vertex_count();
        let mut led = LiftLedger::new(&g);
        for (pv, a, b) in picks {
            let h = led.current().clone();
            let v = pv % n;
            let inc = h.incident(v);
            if inc.len() < 2 {
                continue;
            }
            let (e1, e2) = (inc[a % inc.len()], inc[b % inc.len()]);
            if e1.id == e2.id || e1.other(v) == e2.other(v) {
                continue;
            }
            let mut trial = led.clone();
            trial.lift(v, e1.id, e2.id).unwrap();
            if trial.current().is_connected() {
                led = trial;
            }
        }
        let mut vals: Vec<i64> = fbits[..n].to_vec();
        if vals.iter().sum::<i64>() % 2 == 1 {
            vals[0] ^= 1;
        }
        let f = ResidueMap::new(2, vals).unwrap();
        let h = trail_colored_factor(&led, &f).unwrap();
        let dg = g.degrees();
        let dl = led.current().degrees();
        for v in 0..n {
            let d = h.degrees[v];
            prop_assert_eq!(d % 2, f.get(v));
            prop_assert!(2 * d + dl[v] >= dg[v] && 2 * d <= dg[v] + dl[v]);
        }
    }

    #[test]
    fn balanced_split_windows(g in any_graph()) {
        prop_assume!(g.edge_count() > 0);
        let s = balanced_split(&g).unwrap();
        prop_assert!(s.g1.len() == s.g2.len() || s.g1.len() == s.g2.len() + 1);
        let deg = g.degrees();
        for part in [&s.g1, &s.g2] {
            let mut d = vec![0usize; g.vertex_count()];
            for &id in part.iter() {
                let e = g.edge(id).unwrap();
                d[e.u] += 1;
                d[e.v] += 1;
            }
            for v in 0..g.vertex_count() {
                prop_assert!(d[v] + 1 >= deg[v].div_ceil(2) && d[v] <= deg[v] / 2 + 1);
            }
        }
    }

    #[test]
    fn stars_agree_with_orientations(g in any_graph(), k in 1usize..4) {
        prop_assume!(g.edge_count() <= 14 && g.edge_count() % k == 0);
        let exists = star_orientation_exists(&g, k);
        match star_decomposition(&g, k).unwrap() {
            StarDecomposition::Stars { stars, .. } => {
                prop_assert!(exists);
                prop_assert!(verify_stars(&g, k, &stars));
            }
            StarDecomposition::Infeasible => prop_assert!(!exists),
        }
    }

    #[test]
    fn factor_orientation_round_trip(
        a in 1usize..4,
        b in 1usize..4,
        pairs in prop::collection::vec((0usize..4, 0usize..4), 1..10),
        mask in any::<u32>(),
        k in 2usize..5,
    ) {
        let mut g = MultiGraph::new(a + b);
        for (x, y) in pairs {
            g.add_edge(x % a, a + y % b).unwrap();
        }
        let sides = bipartition(&g).unwrap();
        let h: BTreeSet<EdgeId> = g.edge_ids().into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e).collect();
        let o = factor_to_orientation(&g, &sides, &h);
        prop_assert_eq!(&orientation_to_factor(&g, &sides, &o), &h);
        let mut dh = vec![0i64; a + b];
        for &id in &h {
            let e = g.edge(id).unwrap();
            dh[e.u] += 1;
            dh[e.v] += 1;
        }
        let f = ResidueMap::new(k, dh).unwrap();
        let p = factor_residues_to_p(&g, &sides, &f).unwrap();
        let outs = o.out_degrees(&g);
        for v in 0..a + b {
            prop_assert!(p.matches(v, outs[v]));
        }
    }
}
