use std::collections::BTreeSet;

use fct_core::graph::{enumerate_zuta_labelings, zuta_labeling};
use fct_core::FactorGraph;
use proptest::prelude::*;

/// Child lists (one-based) from an incidence matrix; empty latent nodes are skipped.
fn graph_from(p: usize, incidence: &[Vec<bool>]) -> FactorGraph {
    let children: Vec<Vec<usize>> = incidence
        .iter()
        .map(|row| (1..=p).filter(|&v| row[v - 1]).collect::<Vec<_>>())
        .filter(|c| !c.is_empty())
        .collect();
    let refs: Vec<&[usize]> = children.iter().map(Vec::as_slice).collect();
    FactorGraph::from_children(p, &refs)
}

fn graph(max_p: usize, max_m: usize) -> impl Strategy<Value = FactorGraph> {
    (1..=max_p, 1..=max_m).prop_flat_map(|(p, m)| {
        prop::collection::vec(prop::collection::vec(prop::bool::ANY, p), m)
            .prop_map(move |inc| graph_from(p, &inc))
    })
}

/// Graphs where latent `i` has the pure child `v_{i+1}`.
fn pure_child_graph() -> impl Strategy<Value = FactorGraph> {
    (1usize..=4, 0usize..=3).prop_flat_map(|(m, extra)| {
        let p = m + extra;
        prop::collection::vec(prop::collection::vec(prop::bool::ANY, extra), m).prop_map(
            move |inc| {
                let children: Vec<Vec<usize>> = inc
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        std::iter::once(i + 1)
                            .chain((0..extra).filter(|&k| row[k]).map(|k| m + k + 1))
                            .collect()
                    })
                    .collect();
                let refs: Vec<&[usize]> = children.iter().map(Vec::as_slice).collect();
                FactorGraph::from_children(p, &refs)
            },
        )
    })
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for perm in permutations(m - 1) {
        for pos in 0..=perm.len() {
            let mut next = perm.clone();
            next.insert(pos, m - 1);
            out.push(next);
        }
    }
    out
}

/// Some latent order gives every node a child outside the later nodes' children.
fn zuta_by_brute_force(g: &FactorGraph) -> bool {
    permutations(g.m()).iter().any(|order| {
        order.iter().enumerate().all(|(i, &h)| {
            let later: BTreeSet<usize> = order[i + 1..]
                .iter()
                .flat_map(|&l| g.children(l).iter().copied())
                .collect();
            g.children(h).iter().any(|v| !later.contains(v))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn joint_parents_are_symmetric(g in graph(6, 3)) {
        for u in g.observed_labels() {
            for v in g.observed_labels() {
                prop_assert_eq!(g.jpa(u, v).unwrap(), g.jpa(v, u).unwrap());
            }
        }
    }

    #[test]
    fn pair_classes_match_joint_parents(g in graph(6, 3)) {
        let labels = g.observed_labels();
        for h in g.latent_labels() {
            let got: BTreeSet<(&str, &str)> = g.pair_classes(h).unwrap().into_iter().collect();
            let mut want = BTreeSet::new();
            for (a, u) in labels.iter().enumerate() {
                for v in &labels[a + 1..] {
                    if g.jpa(u, v).unwrap().contains(&h.as_str()) {
                        want.insert((u.as_str(), v.as_str()));
                    }
                }
            }
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn zuta_search_is_exact(g in graph(6, 5)) {
        let found = zuta_labeling(&g);
        if let Some(lab) = &found {
            prop_assert!(lab.validate(&g).is_ok());
        }
        prop_assert_eq!(found.is_some(), zuta_by_brute_force(&g));
        for lab in enumerate_zuta_labelings(&g, 50) {
            prop_assert!(lab.validate(&g).is_ok());
        }
    }

    #[test]
    fn pure_children_imply_zuta(g in pure_child_graph()) {
        prop_assert!(zuta_labeling(&g).is_some());
    }
}
