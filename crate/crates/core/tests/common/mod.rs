#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use fct_core::{FactorGraph, Polynomial};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> FactorGraph {
    let path = fixtures_dir().join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    FactorGraph::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn poly(s: &str) -> Polynomial {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn polys(items: &[&str]) -> Vec<Polynomial> {
    items.iter().map(|s| poly(s)).collect()
}

/// Polynomials up to sign, for set comparisons.
pub fn normalized_set<'a, I: IntoIterator<Item = &'a Polynomial>>(
    items: I,
) -> BTreeSet<Polynomial> {
    items.into_iter().map(Polynomial::sign_normalized).collect()
}

/// Hexads of the seven-node two-factor graph with shared children `{4,5}`.
pub const HEXADS_P7: [&str; 3] = [
    "s_6_7*s_1_2*s_4_5 - s_6_7*s_2_4*s_1_5 - s_1_2*s_4_7*s_5_6",
    "s_6_7*s_1_3*s_4_5 - s_6_7*s_3_4*s_1_5 - s_1_3*s_4_7*s_5_6",
    "s_6_7*s_2_3*s_4_5 - s_6_7*s_3_4*s_2_5 - s_2_3*s_4_7*s_5_6",
];

/// Generators of the eight-node three-latent chain, in printed order.
pub const CHAIN3_P8_MONOMIALS: [&str; 11] = [
    "s_1_5", "s_1_6", "s_1_7", "s_1_8", "s_2_5", "s_2_6", "s_2_7", "s_2_8", "s_3_8", "s_4_8",
    "s_5_8",
];
pub const CHAIN3_P8_TETRADS: [&str; 6] = [
    "s_4_7*s_5_6 - s_4_6*s_5_7",
    "s_3_7*s_5_6 - s_3_6*s_5_7",
    "s_3_7*s_4_6 - s_3_6*s_4_7",
    "s_3_7*s_4_5 - s_3_5*s_4_7",
    "s_3_6*s_4_5 - s_3_5*s_4_6",
    "s_1_4*s_2_3 - s_1_3*s_2_4",
];
pub const CHAIN3_P8_HEXADS: [&str; 2] = [
    "s_1_2*s_3_4*s_5_7 - s_1_2*s_3_5*s_4_7 - s_1_3*s_2_4*s_5_7",
    "s_1_2*s_3_4*s_5_6 - s_1_2*s_3_5*s_4_6 - s_1_3*s_2_4*s_5_6",
];

/// Degree-five invariant of the two-factor graph with children `{1..6}` and `{4..7}`.
pub const OVERLAP3_QUINTIC: &str = "s_4_5*s_6_7*s_5_7*s_1_4*s_3_6 - s_4_5*s_6_7*s_1_5*s_3_6*s_4_7 \
    + s_5_6*s_6_7*s_3_5*s_1_4*s_4_7 - s_5_6*s_5_7*s_1_4*s_3_6*s_4_7 \
    - s_6_7*s_3_5*s_4_6*s_5_7*s_1_4 + s_4_6*s_5_7*s_1_5*s_3_6*s_4_7";

/// Three-latent chain generator on nine nodes.
pub const CHAIN3_QUARTIC: &str =
    "s_1_2*s_3_4*s_6_7*s_8_9 - s_1_2*s_3_4*s_6_8*s_7_9 - s_1_2*s_8_9*s_3_6*s_4_7 \
    - s_6_7*s_8_9*s_1_3*s_2_4 + s_1_3*s_2_4*s_6_8*s_7_9";

/// Four-latent chain generator on twelve nodes.
pub const CHAIN4_QUINTIC: &str =
    "s_1_2*s_3_4*s_6_7*s_9_10*s_11_12 - s_1_2*s_3_4*s_6_7*s_9_11*s_10_12 \
    - s_1_2*s_3_4*s_11_12*s_6_9*s_7_10 - s_1_2*s_9_10*s_11_12*s_3_6*s_4_7 \
    + s_1_2*s_9_11*s_10_12*s_3_6*s_4_7 - s_6_7*s_9_10*s_11_12*s_1_3*s_2_4 \
    + s_6_7*s_1_3*s_2_4*s_9_11*s_10_12 + s_11_12*s_1_3*s_2_4*s_6_9*s_7_10";

/// Deterministic random two-factor graph on `p` nodes with overlap at most `max_overlap`.
pub fn random_two_factor(p: usize, max_overlap: usize, seed: u64) -> FactorGraph {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut nodes: Vec<usize> = (1..=p).collect();
        nodes.shuffle(&mut rng);
        let overlap = rng.random_range(0..=max_overlap.min(p));
        let (shared, rest) = nodes.split_at(overlap);
        let mut a1: Vec<usize> = shared.to_vec();
        let mut a2: Vec<usize> = shared.to_vec();
        for &v in rest {
            match rng.random_range(0..3) {
                0 => a1.push(v),
                1 => a2.push(v),
                _ => {}
            }
        }
        if a1.is_empty() || a2.is_empty() || (overlap == 2 && p < 4) {
            continue;
        }
        a1.sort_unstable();
        a2.sort_unstable();
        return FactorGraph::from_children(p, &[&a1, &a2]);
    }
}

/// Child lists (one-based) from an incidence matrix; empty latent nodes are skipped.
pub fn graph_from(p: usize, incidence: &[Vec<bool>]) -> FactorGraph {
    let children: Vec<Vec<usize>> = incidence
        .iter()
        .map(|row| (1..=p).filter(|&v| row[v - 1]).collect::<Vec<_>>())
        .filter(|c| !c.is_empty())
        .collect();
    let refs: Vec<&[usize]> = children.iter().map(Vec::as_slice).collect();
    FactorGraph::from_children(p, &refs)
}

/// Exhaustive maximum: each pair goes to one of its joint parents or to none.
pub fn brute_force_collection(g: &FactorGraph) -> usize {
    let pairs: Vec<Vec<usize>> = g
        .all_pairs()
        .into_iter()
        .map(|(u, v)| g.joint_parents(u, v))
        .filter(|jp| !jp.is_empty())
        .collect();
    fn go(i: usize, pairs: &[Vec<usize>], room: &mut [usize], taken: usize, best: &mut usize) {
        if taken + (pairs.len() - i) <= *best {
            return;
        }
        if i == pairs.len() {
            *best = taken;
            return;
        }
        for &h in &pairs[i] {
            if room[h] > 0 {
                room[h] -= 1;
                go(i + 1, pairs, room, taken + 1, best);
                room[h] += 1;
            }
        }
        go(i + 1, pairs, room, taken, best);
    }
    let mut room: Vec<usize> = (0..g.m()).map(|h| g.children(h).len()).collect();
    let mut best = 0;
    go(0, &pairs, &mut room, 0, &mut best);
    best
}
