use std::collections::BTreeSet;

use super::two_factor::{chain_embedding, induced, pairs_beside, two_factor_split};
use super::{sigma_product, subsets, GeneratorSet, InvariantsError};
use crate::algebra::{Monomial, TermOrder};
use crate::graph::FactorGraph;

/// An observed pair `(u, v)`, `u < v`, standing for the variable `s_uv`.
pub type PairLabel = (usize, usize);

/// Hypergraph whose edge ideal is the initial ideal of a two-factor model with
/// two shared children `j1 j2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedHypergraph {
    pub p: usize,
    pub overlap: Vec<usize>,
    /// Every pair appearing in an edge or as a degree-one generator.
    pub vertices: BTreeSet<PairLabel>,
    /// Noncrossing chord pairs of either clique, avoiding `j1 j2`.
    pub edges2: BTreeSet<[PairLabel; 2]>,
    /// `{i, j1 j2, k}` with `i`, `k` chords of the two cliques beside `j1 j2`.
    pub edges3: BTreeSet<[PairLabel; 3]>,
    /// Pairs `xy`, `x` only under the first latent node, `y` only under the second.
    pub isolated: BTreeSet<PairLabel>,
    /// Other pairs without joint parents, which involve a node with no latent parent.
    pub detached: BTreeSet<PairLabel>,
}

/// Noncrossing chord pairs of the 4-subsets of `cycle`, each pair sorted.
fn noncrossing_pairs(cycle: &[usize], shared: PairLabel) -> Vec<[PairLabel; 2]> {
    let asc = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut out = Vec::new();
    for q in subsets(cycle, 4) {
        let (i, j, k, l) = (q[0], q[1], q[2], q[3]);
        for mut e in [[asc(i, j), asc(k, l)], [asc(i, l), asc(j, k)]] {
            e.sort_unstable();
            if !e.contains(&shared) {
                out.push(e);
            }
        }
    }
    out
}

/// Glued hypergraph of a two-factor graph whose latent nodes share exactly two children.
pub fn glued_hypergraph(g: &FactorGraph) -> Result<GluedHypergraph, InvariantsError> {
    let (s1, s2, overlap) = two_factor_split(g)?;
    if overlap.len() != 2 {
        return Err(InvariantsError::OverlapNotTwo(overlap.len()));
    }
    let j = (overlap[0], overlap[1]);
    let cycle = chain_embedding(g);
    let (c1, c2) = (induced(&cycle, s1.a()), induced(&cycle, s2.a()));
    let edges2: BTreeSet<[PairLabel; 2]> = noncrossing_pairs(&c1, j)
        .into_iter()
        .chain(noncrossing_pairs(&c2, j))
        .collect();
    let ks = pairs_beside(&c2, j);
    let edges3: BTreeSet<[PairLabel; 3]> = pairs_beside(&c1, j)
        .into_iter()
        .flat_map(|i| ks.iter().map(move |&k| [i, j, k]))
        .collect();
    let only = |a: &[usize]| -> Vec<usize> {
        a.iter().copied().filter(|v| !overlap.contains(v)).collect()
    };
    let isolated: BTreeSet<PairLabel> = only(s1.a())
        .into_iter()
        .flat_map(|x| only(s2.a()).into_iter().map(move |y| (x.min(y), x.max(y))))
        .collect();
    let detached: BTreeSet<PairLabel> = g
        .all_pairs()
        .into_iter()
        .filter(|&(u, v)| g.joint_parents(u, v).is_empty() && !isolated.contains(&(u, v)))
        .collect();
    let mut vertices: BTreeSet<PairLabel> = isolated.union(&detached).copied().collect();
    vertices.extend(edges2.iter().flatten());
    vertices.extend(edges3.iter().flatten());
    Ok(GluedHypergraph {
        p: g.p(),
        overlap,
        vertices,
        edges2,
        edges3,
        isolated,
        detached,
    })
}

/// Drops every monomial divisible by a different one in the set.
fn minimalize(ms: BTreeSet<Monomial>) -> BTreeSet<Monomial> {
    ms.iter()
        .filter(|m| !ms.iter().any(|d| d != *m && d.divides(m)))
        .cloned()
        .collect()
}

/// Whether the leading monomials of `gens` generate the edge ideal of `h`.
pub fn initial_ideal_check(
    gens: &GeneratorSet,
    h: &GluedHypergraph,
    ord: &TermOrder,
) -> Result<bool, InvariantsError> {
    if gens.p != h.p || gens.overlap != h.overlap {
        return Err(InvariantsError::GraphMismatch);
    }
    let leads: BTreeSet<Monomial> = gens
        .iter()
        .filter_map(|g| crate::algebra::leading_monomial(&g.poly, ord).ok())
        .collect();
    let mut edge_ideal: BTreeSet<Monomial> = h
        .isolated
        .iter()
        .chain(&h.detached)
        .map(|&e| sigma_product(&[e]))
        .collect();
    edge_ideal.extend(h.edges2.iter().map(|e| sigma_product(e)));
    edge_ideal.extend(h.edges3.iter().map(|e| sigma_product(e)));
    Ok(minimalize(leads) == minimalize(edge_ideal))
}
