use std::collections::BTreeSet;

use super::one_factor::{crossing, cyclic_tetrads, OneFactorSplit};
use super::{
    sigma_poly, sigma_product, sigma_var, subsets, Generator, GeneratorSet, InvariantsError,
    Provenance,
};
use crate::algebra::{reduce_tails, Polynomial, TermOrder, TieBreak, Variable};
use crate::graph::FactorGraph;

/// `s_uv` for every pair without joint parents, ascending.
pub fn degree_one_monomials(g: &FactorGraph) -> Vec<Polynomial> {
    g.all_pairs()
        .into_iter()
        .filter(|&(u, v)| g.joint_parents(u, v).is_empty())
        .map(|(u, v)| sigma_poly(u, v))
        .collect()
}

/// Children of the two latent nodes, their complements, and the shared children.
pub fn two_factor_split(
    g: &FactorGraph,
) -> Result<(OneFactorSplit, OneFactorSplit, Vec<usize>), InvariantsError> {
    if g.m() != 2 {
        return Err(InvariantsError::NotTwoFactor(g.m()));
    }
    let s1 = OneFactorSplit::complement_of(g.children(0), g.p())?;
    let s2 = OneFactorSplit::complement_of(g.children(1), g.p())?;
    let second: BTreeSet<usize> = g.children(1).iter().copied().collect();
    let overlap = g
        .children(0)
        .iter()
        .copied()
        .filter(|v| second.contains(v))
        .collect();
    Ok((s1, s2, overlap))
}

/// Cyclic order of all observed nodes that keeps consecutive latent nodes' shared
/// children adjacent: for each latent node in turn, its children not shared with a
/// neighbour, then those shared with the next one; nodes without parents last.
/// Each group is ascending, so a canonically labeled chain gets `0, 1, ..., p-1`.
pub fn chain_embedding(g: &FactorGraph) -> Vec<usize> {
    let m = g.m();
    let shared = |a: usize, b: usize| -> BTreeSet<usize> {
        let cb: BTreeSet<usize> = g.children(b).iter().copied().collect();
        g.children(a)
            .iter()
            .copied()
            .filter(|v| cb.contains(v))
            .collect()
    };
    let mut placed = vec![false; g.p()];
    let mut out = Vec::with_capacity(g.p());
    let mut push = |group: Vec<usize>, out: &mut Vec<usize>| {
        for v in group {
            if !std::mem::replace(&mut placed[v], true) {
                out.push(v);
            }
        }
    };
    for a in 0..m {
        let next = if a + 1 < m {
            shared(a, a + 1)
        } else {
            BTreeSet::new()
        };
        let own: Vec<usize> = g
            .children(a)
            .iter()
            .copied()
            .filter(|v| !next.contains(v))
            .collect();
        push(own, &mut out);
        push(next.into_iter().collect(), &mut out);
    }
    push((0..g.p()).collect(), &mut out);
    out
}

/// Vertices of `a` in the order they appear on `cycle`.
pub(super) fn induced(cycle: &[usize], a: &[usize]) -> Vec<usize> {
    cycle.iter().copied().filter(|v| a.contains(v)).collect()
}

fn embedding_order(cycle: &[usize]) -> TermOrder {
    TermOrder::circular(cycle.iter().copied(), TieBreak::Natural)
        .expect("a permutation of the observed nodes")
}

/// Degree-three generator for shared children `j`, a pair `i` of the first
/// clique and a pair `k` of the second:
/// `s_k1k2 s_i1i2 s_j1j2 - s_k1k2 s_j1i2 s_j2i1 - s_i1i2 s_j1k2 s_j2k1`.
///
/// The pairs are read ascending; `i` (resp. `k`) is swapped when that is needed
/// for `s_k1k2 s_i1i2 s_j1j2` to be the leading term under `ord`.
pub fn hexad(
    i: (usize, usize),
    j: (usize, usize),
    k: (usize, usize),
    ord: &TermOrder,
) -> Polynomial {
    let asc = |(a, b): (usize, usize)| (a.min(b), a.max(b));
    let (mut i, j, mut k) = (asc(i), asc(j), asc(k));
    let beats = |x: [(usize, usize); 2], y: [(usize, usize); 2]| {
        ord.cmp(&sigma_product(&x), &sigma_product(&y)) == std::cmp::Ordering::Greater
    };
    if !beats([i, j], [(j.0, i.1), (j.1, i.0)]) {
        i = (i.1, i.0);
    }
    if !beats([k, j], [(j.0, k.1), (j.1, k.0)]) {
        k = (k.1, k.0);
    }
    let t = |pairs: [(usize, usize); 3]| Polynomial::monomial(sigma_product(&pairs));
    t([k, i, j]) - t([k, (j.0, i.1), (j.1, i.0)]) - t([i, (j.0, k.1), (j.1, k.0)])
}

/// Pairs of `cycle \ j`, ascending, whose chord does not cross the chord `j` on `cycle`.
pub(super) fn pairs_beside(cycle: &[usize], j: (usize, usize)) -> Vec<(usize, usize)> {
    let rest: Vec<usize> = cycle
        .iter()
        .copied()
        .filter(|&v| v != j.0 && v != j.1)
        .collect();
    subsets(&rest, 2)
        .into_iter()
        .map(|q| (q[0].min(q[1]), q[0].max(q[1])))
        .filter(|&e| !crossing(cycle, e, j).expect("vertices of the cycle"))
        .collect()
}

fn hexads_for(a1: &[usize], a2: &[usize], j: (usize, usize), ord: &TermOrder) -> Vec<Polynomial> {
    let ks = pairs_beside(a2, j);
    pairs_beside(a1, j)
        .into_iter()
        .flat_map(|i| ks.iter().map(move |&k| hexad(i, j, k, ord)))
        .collect()
}

fn mentions_any(f: &Polynomial, vars: &BTreeSet<Variable>) -> bool {
    f.variables().iter().any(|v| vars.contains(v))
}

fn tagged(polys: Vec<Polynomial>, provenance: Provenance) -> Vec<Generator> {
    polys
        .into_iter()
        .map(|poly| Generator { poly, provenance })
        .collect()
}

/// Gröbner basis of a two-factor model whose latent nodes share at most two children,
/// under the circular order of [`chain_embedding`].
///
/// Zero covariances, tetrads of both cliques avoiding the shared pair, and one
/// hexad per admissible pair of noncrossing chords on either side of the shared
/// pair. With at most one shared child the ideal is the sum of the one-factor ideals.
pub fn two_factor_groebner(g: &FactorGraph) -> Result<GeneratorSet, InvariantsError> {
    let (s1, s2, overlap) = two_factor_split(g)?;
    if overlap.len() >= 3 {
        return Err(InvariantsError::OverlapTooLarge(overlap.len()));
    }
    if overlap.len() <= 1 {
        return Ok(toric_generators(g));
    }
    let cycle = chain_embedding(g);
    let (c1, c2) = (induced(&cycle, s1.a()), induced(&cycle, s2.a()));
    let j = (overlap[0], overlap[1]);
    let shared: BTreeSet<Variable> = [sigma_var(j.0, j.1)].into();
    let mut set = GeneratorSet::empty(embedding_order(&cycle), g.p(), overlap);
    set.monomials = tagged(degree_one_monomials(g), Provenance::TwoFactorMonomial);
    let tetrads = cyclic_tetrads(&c1)
        .into_iter()
        .chain(cyclic_tetrads(&c2))
        .filter(|t| !mentions_any(t, &shared))
        .collect();
    set.tetrads = tagged(tetrads, Provenance::TwoFactorTetrad);
    set.hexads = tagged(
        hexads_for(&c1, &c2, j, &set.order),
        Provenance::TwoFactorHexad,
    );
    Ok(set)
}

/// Zero covariances and the tetrads of every latent node that avoid pairs with two or more joint parents.
///
/// This generates the vanishing ideal when no two observed nodes share two latent parents.
pub fn toric_generators(g: &FactorGraph) -> GeneratorSet {
    let cycle = chain_embedding(g);
    let order = embedding_order(&cycle);
    let overlap = if g.m() == 2 {
        two_factor_split(g).map(|s| s.2).unwrap_or_default()
    } else {
        Vec::new()
    };
    let multi: BTreeSet<Variable> = g
        .all_pairs()
        .into_iter()
        .filter(|&(u, v)| g.joint_parents(u, v).len() >= 2)
        .map(|(u, v)| sigma_var(u, v))
        .collect();
    let mut set = GeneratorSet::empty(order, g.p(), overlap);
    set.monomials = tagged(degree_one_monomials(g), Provenance::SmallOverlapMonomial);
    let tetrads = (0..g.m())
        .flat_map(|h| cyclic_tetrads(&induced(&cycle, g.children(h))))
        .filter(|t| !mentions_any(t, &multi))
        .collect();
    set.tetrads = tagged(tetrads, Provenance::SmallOverlapTetrad);
    set
}

/// Low-degree generators of a chain of latent nodes `h1, ..., hm` (canonical order)
/// where consecutive nodes share at most two children and others share none.
///
/// Zero covariances, tetrads avoiding every shared pair, and hexads for each
/// consecutive pair avoiding the other shared pairs, with all non-leading terms
/// reduced. For three or more latent nodes the ideal also needs generators of
/// degree four and higher, which this does not produce.
pub fn chain_generators(g: &FactorGraph) -> Result<GeneratorSet, InvariantsError> {
    let m = g.m();
    let share = |a: usize, b: usize| -> Vec<usize> {
        let cb: BTreeSet<usize> = g.children(b).iter().copied().collect();
        g.children(a)
            .iter()
            .copied()
            .filter(|v| cb.contains(v))
            .collect()
    };
    let mut links = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let s = share(a, b);
            if b == a + 1 && s.len() > 2 {
                return Err(InvariantsError::NotAChain(format!(
                    "{} and {} share {} children",
                    g.latent_label(a),
                    g.latent_label(b),
                    s.len()
                )));
            }
            if b > a + 1 && !s.is_empty() {
                return Err(InvariantsError::NotAChain(format!(
                    "non-consecutive {} and {} share children",
                    g.latent_label(a),
                    g.latent_label(b)
                )));
            }
            if b == a + 1 && s.len() == 2 {
                links.push((a, (s[0], s[1])));
            }
        }
    }
    let cycle = chain_embedding(g);
    let order = embedding_order(&cycle);
    let shared: BTreeSet<Variable> = links.iter().map(|&(_, (u, v))| sigma_var(u, v)).collect();
    let monomials = degree_one_monomials(g);
    let tetrads: Vec<Polynomial> = (0..m)
        .flat_map(|h| cyclic_tetrads(&induced(&cycle, g.children(h))))
        .filter(|t| !mentions_any(t, &shared))
        .collect();
    let mut hexads = Vec::new();
    for &(a, j) in &links {
        let others: BTreeSet<Variable> = shared
            .iter()
            .copied()
            .filter(|&v| v != sigma_var(j.0, j.1))
            .collect();
        hexads.extend(
            hexads_for(
                &induced(&cycle, g.children(a)),
                &induced(&cycle, g.children(a + 1)),
                j,
                &order,
            )
            .into_iter()
            .filter(|h| !mentions_any(h, &others)),
        );
    }
    let (nm, nt) = (monomials.len(), tetrads.len());
    let all: Vec<Polynomial> = monomials.into_iter().chain(tetrads).chain(hexads).collect();
    let mut reduced = reduce_tails(&all, &order).into_iter();
    let overlap = if m == 2 {
        links
            .first()
            .map(|&(_, (u, v))| vec![u, v])
            .unwrap_or_default()
    } else {
        Vec::new()
    };
    let mut set = GeneratorSet::empty(order, g.p(), overlap);
    set.monomials = tagged(
        reduced.by_ref().take(nm).collect(),
        Provenance::ChainMonomial,
    );
    set.tetrads = tagged(reduced.by_ref().take(nt).collect(), Provenance::ChainTetrad);
    set.hexads = tagged(reduced.collect(), Provenance::ChainHexad);
    Ok(set)
}
