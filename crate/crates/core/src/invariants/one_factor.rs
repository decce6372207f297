use std::collections::BTreeSet;

use super::{sigma_poly, sigma_var, subsets, Generator, GeneratorSet, InvariantsError, Provenance};
use crate::algebra::{Polynomial, TermOrder, TieBreak};

/// Children `A` of a single latent node and the remaining observed nodes `B`.
///
/// `A` and `B` partition `0..p`; `A` is nonempty. Both are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneFactorSplit {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl OneFactorSplit {
    pub fn new(a: &[usize], b: &[usize]) -> Result<Self, InvariantsError> {
        let sa: BTreeSet<usize> = a.iter().copied().collect();
        let sb: BTreeSet<usize> = b.iter().copied().collect();
        if sa.is_empty() {
            return Err(InvariantsError::InvalidSplit("A must be nonempty".into()));
        }
        if !sa.is_disjoint(&sb) {
            return Err(InvariantsError::InvalidSplit("A and B overlap".into()));
        }
        let n = sa.len() + sb.len();
        if sa.iter().chain(&sb).any(|&v| v >= n) {
            return Err(InvariantsError::InvalidSplit(
                "A and B must cover 0..p".into(),
            ));
        }
        Ok(OneFactorSplit {
            a: sa.into_iter().collect(),
            b: sb.into_iter().collect(),
        })
    }

    /// `A` given, `B` its complement in `0..p`.
    pub fn complement_of(a: &[usize], p: usize) -> Result<Self, InvariantsError> {
        let sa: BTreeSet<usize> = a.iter().copied().collect();
        let b: Vec<usize> = (0..p).filter(|v| !sa.contains(v)).collect();
        OneFactorSplit::new(a, &b)
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn p(&self) -> usize {
        self.a.len() + self.b.len()
    }
}

/// Whether two chords of the cyclic embedding cross; chords sharing an endpoint count as crossing.
pub fn crossing(
    embedding: &[usize],
    e1: (usize, usize),
    e2: (usize, usize),
) -> Result<bool, InvariantsError> {
    let pos = |v: usize| {
        embedding
            .iter()
            .position(|&w| w == v)
            .ok_or(InvariantsError::UnknownVertex(v))
    };
    let (a, b) = (pos(e1.0)?, pos(e1.1)?);
    let (c, d) = (pos(e2.0)?, pos(e2.1)?);
    if a == c || a == d || b == c || b == d {
        return Ok(true);
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let inside = |x: usize| lo < x && x < hi;
    Ok(inside(c) != inside(d))
}

/// Tetrads of the complete graph on `a` embedded in ascending order: for each
/// `i<j<k<l`, `s_ij s_kl - s_ik s_jl` and `s_il s_jk - s_ik s_jl`.
pub fn clique_tetrads(a: &[usize]) -> Vec<Polynomial> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    cyclic_tetrads(&sorted)
}

/// Tetrads of the complete graph on the vertices of `cycle`, in that cyclic
/// order: both noncrossing products minus the crossing one, per 4-subset.
pub fn cyclic_tetrads(cycle: &[usize]) -> Vec<Polynomial> {
    let mut out = Vec::new();
    for q in subsets(cycle, 4) {
        let (i, j, k, l) = (q[0], q[1], q[2], q[3]);
        let cross = &sigma_poly(i, k) * &sigma_poly(j, l);
        out.push(&(&sigma_poly(i, j) * &sigma_poly(k, l)) - &cross);
        out.push(&(&sigma_poly(i, l) * &sigma_poly(j, k)) - &cross);
    }
    out
}

/// Reduced Gröbner basis of a one-factor model: `s_xy` for every pair meeting `B`,
/// and the tetrads of `A`.
pub fn one_factor_groebner(split: &OneFactorSplit) -> GeneratorSet {
    one_factor_groebner_with(split, TieBreak::Natural)
}

pub fn one_factor_groebner_with(split: &OneFactorSplit, tie_break: TieBreak) -> GeneratorSet {
    let p = split.p();
    let order = TermOrder::circular(0..p, tie_break).expect("distinct indices");
    let mut set = GeneratorSet::empty(order, p, Vec::new());
    let in_b: BTreeSet<usize> = split.b.iter().copied().collect();
    for u in 0..p {
        for v in u + 1..p {
            if in_b.contains(&u) || in_b.contains(&v) {
                set.monomials.push(Generator {
                    poly: Polynomial::var(sigma_var(u, v)),
                    provenance: Provenance::OneFactorMonomial,
                });
            }
        }
    }
    set.tetrads = clique_tetrads(&split.a)
        .into_iter()
        .map(|poly| Generator {
            poly,
            provenance: Provenance::OneFactorTetrad,
        })
        .collect();
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_groebner_basis, leading_monomial, Monomial};

    #[test]
    fn crossing_examples() {
        let emb = [0, 1, 2, 3, 4];
        assert!(crossing(&emb, (0, 3), (1, 4)).unwrap());
        assert!(!crossing(&emb, (0, 1), (3, 4)).unwrap());
        assert!(crossing(&emb, (0, 1), (1, 2)).unwrap());
        assert_eq!(
            crossing(&emb, (0, 9), (1, 2)),
            Err(InvariantsError::UnknownVertex(9))
        );
    }

    #[test]
    fn counts_match_closed_forms() {
        let split = OneFactorSplit::new(&[0, 1, 2, 3, 4], &[5, 6]).unwrap();
        let set = one_factor_groebner(&split);
        assert_eq!(set.monomials.len(), 2 * 5 + 1);
        assert_eq!(set.tetrads.len(), 10);
        let small = one_factor_groebner(&OneFactorSplit::new(&[0, 1, 2], &[]).unwrap());
        assert!(small.is_empty());
    }

    #[test]
    fn four_clique_leads_are_noncrossing() {
        let set = one_factor_groebner(&OneFactorSplit::new(&[0, 1, 2, 3], &[]).unwrap());
        let leads: Vec<Monomial> = set
            .tetrads
            .iter()
            .map(|g| leading_monomial(&g.poly, &set.order).unwrap())
            .collect();
        let s = |i, j| crate::algebra::Variable::sigma(i, j);
        assert_eq!(
            leads,
            vec![
                Monomial::product([s(0, 1), s(2, 3)]),
                Monomial::product([s(0, 3), s(1, 2)])
            ]
        );
        assert!(is_groebner_basis(&set.polynomials(), &set.order));
    }

    #[test]
    fn invalid_splits_rejected() {
        assert!(OneFactorSplit::new(&[], &[0]).is_err());
        assert!(OneFactorSplit::new(&[0, 1], &[1]).is_err());
        assert!(OneFactorSplit::new(&[0, 5], &[1]).is_err());
    }
}
