use std::collections::BTreeSet;

use super::two_factor::{degree_one_monomials, two_factor_split};
use super::{sigma_poly, subsets, InvariantsError};
use crate::algebra::Polynomial;
use crate::graph::FactorGraph;

/// Determinant by cofactor expansion along the first row.
fn determinant(m: &[Vec<Polynomial>]) -> Polynomial {
    match m.len() {
        0 => Polynomial::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Polynomial::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != c)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][c] * &determinant(&minor);
                acc = if c % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// `det(Σ_{rows, cols})` for disjoint index sets; entries are sigma variables.
pub fn off_diagonal_minor(rows: &[usize], cols: &[usize]) -> Polynomial {
    let m: Vec<Vec<Polynomial>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| sigma_poly(r, c)).collect())
        .collect();
    determinant(&m)
}

/// All minors `det(Σ_{A,B})` with `A`, `B` disjoint `size`-subsets of `0..p`, one per unordered `{A, B}`.
pub fn off_diagonal_minors(p: usize, size: usize) -> Result<Vec<Polynomial>, InvariantsError> {
    if !(2..=3).contains(&size) {
        return Err(InvariantsError::BadSize(size));
    }
    let nodes: Vec<usize> = (0..p).collect();
    let sets = subsets(&nodes, size);
    let mut out = Vec::new();
    for (x, a) in sets.iter().enumerate() {
        for b in &sets[x + 1..] {
            if a.iter().all(|v| !b.contains(v)) {
                out.push(off_diagonal_minor(a, b));
            }
        }
    }
    Ok(out)
}

fn parents_of(g: &FactorGraph, set: &[usize]) -> BTreeSet<usize> {
    set.iter()
        .flat_map(|&v| g.parents(v).iter().copied())
        .collect()
}

/// Zero covariances and the 2×2 off-diagonal minors whose row and column sets
/// share at most one latent parent. Minors touching a diagonal entry are skipped.
pub fn m_leq1(g: &FactorGraph) -> Vec<Polynomial> {
    let mut out = degree_one_monomials(g);
    let nodes: Vec<usize> = (0..g.p()).collect();
    let pairs = subsets(&nodes, 2);
    let mut seen = BTreeSet::new();
    for (x, a) in pairs.iter().enumerate() {
        for b in &pairs[x + 1..] {
            if a.iter().any(|v| b.contains(v)) {
                continue;
            }
            if parents_of(g, a).intersection(&parents_of(g, b)).count() > 1 {
                continue;
            }
            let f = off_diagonal_minor(a, b).sign_normalized();
            if !f.is_zero() && seen.insert(f.clone()) {
                out.push(f);
            }
        }
    }
    out
}

/// Whether a degree-three trinomial equals, up to sign, the 3×3 minor with rows
/// `{i1, j1, k1}` and columns `{i2, j2, k2}` after zeroing entries without joint parents,
/// for some labeling of the shared pair `j` and the pairs `i`, `k` beside it.
pub fn hexad_as_minor(hexad: &Polynomial, g: &FactorGraph) -> bool {
    if hexad.num_terms() != 3 || !hexad.is_homogeneous() || hexad.degree() != 3 {
        return false;
    }
    let Ok((s1, s2, overlap)) = two_factor_split(g) else {
        return false;
    };
    if overlap.len() != 2 {
        return false;
    }
    let nodes: BTreeSet<usize> = hexad
        .variables()
        .iter()
        .filter_map(|v| v.pair())
        .flat_map(|(u, v)| [u, v])
        .collect();
    let side = |a: &[usize]| -> Vec<usize> {
        nodes
            .iter()
            .copied()
            .filter(|v| a.contains(v) && !overlap.contains(v))
            .collect()
    };
    let (is, ks) = (side(s1.a()), side(s2.a()));
    if is.len() != 2 || ks.len() != 2 {
        return false;
    }
    let entry = |r: usize, c: usize| {
        if g.joint_parents(r, c).is_empty() {
            Polynomial::zero()
        } else {
            sigma_poly(r, c)
        }
    };
    for swap in 0..8u8 {
        let pick = |v: &[usize], bit: u8| {
            if swap & bit == 0 {
                (v[0], v[1])
            } else {
                (v[1], v[0])
            }
        };
        let (i, j, k) = (pick(&is, 1), pick(&overlap, 2), pick(&ks, 4));
        let rows = [i.0, j.0, k.0];
        let cols = [i.1, j.1, k.1];
        let m: Vec<Vec<Polynomial>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| entry(r, c)).collect())
            .collect();
        let det = determinant(&m);
        if det == *hexad || -det == *hexad {
            return true;
        }
    }
    false
}
