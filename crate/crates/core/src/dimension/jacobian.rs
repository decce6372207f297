use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use super::DimensionError;
use crate::algebra::{exact_rank, Rational, RationalMatrix};
use crate::graph::FactorGraph;
use crate::rng::stream;

/// Loadings keyed by `(observed, latent)`.
pub type Loadings = BTreeMap<(usize, usize), Rational>;

/// Derivatives of the off-diagonal covariances with respect to the loadings.
///
/// Row `{u,v}`, column `(z,h)`: `λ_vh` if `z = u`, `λ_uh` if `z = v`, when `h`
/// parents both `u` and `v`; zero otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianBlock {
    /// All observed pairs `(u, v)`, `u < v`, lexicographic.
    pub rows: Vec<(usize, usize)>,
    /// Edges as `(observed, latent)`, sorted by latent, then observed.
    pub cols: Vec<(usize, usize)>,
    pub entries: RationalMatrix,
}

impl JacobianBlock {
    pub fn rank(&self) -> usize {
        exact_rank(&self.entries)
    }
}

/// The Jacobian block at the given loadings; keys must be exactly the edges.
pub fn jacobian_block(g: &FactorGraph, lambda: &Loadings) -> Result<JacobianBlock, DimensionError> {
    let cols: Vec<(usize, usize)> = g.edges().map(|(h, v)| (v, h)).collect();
    if lambda.len() != cols.len() {
        return Err(DimensionError::KeyMismatch(format!(
            "{} loadings supplied for {} edges",
            lambda.len(),
            cols.len()
        )));
    }
    if let Some(&(v, h)) = cols.iter().find(|k| !lambda.contains_key(k)) {
        return Err(DimensionError::KeyMismatch(format!(
            "no loading for edge {} -> {}",
            g.latent_label(h),
            g.observed_label(v)
        )));
    }
    let rows = g.all_pairs();
    let col_of: BTreeMap<(usize, usize), usize> =
        cols.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut entries = RationalMatrix::zeros(rows.len(), cols.len());
    for (r, &(u, v)) in rows.iter().enumerate() {
        for h in g.joint_parents(u, v) {
            entries.set(r, col_of[&(u, h)], lambda[&(v, h)].clone());
            entries.set(r, col_of[&(v, h)], lambda[&(u, h)].clone());
        }
    }
    Ok(JacobianBlock {
        rows,
        cols,
        entries,
    })
}

/// Loadings drawn uniformly from `[1, 2^20]`, one per edge in edge order.
pub fn random_loadings(g: &FactorGraph, seed: u64) -> Loadings {
    let mut rng = stream(seed, 0);
    g.edges()
        .map(|(h, v)| {
            (
                (v, h),
                Rational::from_integer(rng.random_range(1i64..=1 << 20).into()),
            )
        })
        .collect()
}

/// Rank of the Jacobian block for trial `t` of the master seed.
pub fn trial_rank(g: &FactorGraph, seed: u64, t: u64) -> usize {
    let lambda = random_loadings(g, crate::rng::derive_seed(seed, t));
    jacobian_block(g, &lambda)
        .expect("keys come from the edge set")
        .rank()
}

/// `p` plus the largest Jacobian rank over `trials` random loadings (at least one trial).
///
/// Exact rank arithmetic; the only randomness is the choice of loadings, so the
/// result can undershoot the generic rank only on a measure-zero event.
pub fn model_dimension(g: &FactorGraph, trials: usize, seed: u64) -> usize {
    let trials = trials.max(1) as u64;
    let best = (0..trials)
        .into_par_iter()
        .map(|t| trial_rank(g, seed, t))
        .max()
        .unwrap_or(0);
    g.p() + best
}

/// Whether every entry is zero.
pub fn is_zero_block(b: &JacobianBlock) -> bool {
    (0..b.entries.rows()).all(|r| b.entries.row(r).iter().all(Zero::is_zero))
}
