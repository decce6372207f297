//! Dimension of factor analysis models: combinatorial upper and lower bounds
//! and the generic dimension from the Jacobian rank.

mod flow;
mod jacobian;

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub use flow::{max_bipartite_matching, FlowNetwork};
pub use jacobian::{
    is_zero_block, jacobian_block, model_dimension, random_loadings, trial_rank, JacobianBlock,
    Loadings,
};

use crate::graph::{visit_zuta_labelings, FactorGraph, GraphError, LabeledZuta, ZutaLabeling};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimensionError {
    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),
    #[error("loading keys do not match the edges: {0}")]
    KeyMismatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Per-latent sets `A_h` of observed pairs, indexed by latent position.
///
/// Valid when `A_h` holds only pairs of children of `h`, `|A_h| <= |ch(h)|`,
/// and the sets are pairwise disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidCollection {
    sets: Vec<Vec<(usize, usize)>>,
}

/// Label-based JSON form: latent label to its list of pairs.
pub type LabeledCollection = IndexMap<String, Vec<(String, String)>>;

impl ValidCollection {
    pub fn new(mut sets: Vec<Vec<(usize, usize)>>) -> Self {
        for s in &mut sets {
            for pair in s.iter_mut() {
                if pair.0 > pair.1 {
                    *pair = (pair.1, pair.0);
                }
            }
            s.sort_unstable();
        }
        ValidCollection { sets }
    }

    pub fn sets(&self) -> &[Vec<(usize, usize)>] {
        &self.sets
    }

    pub fn get(&self, h: usize) -> &[(usize, usize)] {
        &self.sets[h]
    }

    /// Total number of pairs.
    pub fn sum(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// Checks the validity conditions against the graph.
    pub fn check(&self, g: &FactorGraph) -> Result<(), String> {
        if self.sets.len() != g.m() {
            return Err(format!(
                "{} sets for {} latent nodes",
                self.sets.len(),
                g.m()
            ));
        }
        let mut used = BTreeSet::new();
        for (h, set) in self.sets.iter().enumerate() {
            if set.len() > g.children(h).len() {
                return Err(format!("A_{} exceeds |ch|", g.latent_label(h)));
            }
            for &(u, v) in set {
                if !(g.has_edge(h, u) && g.has_edge(h, v)) || u == v {
                    return Err(format!(
                        "pair {u},{v} is not a pair of children of {}",
                        g.latent_label(h)
                    ));
                }
                if !used.insert((u, v)) {
                    return Err(format!("pair {u},{v} appears twice"));
                }
            }
        }
        Ok(())
    }

    pub fn to_labeled(&self, g: &FactorGraph) -> LabeledCollection {
        self.sets
            .iter()
            .enumerate()
            .map(|(h, set)| {
                let pairs = set
                    .iter()
                    .map(|&(u, v)| {
                        (
                            g.observed_label(u).to_string(),
                            g.observed_label(v).to_string(),
                        )
                    })
                    .collect();
                (g.latent_label(h).to_string(), pairs)
            })
            .collect()
    }

    pub fn from_labeled(doc: &LabeledCollection, g: &FactorGraph) -> Result<Self, GraphError> {
        let mut sets = vec![Vec::new(); g.m()];
        for (h, pairs) in doc {
            let hi = g
                .latent_index(h)
                .ok_or_else(|| GraphError::UnknownNode(h.clone()))?;
            for (u, v) in pairs {
                let ui = g
                    .observed_index(u)
                    .ok_or_else(|| GraphError::UnknownNode(u.clone()))?;
                let vi = g
                    .observed_index(v)
                    .ok_or_else(|| GraphError::UnknownNode(v.clone()))?;
                sets[hi].push((ui, vi));
            }
        }
        Ok(ValidCollection::new(sets))
    }
}

/// Maximum valid collection by integral max-flow:
/// source -> h (capacity |ch(h)|), h -> pair (1), pair -> sink (1).
pub fn max_valid_collection(g: &FactorGraph) -> (ValidCollection, usize) {
    let m = g.m();
    let mut pair_node: HashMap<(usize, usize), usize> = HashMap::new();
    for h in 0..m {
        for pair in g.pair_class(h) {
            let next = 1 + m + pair_node.len();
            pair_node.entry(pair).or_insert(next);
        }
    }
    let sink = 1 + m + pair_node.len();
    let mut net = FlowNetwork::new(sink + 1);
    let mut arcs = Vec::new();
    for h in 0..m {
        net.add_arc(0, 1 + h, g.children(h).len() as u32);
        for pair in g.pair_class(h) {
            arcs.push((h, pair, net.add_arc(1 + h, pair_node[&pair], 1)));
        }
    }
    let mut ordered: Vec<(&(usize, usize), &usize)> = pair_node.iter().collect();
    ordered.sort_unstable();
    for (_, &node) in ordered {
        net.add_arc(node, sink, 1);
    }
    let value = net.max_flow(0, sink) as usize;
    let mut sets = vec![Vec::new(); m];
    for (h, pair, arc) in arcs {
        if net.flow_on(arc) == 1 {
            sets[h].push(pair);
        }
    }
    (ValidCollection::new(sets), value)
}

/// `p` plus the maximum valid collection size.
pub fn upper_bound(g: &FactorGraph) -> usize {
    g.p() + max_valid_collection(g).1
}

/// `p(p+1)/2` minus the number of pairs without joint parents.
pub fn zero_pattern_bound(g: &FactorGraph) -> usize {
    let nonzero = g
        .all_pairs()
        .into_iter()
        .filter(|&(u, v)| !g.joint_parents(u, v).is_empty())
        .count();
    g.p() + nonzero
}

pub fn expected_dimension(g: &FactorGraph) -> usize {
    g.expected_dimension()
}

/// Largest valid collection containing every forced set `{v_i, w}`, `w` a sibling of `v_i` under `h_i`.
///
/// Forced sets use `|ch(h_i)| - 1` slots of each latent node; the remaining slot is
/// filled by a maximum matching of latent nodes to unforced pairs of their children.
pub fn max_zuta_collection(
    g: &FactorGraph,
    lab: &ZutaLabeling,
) -> Result<(ValidCollection, usize), DimensionError> {
    lab.validate(g).map_err(DimensionError::InvalidLabeling)?;
    let m = g.m();
    let mut sets = vec![Vec::new(); m];
    let mut forced = BTreeSet::new();
    for (&h, &w) in lab.latent_order.iter().zip(&lab.witness) {
        for &u in g.children(h) {
            if u != w {
                let pair = (u.min(w), u.max(w));
                sets[h].push(pair);
                forced.insert(pair);
            }
        }
    }
    let mut pair_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|h| {
            g.pair_class(h)
                .into_iter()
                .filter(|p| !forced.contains(p))
                .map(|p| {
                    *pair_index.entry(p).or_insert_with(|| {
                        pairs.push(p);
                        pairs.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    for (h, partner) in max_bipartite_matching(&adj, pairs.len())
        .into_iter()
        .enumerate()
    {
        if let Some(r) = partner {
            sets[h].push(pairs[r]);
        }
    }
    let c = ValidCollection::new(sets);
    let sum = c.sum();
    Ok((c, sum))
}

/// Whether the labeling search behind a lower bound was complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerStatus {
    /// Every labeling was examined, or the value met the upper bound.
    Exhaustive,
    /// The labeling budget ran out first.
    BudgetTruncated,
    /// The graph admits no ZUTA labeling.
    NotZuta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBound {
    pub value: usize,
    pub labeling: ZutaLabeling,
    pub collection: ValidCollection,
    pub status: LowerStatus,
    pub labelings_examined: usize,
}

/// Best ZUTA-compliant collection over at most `budget` labelings.
pub fn best_lower_bound(g: &FactorGraph, budget: usize) -> Option<LowerBound> {
    let ceiling = max_valid_collection(g).1;
    let mut best: Option<(usize, ZutaLabeling, ValidCollection)> = None;
    let mut examined = 0;
    let mut truncated = false;
    let mut optimal = false;
    visit_zuta_labelings(g, |lab| {
        if examined == budget {
            truncated = true;
            return false;
        }
        examined += 1;
        let (c, sum) = max_zuta_collection(g, lab).expect("search yields valid labelings");
        if best.as_ref().is_none_or(|(s, _, _)| sum > *s) {
            best = Some((sum, lab.clone(), c));
        }
        optimal = sum == ceiling;
        !optimal
    });
    let (sum, labeling, collection) = best?;
    let status = if truncated && !optimal {
        LowerStatus::BudgetTruncated
    } else {
        LowerStatus::Exhaustive
    };
    Some(LowerBound {
        value: g.p() + sum,
        labeling,
        collection,
        status,
        labelings_examined: examined,
    })
}

/// `p` plus the best ZUTA-compliant collection size; absent for non-ZUTA graphs.
pub fn lower_bound(g: &FactorGraph, labeling_budget: usize) -> Option<usize> {
    best_lower_bound(g, labeling_budget).map(|lb| lb.value)
}

/// Lower-bound certificate in label form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerWitness {
    pub labeling: LabeledZuta,
    pub collection: LabeledCollection,
}

/// Combinatorial bounds only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub expected: usize,
    pub zero_pattern_bound: usize,
    pub upper: usize,
    pub lower: Option<usize>,
    pub lower_status: LowerStatus,
    pub witness_upper: LabeledCollection,
    pub witness_lower: Option<LowerWitness>,
}

/// Bounds together with the Jacobian-rank dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub expected: usize,
    pub zero_pattern_bound: usize,
    pub upper: usize,
    pub lower: Option<usize>,
    pub lower_status: LowerStatus,
    pub exact: usize,
    pub exact_is_probabilistic: bool,
    pub defective: bool,
    pub trials: usize,
    pub seed: u64,
    pub witness_upper: LabeledCollection,
    pub witness_lower: Option<LowerWitness>,
}

pub fn bounds_report(g: &FactorGraph, labeling_budget: usize) -> BoundsReport {
    let (upper_witness, sum) = max_valid_collection(g);
    let lb = best_lower_bound(g, labeling_budget);
    BoundsReport {
        expected: g.expected_dimension(),
        zero_pattern_bound: zero_pattern_bound(g),
        upper: g.p() + sum,
        lower: lb.as_ref().map(|l| l.value),
        lower_status: lb.as_ref().map_or(LowerStatus::NotZuta, |l| l.status),
        witness_upper: upper_witness.to_labeled(g),
        witness_lower: lb.map(|l| LowerWitness {
            labeling: l.labeling.to_labeled(g),
            collection: l.collection.to_labeled(g),
        }),
    }
}

pub fn dimension_report(
    g: &FactorGraph,
    trials: usize,
    seed: u64,
    labeling_budget: usize,
) -> DimensionReport {
    let b = bounds_report(g, labeling_budget);
    let trials = trials.max(1);
    let exact = model_dimension(g, trials, seed);
    DimensionReport {
        expected: b.expected,
        zero_pattern_bound: b.zero_pattern_bound,
        upper: b.upper,
        lower: b.lower,
        lower_status: b.lower_status,
        exact,
        exact_is_probabilistic: true,
        defective: exact < b.expected,
        trials,
        seed,
        witness_upper: b.witness_upper,
        witness_lower: b.witness_lower,
    }
}
