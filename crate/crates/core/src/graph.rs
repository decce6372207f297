//! Factor analysis graphs: latent nodes with edges into observed nodes.
//!
//! Nodes are identified by their labels; positions in the declared lists give
//! the canonical node order used by every index-based query.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use log::warn;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("edge [{0:?}, {1:?}] must join a declared latent node to a declared observed node")]
    DanglingEdge(String, String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    observed: Vec<String>,
    latent: Vec<String>,
    edges: Vec<(String, String)>,
}

/// Bipartite graph with edges from latent nodes to observed nodes.
///
/// Every latent node has at least one child; observed nodes may be parentless.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    observed: Vec<String>,
    latent: Vec<String>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    warnings: Vec<String>,
}

impl FactorGraph {
    /// Validates labels and edges `(latent, observed)`; childless latent nodes are dropped with a warning.
    pub fn new<S: AsRef<str>>(
        observed: &[S],
        latent: &[S],
        edges: &[(S, S)],
    ) -> Result<FactorGraph, GraphError> {
        if observed.is_empty() {
            return Err(GraphError::Schema(
                "at least one observed node is required".into(),
            ));
        }
        let mut seen = HashSet::new();
        for label in observed.iter().chain(latent) {
            if !seen.insert(label.as_ref()) {
                return Err(GraphError::DuplicateLabel(label.as_ref().to_string()));
            }
        }
        let obs_index: HashMap<&str, usize> = observed
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_ref(), i))
            .collect();
        let lat_index: HashMap<&str, usize> = latent
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_ref(), i))
            .collect();
        let mut children = vec![Vec::new(); latent.len()];
        for (h, v) in edges {
            let (h, v) = (h.as_ref(), v.as_ref());
            match (lat_index.get(h), obs_index.get(v)) {
                (Some(&hi), Some(&vi)) => children[hi].push(vi),
                _ => return Err(GraphError::DanglingEdge(h.to_string(), v.to_string())),
            }
        }
        let mut warnings = Vec::new();
        let mut kept_latent = Vec::new();
        let mut kept_children = Vec::new();
        for (label, mut ch) in latent.iter().zip(children) {
            if ch.is_empty() {
                let msg = format!(
                    "latent node {:?} has no children and was dropped",
                    label.as_ref()
                );
                warn!("{msg}");
                warnings.push(msg);
                continue;
            }
            ch.sort_unstable();
            ch.dedup();
            kept_latent.push(label.as_ref().to_string());
            kept_children.push(ch);
        }
        let mut parents = vec![Vec::new(); observed.len()];
        for (h, ch) in kept_children.iter().enumerate() {
            for &v in ch {
                parents[v].push(h);
            }
        }
        Ok(FactorGraph {
            observed: observed.iter().map(|s| s.as_ref().to_string()).collect(),
            latent: kept_latent,
            children: kept_children,
            parents,
            warnings,
        })
    }

    /// Parses `{"observed": [...], "latent": [...], "edges": [[latent, observed], ...]}`.
    pub fn from_json(text: &str) -> Result<FactorGraph, GraphError> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| GraphError::Schema(e.to_string()))?;
        FactorGraph::new(&doc.observed, &doc.latent, &doc.edges)
    }

    /// Canonical JSON document; edges sorted by latent, then observed.
    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            observed: self.observed.clone(),
            latent: self.latent.clone(),
            edges: self
                .edges()
                .map(|(h, v)| (self.latent[h].clone(), self.observed[v].clone()))
                .collect(),
        };
        serde_json::to_string(&doc).expect("plain strings serialize")
    }

    /// Graph on observed `v1..vp` and latent `h1..hm` with one-based child lists.
    pub fn from_children(p: usize, children: &[&[usize]]) -> FactorGraph {
        let observed: Vec<String> = (1..=p).map(|i| format!("v{i}")).collect();
        let latent: Vec<String> = (1..=children.len()).map(|i| format!("h{i}")).collect();
        let edges: Vec<(String, String)> = children
            .iter()
            .enumerate()
            .flat_map(|(h, ch)| {
                ch.iter()
                    .map(move |&v| (format!("h{}", h + 1), format!("v{v}")))
            })
            .collect();
        FactorGraph::new(&observed, &latent, &edges).expect("well-formed child lists")
    }

    /// Copy with one more edge `latent -> observed` (indices).
    pub fn with_edge(&self, h: usize, v: usize) -> FactorGraph {
        let mut edges: Vec<(String, String)> = self
            .edges()
            .map(|(a, b)| (self.latent[a].clone(), self.observed[b].clone()))
            .collect();
        edges.push((self.latent[h].clone(), self.observed[v].clone()));
        FactorGraph::new(&self.observed, &self.latent, &edges).expect("existing labels")
    }

    /// Number of observed nodes.
    pub fn p(&self) -> usize {
        self.observed.len()
    }

    /// Number of latent nodes.
    pub fn m(&self) -> usize {
        self.latent.len()
    }

    pub fn num_edges(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    pub fn observed_labels(&self) -> &[String] {
        &self.observed
    }

    pub fn latent_labels(&self) -> &[String] {
        &self.latent
    }

    pub fn observed_index(&self, label: &str) -> Option<usize> {
        self.observed.iter().position(|s| s == label)
    }

    pub fn latent_index(&self, label: &str) -> Option<usize> {
        self.latent.iter().position(|s| s == label)
    }

    fn require_observed(&self, label: &str) -> Result<usize, GraphError> {
        self.observed_index(label)
            .ok_or_else(|| GraphError::UnknownNode(label.to_string()))
    }

    pub fn children(&self, h: usize) -> &[usize] {
        &self.children[h]
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn has_edge(&self, h: usize, v: usize) -> bool {
        self.children[h].binary_search(&v).is_ok()
    }

    /// Edges `(latent, observed)` sorted by latent, then observed.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(h, ch)| ch.iter().map(move |&v| (h, v)))
    }

    /// Warnings produced while building the graph.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Latent nodes that are parents of both `u` and `v`, ascending.
    pub fn joint_parents(&self, u: usize, v: usize) -> Vec<usize> {
        let (a, b) = (&self.parents[u], &self.parents[v]);
        a.iter()
            .filter(|h| b.binary_search(h).is_ok())
            .copied()
            .collect()
    }

    /// Joint parents of two observed nodes given by label.
    pub fn jpa(&self, u: &str, v: &str) -> Result<Vec<&str>, GraphError> {
        let (u, v) = (self.require_observed(u)?, self.require_observed(v)?);
        Ok(self
            .joint_parents(u, v)
            .into_iter()
            .map(|h| self.latent[h].as_str())
            .collect())
    }

    /// All pairs `(u, v)`, `u < v`, of children of `h`, lexicographic.
    pub fn pair_class(&self, h: usize) -> Vec<(usize, usize)> {
        let ch = &self.children[h];
        let mut out = Vec::with_capacity(ch.len() * ch.len().saturating_sub(1) / 2);
        for (a, &u) in ch.iter().enumerate() {
            for &v in &ch[a + 1..] {
                out.push((u, v));
            }
        }
        out
    }

    /// Pairs of children of the latent node with the given label.
    pub fn pair_classes(&self, h: &str) -> Result<Vec<(&str, &str)>, GraphError> {
        let h = self
            .latent_index(h)
            .ok_or_else(|| GraphError::UnknownNode(h.to_string()))?;
        Ok(self
            .pair_class(h)
            .into_iter()
            .map(|(u, v)| (self.observed[u].as_str(), self.observed[v].as_str()))
            .collect())
    }

    /// All pairs `(u, v)`, `u < v`, of observed nodes, lexicographic.
    pub fn all_pairs(&self) -> Vec<(usize, usize)> {
        let p = self.p();
        (0..p)
            .flat_map(|u| (u + 1..p).map(move |v| (u, v)))
            .collect()
    }

    /// `min(p + |D|, p(p+1)/2)`.
    pub fn expected_dimension(&self) -> usize {
        let p = self.p();
        (p + self.num_edges()).min(p * (p + 1) / 2)
    }

    pub fn observed_label(&self, v: usize) -> &str {
        &self.observed[v]
    }

    pub fn latent_label(&self, h: usize) -> &str {
        &self.latent[h]
    }
}

/// A latent order `h_1..h_m` with witnesses `v_i` in `ch(h_i)` that no later latent parents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZutaLabeling {
    pub latent_order: Vec<usize>,
    pub witness: Vec<usize>,
}

/// Label-based JSON form of a [`ZutaLabeling`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledZuta {
    pub latent_order: Vec<String>,
    pub witness: IndexMap<String, String>,
}

impl ZutaLabeling {
    /// Checks the permutation, membership and no-later-parent conditions.
    pub fn validate(&self, g: &FactorGraph) -> Result<(), String> {
        let m = g.m();
        if self.latent_order.len() != m || self.witness.len() != m {
            return Err(format!("labeling must cover all {m} latent nodes"));
        }
        let mut seen = vec![false; m];
        for &h in &self.latent_order {
            if h >= m || std::mem::replace(&mut seen[h], true) {
                return Err("latent order is not a permutation".into());
            }
        }
        for (i, (&h, &w)) in self.latent_order.iter().zip(&self.witness).enumerate() {
            if w >= g.p() || !g.has_edge(h, w) {
                return Err(format!(
                    "witness of {} is not one of its children",
                    g.latent_label(h)
                ));
            }
            if let Some(&later) = self.latent_order[i + 1..]
                .iter()
                .find(|&&l| g.has_edge(l, w))
            {
                return Err(format!(
                    "witness {} of {} is also a child of later node {}",
                    g.observed_label(w),
                    g.latent_label(h),
                    g.latent_label(later)
                ));
            }
        }
        Ok(())
    }

    pub fn to_labeled(&self, g: &FactorGraph) -> LabeledZuta {
        LabeledZuta {
            latent_order: self
                .latent_order
                .iter()
                .map(|&h| g.latent_label(h).to_string())
                .collect(),
            witness: self
                .latent_order
                .iter()
                .zip(&self.witness)
                .map(|(&h, &w)| {
                    (
                        g.latent_label(h).to_string(),
                        g.observed_label(w).to_string(),
                    )
                })
                .collect(),
        }
    }

    pub fn from_labeled(doc: &LabeledZuta, g: &FactorGraph) -> Result<ZutaLabeling, GraphError> {
        let unknown = |s: &str| GraphError::UnknownNode(s.to_string());
        let mut latent_order = Vec::new();
        let mut witness = Vec::new();
        for h in &doc.latent_order {
            latent_order.push(g.latent_index(h).ok_or_else(|| unknown(h))?);
            let w = doc
                .witness
                .get(h)
                .ok_or_else(|| GraphError::Schema(format!("no witness for {h:?}")))?;
            witness.push(g.observed_index(w).ok_or_else(|| unknown(w))?);
        }
        Ok(ZutaLabeling {
            latent_order,
            witness,
        })
    }
}

struct ZutaSearch<'a> {
    g: &'a FactorGraph,
    remaining: Vec<bool>,
    coverage: Vec<usize>,
    order: Vec<usize>,
    witness: Vec<usize>,
}

impl ZutaSearch<'_> {
    /// Depth-first over admissible (latent, witness) choices in canonical order;
    /// returns false once the visitor asks to stop.
    fn run<F: FnMut(&ZutaLabeling) -> bool>(&mut self, visit: &mut F) -> bool {
        if self.order.len() == self.g.m() {
            return visit(&ZutaLabeling {
                latent_order: self.order.clone(),
                witness: self.witness.clone(),
            });
        }
        for h in 0..self.g.m() {
            if !self.remaining[h] {
                continue;
            }
            let candidates: Vec<usize> = self
                .g
                .children(h)
                .iter()
                .copied()
                .filter(|&v| self.coverage[v] == 1)
                .collect();
            if candidates.is_empty() {
                continue;
            }
            self.remaining[h] = false;
            for &v in self.g.children(h) {
                self.coverage[v] -= 1;
            }
            self.order.push(h);
            for w in candidates {
                self.witness.push(w);
                let go_on = self.run(visit);
                self.witness.pop();
                if !go_on {
                    return false;
                }
            }
            self.order.pop();
            for &v in self.g.children(h) {
                self.coverage[v] += 1;
            }
            self.remaining[h] = true;
        }
        true
    }
}

/// Visits ZUTA labelings in a fixed order; returns true iff the search ran to completion.
pub fn visit_zuta_labelings<F: FnMut(&ZutaLabeling) -> bool>(
    g: &FactorGraph,
    mut visit: F,
) -> bool {
    let mut search = ZutaSearch {
        g,
        remaining: vec![true; g.m()],
        coverage: (0..g.p()).map(|v| g.parents(v).len()).collect(),
        order: Vec::new(),
        witness: Vec::new(),
    };
    search.run(&mut visit)
}

/// First ZUTA labeling in search order, if the graph admits one.
pub fn zuta_labeling(g: &FactorGraph) -> Option<ZutaLabeling> {
    let mut found = None;
    visit_zuta_labelings(g, |lab| {
        found = Some(lab.clone());
        false
    });
    found
}

/// Up to `limit` distinct ZUTA labelings in search order.
pub fn enumerate_zuta_labelings(g: &FactorGraph, limit: usize) -> Vec<ZutaLabeling> {
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    visit_zuta_labelings(g, |lab| {
        out.push(lab.clone());
        out.len() < limit
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_factor_p7() -> FactorGraph {
        FactorGraph::from_children(7, &[&[1, 2, 3, 4, 5], &[4, 5, 6, 7]])
    }

    #[test]
    fn parses_documents() {
        let g = FactorGraph::from_json(
            r#"{"observed":["v1","v2","v3"],"latent":["h1","h2","h3"],
                "edges":[["h1","v1"],["h1","v2"],["h2","v2"],["h2","v3"]]}"#,
        )
        .unwrap();
        assert_eq!((g.p(), g.m(), g.num_edges()), (3, 2, 4));
        assert_eq!(g.warnings().len(), 1);
        assert!(g.warnings()[0].contains("h3"));
    }

    #[test]
    fn rejects_malformed_documents() {
        let reversed = r#"{"observed":["v1"],"latent":["h1"],"edges":[["v1","h1"]]}"#;
        assert_eq!(
            FactorGraph::from_json(reversed),
            Err(GraphError::DanglingEdge("v1".into(), "h1".into()))
        );
        let dup = r#"{"observed":["a","a"],"latent":[],"edges":[]}"#;
        assert_eq!(
            FactorGraph::from_json(dup),
            Err(GraphError::DuplicateLabel("a".into()))
        );
        let missing = r#"{"observed":["a"],"edges":[]}"#;
        assert!(matches!(
            FactorGraph::from_json(missing),
            Err(GraphError::Schema(_))
        ));
        let bad_type = r#"{"observed":"a","latent":[],"edges":[]}"#;
        assert!(matches!(
            FactorGraph::from_json(bad_type),
            Err(GraphError::Schema(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = two_factor_p7();
        let again = FactorGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, again);
        assert_eq!(g.to_json(), again.to_json());
    }

    #[test]
    fn joint_parents_of_two_factor_p7() {
        let g = two_factor_p7();
        assert_eq!((g.p(), g.m(), g.num_edges()), (7, 2, 9));
        assert_eq!(g.jpa("v4", "v5").unwrap(), vec!["h1", "h2"]);
        assert!(g.jpa("v1", "v7").unwrap().is_empty());
        assert_eq!(g.jpa("v1", "v2").unwrap(), vec!["h1"]);
        assert_eq!(g.jpa("v1", "x"), Err(GraphError::UnknownNode("x".into())));
    }

    #[test]
    fn pair_classes_list_child_pairs() {
        let g = FactorGraph::from_children(6, &[&[1, 2, 3], &[2, 3, 4], &[3, 4, 5, 6]]);
        assert_eq!(
            g.pair_classes("h1").unwrap(),
            vec![("v1", "v2"), ("v1", "v3"), ("v2", "v3")]
        );
        assert_eq!(g.pair_classes("h3").unwrap().len(), 6);
        let single = FactorGraph::from_children(2, &[&[1]]);
        assert!(single.pair_classes("h1").unwrap().is_empty());
    }

    #[test]
    fn zuta_on_two_factor_p7() {
        let g = two_factor_p7();
        let lab = zuta_labeling(&g).unwrap();
        lab.validate(&g).unwrap();
        assert_eq!(lab.latent_order, vec![0, 1]);
        assert_eq!(enumerate_zuta_labelings(&g, 1).len(), 1);
    }

    #[test]
    fn zuta_absent_without_pure_children() {
        let g = FactorGraph::from_children(3, &[&[1, 2, 3], &[1, 2, 3]]);
        assert!(zuta_labeling(&g).is_none());
        assert!(enumerate_zuta_labelings(&g, 10).is_empty());
    }

    #[test]
    fn single_child_latent_is_zuta() {
        let g = FactorGraph::from_children(1, &[&[1]]);
        assert_eq!(
            zuta_labeling(&g).unwrap(),
            ZutaLabeling {
                latent_order: vec![0],
                witness: vec![0]
            }
        );
    }

    #[test]
    fn pure_child_labeling_is_enumerated() {
        let g = FactorGraph::from_children(4, &[&[1, 3, 4], &[3, 4, 2]]);
        let all = enumerate_zuta_labelings(&g, 100);
        assert!(all.contains(&ZutaLabeling {
            latent_order: vec![0, 1],
            witness: vec![0, 1]
        }));
    }

    #[test]
    fn validation_catches_bad_labelings() {
        let g = two_factor_p7();
        let bad = ZutaLabeling {
            latent_order: vec![0, 1],
            witness: vec![3, 5],
        };
        assert!(bad.validate(&g).is_err());
        let not_perm = ZutaLabeling {
            latent_order: vec![0, 0],
            witness: vec![0, 5],
        };
        assert!(not_perm.validate(&g).is_err());
    }

    #[test]
    fn labeled_form_round_trips() {
        let g = two_factor_p7();
        let lab = zuta_labeling(&g).unwrap();
        let doc = lab.to_labeled(&g);
        assert_eq!(ZutaLabeling::from_labeled(&doc, &g).unwrap(), lab);
    }

    #[test]
    fn expected_dimension_caps_at_full_covariance() {
        assert_eq!(two_factor_p7().expected_dimension(), 16);
        let edgeless = FactorGraph::new(&["a", "b", "c"], &[], &[]).unwrap();
        assert_eq!(edgeless.expected_dimension(), 3);
    }
}
