//! Generators of vanishing ideals: zero covariances, tetrads of one-factor
//! models, hexads of two-factor models with two shared children, determinantal
//! minors, and the glued hypergraph describing the initial ideal.

mod hypergraph;
mod minors;
mod one_factor;
mod two_factor;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use hypergraph::{glued_hypergraph, initial_ideal_check, GluedHypergraph, PairLabel};
pub use minors::{hexad_as_minor, m_leq1, off_diagonal_minor, off_diagonal_minors};
pub use one_factor::{
    clique_tetrads, crossing, cyclic_tetrads, one_factor_groebner, one_factor_groebner_with,
    OneFactorSplit,
};
pub use two_factor::{
    chain_embedding, chain_generators, degree_one_monomials, hexad, toric_generators,
    two_factor_groebner, two_factor_split,
};

use crate::algebra::{leading_monomial, Monomial, Polynomial, TermOrder, Variable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantsError {
    #[error("vertex {0} is not in the embedding")]
    UnknownVertex(usize),
    #[error("minor size must be 2 or 3, got {0}")]
    BadSize(usize),
    #[error("expected exactly two latent nodes, found {0}")]
    NotTwoFactor(usize),
    #[error("the latent nodes share {0} children; generator sets are only known for at most two shared children, use the oracle to search for vanishing polynomials instead")]
    OverlapTooLarge(usize),
    #[error("the glued hypergraph needs exactly two shared children, found {0}")]
    OverlapNotTwo(usize),
    #[error("generators and hypergraph come from different graphs")]
    GraphMismatch,
    #[error("latent nodes do not form a chain: {0}")]
    NotAChain(String),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
}

/// Which construction produced a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "thm-two-factor-type-1")]
    TwoFactorMonomial,
    #[serde(rename = "thm-two-factor-type-2")]
    TwoFactorTetrad,
    #[serde(rename = "thm-two-factor-type-3")]
    TwoFactorHexad,
    #[serde(rename = "one-factor-monomial")]
    OneFactorMonomial,
    #[serde(rename = "one-factor-tetrad")]
    OneFactorTetrad,
    #[serde(rename = "small-overlap-monomial")]
    SmallOverlapMonomial,
    #[serde(rename = "small-overlap-tetrad")]
    SmallOverlapTetrad,
    #[serde(rename = "chain-monomial")]
    ChainMonomial,
    #[serde(rename = "chain-tetrad")]
    ChainTetrad,
    #[serde(rename = "chain-hexad")]
    ChainHexad,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::TwoFactorMonomial => "thm-two-factor-type-1",
            Provenance::TwoFactorTetrad => "thm-two-factor-type-2",
            Provenance::TwoFactorHexad => "thm-two-factor-type-3",
            Provenance::OneFactorMonomial => "one-factor-monomial",
            Provenance::OneFactorTetrad => "one-factor-tetrad",
            Provenance::SmallOverlapMonomial => "small-overlap-monomial",
            Provenance::SmallOverlapTetrad => "small-overlap-tetrad",
            Provenance::ChainMonomial => "chain-monomial",
            Provenance::ChainTetrad => "chain-tetrad",
            Provenance::ChainHexad => "chain-hexad",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub poly: Polynomial,
    pub provenance: Provenance,
}

/// Generators grouped by degree, with the term order they are a basis for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub monomials: Vec<Generator>,
    pub tetrads: Vec<Generator>,
    pub hexads: Vec<Generator>,
    pub order: TermOrder,
    /// Number of observed nodes of the source graph.
    pub p: usize,
    /// Shared children of the two latent nodes, when built for two factors.
    pub overlap: Vec<usize>,
}

/// JSON document: polynomials as canonical text, leading term first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub monomials: Vec<String>,
    pub tetrads: Vec<String>,
    pub hexads: Vec<String>,
}

impl GeneratorSet {
    fn empty(order: TermOrder, p: usize, overlap: Vec<usize>) -> Self {
        GeneratorSet {
            monomials: Vec::new(),
            tetrads: Vec::new(),
            hexads: Vec::new(),
            order,
            p,
            overlap,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.monomials
            .iter()
            .chain(&self.tetrads)
            .chain(&self.hexads)
    }

    /// All generators: monomials, then tetrads, then hexads.
    pub fn polynomials(&self) -> Vec<Polynomial> {
        self.iter().map(|g| g.poly.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.monomials.len() + self.tetrads.len() + self.hexads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.iter()
            .filter_map(|g| leading_monomial(&g.poly, &self.order).ok())
            .collect()
    }

    /// Canonical text of one polynomial under this set's order.
    pub fn format(&self, f: &Polynomial) -> String {
        f.format_with(|a, b| self.order.cmp(a, b))
    }

    pub fn to_doc(&self) -> GeneratorDoc {
        let fmt = |gs: &[Generator]| gs.iter().map(|g| self.format(&g.poly)).collect();
        GeneratorDoc {
            monomials: fmt(&self.monomials),
            tetrads: fmt(&self.tetrads),
            hexads: fmt(&self.hexads),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("strings serialize")
    }

    /// One line per generator: kind, provenance tag, polynomial.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (kind, gs) in [
            ("monomial", &self.monomials),
            ("tetrad", &self.tetrads),
            ("hexad", &self.hexads),
        ] {
            for g in gs {
                let _ = writeln!(
                    out,
                    "{kind:<9} {:<22} {}",
                    g.provenance.tag(),
                    self.format(&g.poly)
                );
            }
        }
        out
    }
}

fn sigma_var(u: usize, v: usize) -> Variable {
    Variable::sigma(u, v)
}

fn sigma_poly(u: usize, v: usize) -> Polynomial {
    Polynomial::var(sigma_var(u, v))
}

fn sigma_product(pairs: &[(usize, usize)]) -> Monomial {
    Monomial::product(pairs.iter().map(|&(u, v)| sigma_var(u, v)))
}

/// All `k`-subsets of `items`, lexicographic by position.
fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn go<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}
