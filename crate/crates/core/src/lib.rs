//! Exact algebra for sparse factor analysis models.
//!
//! A model is a bipartite graph with edges from latent to observed nodes. The
//! crate computes dimension bounds and the generic model dimension, builds
//! Gröbner generators of the vanishing ideal for two latent factors, and
//! discovers further vanishing polynomials by exact interpolation.

pub mod algebra;
pub mod dimension;
pub mod graph;
pub mod invariants;
pub mod oracle;
pub mod rng;

pub use algebra::{Monomial, Polynomial, Rational, TermOrder, TieBreak, Variable};
pub use graph::{FactorGraph, GraphError, ZutaLabeling};
