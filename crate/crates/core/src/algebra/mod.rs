//! Exact rationals, sparse polynomials in covariance and loading variables,
//! circular term orders, multivariate division and exact matrix rank.

mod division;
mod matrix;
mod order;
mod poly;

pub use division::{
    first_failing_pair, is_groebner_basis, leading_monomial, leading_term, reduce, reduce_tails,
    s_polynomial, Reducer,
};
pub use matrix::{exact_rank, RationalMatrix};
pub use order::{OrderKey, TermOrder, TieBreak};
pub use poly::{sigma, Monomial, ParseError, Polynomial, Variable, MAX_INDEX};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("the zero polynomial has no leading term")]
    ZeroPolynomial,
    #[error("no value assigned to {0}")]
    MissingAssignment(Variable),
    #[error("vertex {0} appears twice in the embedding")]
    DuplicateVertex(usize),
    #[error("index {0} exceeds the supported range")]
    IndexOutOfRange(usize),
}

/// Integer as a rational.
pub fn int(x: i64) -> Rational {
    Rational::from_integer(x.into())
}
