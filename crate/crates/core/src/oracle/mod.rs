//! Model sampling, exact vanishing checks and discovery of vanishing polynomials.
//!
//! Discovery interpolates over a random prime: the covariance map is evaluated
//! at random integer loadings, kernels of the resulting evaluation matrices are
//! found modulo the prime, lifted to rationals, and every lifted polynomial is
//! certified by exact symbolic substitution before it is returned.
//!
//! Matrices are split by multidegree, where `s_u_v` has degree `e_u + e_v` in
//! `Z^p`. Rescaling all loadings of node `u` by `t_u` scales `s_u_v` by
//! `t_u t_v`, so the vanishing ideal is homogeneous for this grading and each
//! block can be solved on its own.

mod modular;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    exact_rank, Monomial, Polynomial, Rational, RationalMatrix, Reducer, Variable,
};
use crate::dimension::Loadings;
use crate::graph::FactorGraph;
use crate::invariants::GeneratorSet;
use crate::rng::stream;

pub use modular::{is_prime, lift_bound, rational_reconstruct};

const LOADING_MAX: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{0} is not a covariance variable")]
    NotSigma(Variable),
    #[error("{0} refers to a node outside the graph")]
    OutOfRange(Variable),
    #[error("{monomials} candidate monomials exceed the cap of {cap}")]
    CapExceeded { monomials: usize, cap: usize },
    #[error("no rational lift for a kernel vector of the block with {block} monomials")]
    LiftFailed { block: usize },
}

/// A point of the model: loadings, positive noise variances and the covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSample {
    /// Keyed by `(observed, latent)`.
    pub lambda: Loadings,
    pub omega: Vec<Rational>,
    /// Full symmetric `p x p` covariance `Lambda Lambda^T + diag(omega)`.
    pub sigma: Vec<Vec<Rational>>,
}

impl ModelSample {
    pub fn covariance(&self, u: usize, v: usize) -> &Rational {
        &self.sigma[u][v]
    }
}

/// Integer loadings and noise variances uniform in `[1, 2^20]`.
pub fn sample_model_point(g: &FactorGraph, seed: u64) -> ModelSample {
    let mut rng = stream(seed, 0);
    let mut draw = || Rational::from_integer(rng.random_range(1..=LOADING_MAX).into());
    let lambda: Loadings = g.edges().map(|(h, v)| ((v, h), draw())).collect();
    let omega: Vec<Rational> = (0..g.p()).map(|_| draw()).collect();
    let p = g.p();
    let mut sigma = vec![vec![Rational::zero(); p]; p];
    for (u, row) in sigma.iter_mut().enumerate() {
        for (v, entry) in row.iter_mut().enumerate() {
            *entry = g
                .joint_parents(u, v)
                .into_iter()
                .map(|h| &lambda[&(u, h)] * &lambda[&(v, h)])
                .sum();
            if u == v {
                *entry += &omega[u];
            }
        }
    }
    ModelSample {
        lambda,
        omega,
        sigma,
    }
}

/// Image of each off-diagonal covariance variable as a polynomial in loadings.
pub fn parametrization(g: &FactorGraph) -> BTreeMap<Variable, Polynomial> {
    g.all_pairs()
        .into_iter()
        .map(|(u, v)| (Variable::sigma(u, v), sigma_image(g, u, v)))
        .collect()
}

fn sigma_image(g: &FactorGraph, u: usize, v: usize) -> Polynomial {
    g.joint_parents(u, v)
        .into_iter()
        .map(|h| {
            Polynomial::monomial(Monomial::product([
                Variable::lambda(u, h),
                Variable::lambda(v, h),
            ]))
        })
        .fold(Polynomial::zero(), |acc, t| acc + t)
}

fn check_variable(g: &FactorGraph, v: Variable) -> Result<(usize, usize), OracleError> {
    let (i, j) = v.pair().ok_or(OracleError::NotSigma(v))?;
    if j >= g.p() {
        return Err(OracleError::OutOfRange(v));
    }
    Ok((i, j))
}

/// Whether `f` vanishes identically on the model, by exact substitution.
pub fn verify_vanishes(f: &Polynomial, g: &FactorGraph) -> Result<bool, OracleError> {
    for v in f.variables() {
        check_variable(g, v)?;
    }
    let image = f
        .substitute_with(|v| v.pair().map(|(i, j)| sigma_image(g, i, j)))
        .expect("all variables checked");
    Ok(image.is_zero())
}

/// Parameters of a vanishing-polynomial search.
#[derive(Debug, Clone)]
pub struct VanishingBasisRequest<'g> {
    pub graph: &'g FactorGraph,
    pub degree: u32,
    /// Variables allowed in candidate monomials; all covariance variables if `None`.
    pub support: Option<Vec<Variable>>,
    /// Only degree exactly `degree` instead of every degree in `1..=degree`.
    pub homogeneous_only: bool,
    /// Largest number of candidate monomials.
    pub cap: usize,
    pub seed: u64,
}

impl<'g> VanishingBasisRequest<'g> {
    pub fn new(graph: &'g FactorGraph, degree: u32) -> Self {
        VanishingBasisRequest {
            graph,
            degree,
            support: None,
            homogeneous_only: false,
            cap: 50_000,
            seed: 0,
        }
    }

    pub fn support(mut self, vars: Vec<Variable>) -> Self {
        self.support = Some(vars);
        self
    }

    pub fn homogeneous_only(mut self, yes: bool) -> Self {
        self.homogeneous_only = yes;
        self
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Result of a search; `polynomials` are all certified and linearly independent.
#[derive(Debug, Clone)]
pub struct VanishingBasis {
    pub polynomials: Vec<Polynomial>,
    /// Kernel vectors found modulo the prime, before certification.
    pub found: usize,
    pub certified: usize,
    pub monomials: usize,
    pub prime: u64,
}

fn support_variables(req: &VanishingBasisRequest<'_>) -> Result<Vec<Variable>, OracleError> {
    let vars: Vec<Variable> = match &req.support {
        Some(s) => {
            let mut s = s.clone();
            s.sort();
            s.dedup();
            s
        }
        None => req
            .graph
            .all_pairs()
            .into_iter()
            .map(|(u, v)| Variable::sigma(u, v))
            .collect(),
    };
    for &v in &vars {
        check_variable(req.graph, v)?;
    }
    Ok(vars)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn monomial_count(n: usize, degree: u32, homogeneous_only: bool) -> usize {
    let d = degree as usize;
    if homogeneous_only {
        binomial(n + d - 1, d)
    } else {
        (1..=d)
            .map(|k| binomial(n + k - 1, k))
            .fold(0usize, usize::saturating_add)
    }
}

/// Exponent vectors of degree `d` over `n` variables.
fn exponent_vectors(n: usize, d: u32, out: &mut Vec<Vec<u32>>) {
    fn go(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e;
            go(pos + 1, left - e, cur, out);
        }
    }
    if n > 0 {
        go(0, d, &mut vec![0; n], out);
    }
}

/// Sparse multidegree: `s_u_v` contributes to `u` and `v`, `l_v_h` to `v`.
pub fn multidegree(m: &Monomial) -> Vec<(usize, u32)> {
    let mut deg: BTreeMap<usize, u32> = BTreeMap::new();
    for &(v, e) in m.factors() {
        match v {
            Variable::Sigma(i, j) => {
                *deg.entry(i as usize).or_default() += e;
                *deg.entry(j as usize).or_default() += e;
            }
            Variable::Lambda(i, _) => *deg.entry(i as usize).or_default() += e,
        }
    }
    deg.into_iter().collect()
}

struct Block {
    exponents: Vec<Vec<u32>>,
}

/// Covariance values of one random model point modulo `p`, indexed like `pairs`.
fn sample_values(
    g: &FactorGraph,
    pairs: &[(usize, usize)],
    seed: u64,
    index: u64,
    p: u64,
) -> Vec<u64> {
    let mut rng = stream(seed, index + 1);
    let lambda: BTreeMap<(usize, usize), u64> = g
        .edges()
        .map(|(h, v)| ((v, h), rng.random_range(1..=LOADING_MAX as u64)))
        .collect();
    pairs
        .iter()
        .map(|&(u, v)| {
            g.joint_parents(u, v).into_iter().fold(0, |acc, h| {
                modular::add_mod(
                    acc,
                    modular::mul_mod(lambda[&(u, h)], lambda[&(v, h)], p),
                    p,
                )
            })
        })
        .collect()
}

fn eval_mod(exps: &[u32], values: &[u64], p: u64) -> u64 {
    exps.iter()
        .zip(values)
        .filter(|(&e, _)| e > 0)
        .fold(1, |acc, (&e, &x)| {
            modular::mul_mod(acc, modular::pow_mod(x, u64::from(e), p), p)
        })
}

fn to_rational(residue: u64, p: u64, bound: u64) -> Option<Rational> {
    rational_reconstruct(residue, p, bound)
}

/// Scales to coprime integer coefficients with a positive leading structural term.
fn primitive(f: &Polynomial) -> Polynomial {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, c) in f.terms() {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    if num.is_zero() {
        return f.clone();
    }
    f.scale(&Rational::new(den, num)).sign_normalized()
}

enum BlockOutcome {
    Solved {
        found: usize,
        certified: Vec<Polynomial>,
    },
    LiftFailed(usize),
}

fn solve_block(
    g: &FactorGraph,
    vars: &[Variable],
    block: &Block,
    samples: &[Vec<u64>],
    p: u64,
    bound: u64,
) -> BlockOutcome {
    let n = block.exponents.len();
    let rows = (n * 6).div_ceil(5);
    let matrix: Vec<Vec<u64>> = samples[..rows]
        .iter()
        .map(|vals| {
            block
                .exponents
                .iter()
                .map(|e| eval_mod(e, vals, p))
                .collect()
        })
        .collect();
    let kernel = modular::kernel(matrix, n, p);
    let found = kernel.len();
    let mut certified = Vec::new();
    for vec in kernel {
        let mut terms = Vec::new();
        for (exps, &r) in block.exponents.iter().zip(&vec) {
            if r == 0 {
                continue;
            }
            let Some(c) = to_rational(r, p, bound) else {
                return BlockOutcome::LiftFailed(n);
            };
            let m = Monomial::from_factors(
                vars.iter()
                    .zip(exps)
                    .filter(|(_, &e)| e > 0)
                    .map(|(&v, &e)| (v, e)),
            );
            terms.push((m, c));
        }
        let f = primitive(&Polynomial::from_terms(terms));
        if verify_vanishes(&f, g).expect("support checked") {
            certified.push(f);
        } else {
            log::warn!(
                "discarding uncertified kernel vector with {} terms",
                f.num_terms()
            );
        }
    }
    BlockOutcome::Solved { found, certified }
}

/// Certified vanishing polynomials spanning the ideal in the requested degrees.
pub fn vanishing_basis(req: &VanishingBasisRequest<'_>) -> Result<Vec<Polynomial>, OracleError> {
    vanishing_basis_detailed(req).map(|b| b.polynomials)
}

pub fn vanishing_basis_detailed(
    req: &VanishingBasisRequest<'_>,
) -> Result<VanishingBasis, OracleError> {
    let g = req.graph;
    let vars = support_variables(req)?;
    let prime = modular::random_prime(&mut stream(req.seed, 0));
    let total = if vars.is_empty() || req.degree == 0 {
        0
    } else {
        monomial_count(vars.len(), req.degree, req.homogeneous_only)
    };
    if total > req.cap {
        return Err(OracleError::CapExceeded {
            monomials: total,
            cap: req.cap,
        });
    }
    let degrees = if req.homogeneous_only {
        req.degree..=req.degree
    } else {
        1..=req.degree
    };
    let mut exponents = Vec::with_capacity(total);
    for d in degrees {
        exponent_vectors(vars.len(), d, &mut exponents);
    }
    let pairs: Vec<(usize, usize)> = vars.iter().map(|v| v.pair().expect("sigma")).collect();
    let mut blocks: BTreeMap<Vec<u32>, Block> = BTreeMap::new();
    for e in exponents {
        let mut key = vec![0u32; g.p()];
        for (&x, &(u, v)) in e.iter().zip(&pairs) {
            key[u] += x;
            key[v] += x;
        }
        blocks
            .entry(key)
            .or_insert_with(|| Block {
                exponents: Vec::new(),
            })
            .exponents
            .push(e);
    }
    let max_rows = blocks
        .values()
        .map(|b| (b.exponents.len() * 6).div_ceil(5))
        .max()
        .unwrap_or(0);
    let samples: Vec<Vec<u64>> = (0..max_rows as u64)
        .into_par_iter()
        .map(|i| sample_values(g, &pairs, req.seed, i, prime))
        .collect();
    let bound = lift_bound(prime);
    let outcomes: Vec<BlockOutcome> = blocks
        .values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|b| solve_block(g, &vars, b, &samples, prime, bound))
        .collect();
    let mut out = VanishingBasis {
        polynomials: Vec::new(),
        found: 0,
        certified: 0,
        monomials: total,
        prime,
    };
    for o in outcomes {
        match o {
            BlockOutcome::LiftFailed(block) => return Err(OracleError::LiftFailed { block }),
            BlockOutcome::Solved { found, certified } => {
                out.found += found;
                out.certified += certified.len();
                out.polynomials.extend(certified);
            }
        }
    }
    Ok(out)
}

/// How a candidate generating set fares against discovered vanishing polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub found: usize,
    pub certified: usize,
    pub reduced_to_zero: usize,
    /// Certified polynomials with a nonzero remainder, at most ten.
    pub irreducible_examples: Vec<String>,
}

impl ReductionReport {
    pub fn all_reduce(&self) -> bool {
        self.reduced_to_zero == self.certified
    }
}

/// Reduces every discovered polynomial modulo `candidate` under its own order.
pub fn reduction_evidence(
    candidate: &GeneratorSet,
    req: &VanishingBasisRequest<'_>,
) -> Result<ReductionReport, OracleError> {
    let basis = vanishing_basis_detailed(req)?;
    let gens = candidate.polynomials();
    let reducer = Reducer::new(&gens, &candidate.order);
    let remainders: Vec<bool> = basis
        .polynomials
        .par_iter()
        .map(|f| reducer.reduce(f).is_zero())
        .collect();
    let irreducible_examples = basis
        .polynomials
        .iter()
        .zip(&remainders)
        .filter(|(_, &zero)| !zero)
        .take(10)
        .map(|(f, _)| candidate.format(f))
        .collect();
    Ok(ReductionReport {
        found: basis.found,
        certified: basis.certified,
        reduced_to_zero: remainders.iter().filter(|&&z| z).count(),
        irreducible_examples,
    })
}

fn split_by_multidegree(f: &Polynomial) -> BTreeMap<Vec<(usize, u32)>, Polynomial> {
    let mut parts: BTreeMap<Vec<(usize, u32)>, Polynomial> = BTreeMap::new();
    for (m, c) in f.terms() {
        parts
            .entry(multidegree(m))
            .or_insert_with(Polynomial::zero)
            .add_term(m.clone(), c.clone());
    }
    parts
}

fn rank_of(polys: &[&Polynomial]) -> usize {
    let mut cols: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for f in polys {
        for m in f.monomials() {
            let next = cols.len();
            cols.entry(m).or_insert(next);
        }
    }
    let mut a = RationalMatrix::zeros(polys.len(), cols.len());
    for (r, f) in polys.iter().enumerate() {
        for (m, c) in f.terms() {
            a.set(r, cols[m], c.clone());
        }
    }
    exact_rank(&a)
}

type Multidegree = Vec<(usize, u32)>;

/// Whether `f` is a rational linear combination of `basis`.
pub fn in_span(f: &Polynomial, basis: &[Polynomial]) -> bool {
    if f.is_zero() {
        return true;
    }
    let graded: Option<Vec<(Multidegree, &Polynomial)>> = basis
        .iter()
        .filter(|b| !b.is_zero())
        .map(|b| {
            let parts = split_by_multidegree(b);
            (parts.len() == 1).then(|| (parts.into_keys().next().expect("one part"), b))
        })
        .collect();
    let Some(graded) = graded else {
        let mut all: Vec<&Polynomial> = basis.iter().collect();
        let r = rank_of(&all);
        all.push(f);
        return rank_of(&all) == r;
    };
    split_by_multidegree(f).into_iter().all(|(deg, part)| {
        let mut same: Vec<&Polynomial> = graded
            .iter()
            .filter(|(d, _)| *d == deg)
            .map(|(_, b)| *b)
            .collect();
        let r = rank_of(&same);
        same.push(&part);
        rank_of(&same) == r
    })
}

/// Largest absolute numerator or denominator among the coefficients.
pub fn coefficient_height(f: &Polynomial) -> BigInt {
    f.terms()
        .map(|(_, c)| c.numer().abs().max(c.denom().abs()))
        .max()
        .unwrap_or_else(BigInt::zero)
}
