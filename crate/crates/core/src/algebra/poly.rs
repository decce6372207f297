use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Rational};

/// Largest accepted node index; keeps variable ranks inside 32 bits.
pub const MAX_INDEX: usize = 4095;

/// A ring variable: an off-diagonal covariance entry or a loading.
///
/// Indices are zero-based positions in the graph's canonical node order.
/// `Sigma(i, j)` always has `i < j`; `Lambda(v, h)` is observed `v`, latent `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    Sigma(u32, u32),
    Lambda(u32, u32),
}

impl Variable {
    /// The covariance variable of an unordered pair of distinct observed nodes.
    pub fn sigma(a: usize, b: usize) -> Variable {
        assert!(a != b, "sigma variable needs two distinct nodes");
        assert!(a.max(b) <= MAX_INDEX, "node index out of range");
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Variable::Sigma(i as u32, j as u32)
    }

    pub fn lambda(v: usize, h: usize) -> Variable {
        assert!(v.max(h) <= MAX_INDEX, "node index out of range");
        Variable::Lambda(v as u32, h as u32)
    }

    /// The pair of a sigma variable.
    pub fn pair(self) -> Option<(usize, usize)> {
        match self {
            Variable::Sigma(i, j) => Some((i as usize, j as usize)),
            Variable::Lambda(..) => None,
        }
    }

    pub fn is_sigma(self) -> bool {
        matches!(self, Variable::Sigma(..))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Variable::Sigma(i, j) => write!(f, "s_{}_{}", i + 1, j + 1),
            Variable::Lambda(v, h) => write!(f, "l_{}_{}", v + 1, h + 1),
        }
    }
}

/// A power product with strictly positive exponents, sorted by variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(Variable, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Variable) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    /// Builds a monomial from arbitrary factors, merging repeats and dropping zero exponents.
    pub fn from_factors<I: IntoIterator<Item = (Variable, u32)>>(factors: I) -> Monomial {
        let mut map: BTreeMap<Variable, u32> = BTreeMap::new();
        for (v, e) in factors {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    /// Product of the given variables, each to the first power (repeats raise the exponent).
    pub fn product<I: IntoIterator<Item = Variable>>(vars: I) -> Monomial {
        Monomial::from_factors(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn factors(&self) -> &[(Variable, u32)] {
        &self.0
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn exponent(&self, v: Variable) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn merge(&self, other: &Monomial, f: impl Fn(u32, u32) -> u32) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let (v, e) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                (a[i - 1].0, f(a[i - 1].1, 0))
            } else if i == a.len() || b[j].0 < a[i].0 {
                j += 1;
                (b[j - 1].0, f(0, b[j - 1].1))
            } else {
                i += 1;
                j += 1;
                (a[i - 1].0, f(a[i - 1].1, b[j - 1].1))
            };
            if e > 0 {
                out.push((v, e));
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.merge(other, |x, y| x + y)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        self.merge(other, u32::max)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|&(v, e)| other.exponent(v) >= e)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(other.merge(self, |x, y| x - y))
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().all(|&(v, _)| other.exponent(v) == 0)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A sparse polynomial with exact rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Polynomial {
        Polynomial::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn var(v: Variable) -> Polynomial {
        Polynomial::term(Monomial::var(v), Rational::one())
    }

    pub fn monomial(m: Monomial) -> Polynomial {
        Polynomial::term(m, Rational::one())
    }

    /// Sums the given terms, combining like monomials.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Integer-coefficient shorthand used by constructors and tests.
    pub fn from_int_terms<I: IntoIterator<Item = (i64, Monomial)>>(terms: I) -> Polynomial {
        Polynomial::from_terms(
            terms
                .into_iter()
                .map(|(c, m)| (m, Rational::from_integer(BigInt::from(c)))),
        )
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending structural monomial order.
    pub fn terms(
        &self,
    ) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    /// Maximum total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.terms.keys().flat_map(|m| m.variables()).collect()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// `c * m * self`.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Replaces every variable by a polynomial.
    pub fn substitute(
        &self,
        assignment: &BTreeMap<Variable, Polynomial>,
    ) -> Result<Polynomial, AlgebraError> {
        self.substitute_with(|v| assignment.get(&v).cloned())
    }

    /// Substitution driven by a lookup; unassigned variables are an error.
    pub fn substitute_with<F>(&self, lookup: F) -> Result<Polynomial, AlgebraError>
    where
        F: Fn(Variable) -> Option<Polynomial>,
    {
        let mut images: BTreeMap<Variable, Vec<Polynomial>> = BTreeMap::new();
        for v in self.variables() {
            let img = lookup(v).ok_or(AlgebraError::MissingAssignment(v))?;
            images.insert(v, vec![Polynomial::one(), img]);
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut prod = Polynomial::constant(c.clone());
            for &(v, e) in m.factors() {
                let powers = images.get_mut(&v).expect("image computed above");
                while powers.len() <= e as usize {
                    let next = &powers[powers.len() - 1] * &powers[1];
                    powers.push(next);
                }
                prod = &prod * &powers[e as usize];
                if prod.is_zero() {
                    break;
                }
            }
            out = out + prod;
        }
        Ok(out)
    }

    /// Evaluates at a point; unassigned variables are an error.
    pub fn evaluate<F>(&self, value: F) -> Result<Rational, AlgebraError>
    where
        F: Fn(Variable) -> Option<Rational>,
    {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = value(v).ok_or(AlgebraError::MissingAssignment(v))?;
                t *= num_traits::pow(x, e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Multiplies by ±1 so the structurally largest monomial has a positive coefficient.
    pub fn sign_normalized(&self) -> Polynomial {
        match self.terms.iter().next_back() {
            Some((_, c)) if c.is_negative() => -self.clone(),
            _ => self.clone(),
        }
    }

    /// Scales to make the structurally largest coefficient one.
    pub fn monic(&self) -> Polynomial {
        match self.terms.iter().next_back() {
            Some((_, c)) => self.scale(&c.recip()),
            None => Polynomial::zero(),
        }
    }

    /// Canonical text with terms in the supplied descending order.
    pub fn format_with<F>(&self, mut cmp: F) -> String
    where
        F: FnMut(&Monomial, &Monomial) -> std::cmp::Ordering,
    {
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| cmp(b.0, a.0));
        format_terms(&terms)
    }
}

fn format_terms(terms: &[(&Monomial, &Rational)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (idx, (m, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        match (idx, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        let a = c.abs();
        if m.is_one() {
            s.push_str(&a.to_string());
        } else if a.is_one() {
            s.push_str(&m.to_string());
        } else {
            s.push_str(&format!("{a}*{m}"));
        }
    }
    s
}

impl fmt::Display for Polynomial {
    /// Terms in descending structural order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(&Monomial, &Rational)> = self.terms.iter().rev().collect();
        f.write_str(&format_terms(&terms))
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.clone() + rhs.clone()
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.clone() - rhs.clone()
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

/// Position-tagged failure while reading polynomial text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected {found} at offset {offset}")]
    Unexpected { offset: usize, found: String },
    #[error("diagonal variable s_{0}_{0} is not allowed")]
    DiagonalVariable(usize),
    #[error("index {index} at offset {offset} is out of range")]
    BadIndex { offset: usize, index: usize },
    #[error("division by zero at offset {0}")]
    ZeroDenominator(usize),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self) -> ParseError {
        let found = match self.src.get(self.pos) {
            Some(&b) => format!("'{}'", b as char),
            None => "end of input".to_string(),
        };
        ParseError::Unexpected {
            offset: self.pos,
            found,
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.src.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn digits(&mut self) -> Result<&'a str, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected());
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        let offset = self.pos;
        let text = self.digits()?;
        let index: usize = text.parse().map_err(|_| ParseError::BadIndex {
            offset,
            index: usize::MAX,
        })?;
        if index == 0 || index > MAX_INDEX + 1 {
            return Err(ParseError::BadIndex { offset, index });
        }
        Ok(index - 1)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(b) if b.is_ascii_digit() => {
                let num: BigInt = self.digits()?.parse().expect("digits");
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let offset = self.pos;
                    let den: BigInt = self.digits()?.parse().expect("digits");
                    if den.is_zero() {
                        return Err(ParseError::ZeroDenominator(offset));
                    }
                    Ok(Polynomial::constant(Rational::new(num, den)))
                } else {
                    Ok(Polynomial::constant(Rational::from_integer(num)))
                }
            }
            Some(kind @ (b's' | b'l')) => {
                self.pos += 1;
                self.expect(b'_')?;
                let a = self.index()?;
                self.expect(b'_')?;
                let b = self.index()?;
                let v = if kind == b's' {
                    if a == b {
                        return Err(ParseError::DiagonalVariable(a + 1));
                    }
                    Variable::sigma(a, b)
                } else {
                    Variable::lambda(a, b)
                };
                let mut exp = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let offset = self.pos;
                    exp = self.digits()?.parse().map_err(|_| ParseError::BadIndex {
                        offset,
                        index: usize::MAX,
                    })?;
                }
                Ok(Polynomial::monomial(Monomial::var(v).pow(exp)))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn polynomial(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = Polynomial::zero();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                None if !first => break,
                _ if first => false,
                _ => return Err(self.unexpected()),
            };
            let t = self.term()?;
            acc = if negative { acc - t } else { acc + t };
            first = false;
        }
        Ok(acc)
    }
}

impl FromStr for Polynomial {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Polynomial, ParseError> {
        let mut parser = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let p = parser.polynomial()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.unexpected());
        }
        Ok(p)
    }
}

/// `s_ij` shorthand with one-based indices.
pub fn sigma(i: usize, j: usize) -> Polynomial {
    Polynomial::var(Variable::sigma(i - 1, j - 1))
}
