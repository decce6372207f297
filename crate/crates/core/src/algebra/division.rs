use std::collections::BTreeMap;

use num_traits::Zero;

use super::order::{OrderKey, TermOrder};
use super::poly::{Monomial, Polynomial};
use super::{AlgebraError, Rational};

/// Largest term of `f` under `ord`.
pub fn leading_term(f: &Polynomial, ord: &TermOrder) -> Result<(Monomial, Rational), AlgebraError> {
    f.terms()
        .max_by_key(|(m, _)| ord.key(m))
        .map(|(m, c)| (m.clone(), c.clone()))
        .ok_or(AlgebraError::ZeroPolynomial)
}

pub fn leading_monomial(f: &Polynomial, ord: &TermOrder) -> Result<Monomial, AlgebraError> {
    leading_term(f, ord).map(|(m, _)| m)
}

struct Divisor {
    lead: Monomial,
    lead_coeff: Rational,
    tail: Vec<(Monomial, Rational)>,
}

impl Divisor {
    fn new(g: &Polynomial, ord: &TermOrder) -> Option<Divisor> {
        let (lead, lead_coeff) = leading_term(g, ord).ok()?;
        let tail = g
            .terms()
            .filter(|(m, _)| **m != lead)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Some(Divisor {
            lead,
            lead_coeff,
            tail,
        })
    }
}

/// Working polynomial sorted by the order so the leading term is the last entry.
struct Ordered<'a> {
    ord: &'a TermOrder,
    terms: BTreeMap<OrderKey, (Monomial, Rational)>,
}

impl<'a> Ordered<'a> {
    fn new(f: &Polynomial, ord: &'a TermOrder) -> Self {
        let terms = f
            .terms()
            .map(|(m, c)| (ord.key(m), (m.clone(), c.clone())))
            .collect();
        Ordered { ord, terms }
    }

    fn add(&mut self, m: Monomial, c: Rational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(self.ord.key(&m)) {
            Entry::Vacant(e) => {
                e.insert((m, c));
            }
            Entry::Occupied(mut e) => {
                let sum = &e.get().1 + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.get_mut().1 = sum;
                }
            }
        }
    }

    fn pop_lead(&mut self) -> Option<(Monomial, Rational)> {
        self.terms.pop_last().map(|(_, t)| t)
    }
}

fn reduce_with(f: &Polynomial, divisors: &[Divisor], ord: &TermOrder) -> Polynomial {
    let mut work = Ordered::new(f, ord);
    let mut remainder = Polynomial::zero();
    while let Some((m, c)) = work.pop_lead() {
        let hit = divisors
            .iter()
            .find_map(|d| d.lead.quotient_of(&m).map(|q| (d, q)));
        match hit {
            Some((d, q)) => {
                let factor = &c / &d.lead_coeff;
                for (t, a) in &d.tail {
                    work.add(t.mul(&q), -(&factor * a));
                }
            }
            None => remainder.add_term(m, c),
        }
    }
    remainder
}

/// Full remainder of `f` on division by `basis`; divisors are tried in basis order.
pub fn reduce(f: &Polynomial, basis: &[Polynomial], ord: &TermOrder) -> Polynomial {
    let divisors: Vec<Divisor> = basis.iter().filter_map(|g| Divisor::new(g, ord)).collect();
    reduce_with(f, &divisors, ord)
}

/// Reusable divisor set for many reductions against one basis.
pub struct Reducer<'a> {
    ord: &'a TermOrder,
    divisors: Vec<Divisor>,
}

impl<'a> Reducer<'a> {
    pub fn new(basis: &[Polynomial], ord: &'a TermOrder) -> Self {
        let divisors = basis.iter().filter_map(|g| Divisor::new(g, ord)).collect();
        Reducer { ord, divisors }
    }

    pub fn reduce(&self, f: &Polynomial) -> Polynomial {
        reduce_with(f, &self.divisors, self.ord)
    }
}

/// S-polynomial with monic leading terms; zero if either input is zero.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, ord: &TermOrder) -> Polynomial {
    let (Ok((mf, cf)), Ok((mg, cg))) = (leading_term(f, ord), leading_term(g, ord)) else {
        return Polynomial::zero();
    };
    let l = mf.lcm(&mg);
    let qf = mf.quotient_of(&l).expect("lcm is a multiple");
    let qg = mg.quotient_of(&l).expect("lcm is a multiple");
    f.mul_term(&qf, &cf.recip()) - g.mul_term(&qg, &cg.recip())
}

/// Buchberger's criterion: every S-pair reduces to zero. Pairs with coprime
/// leading monomials are skipped since they always reduce to zero.
pub fn is_groebner_basis(basis: &[Polynomial], ord: &TermOrder) -> bool {
    first_failing_pair(basis, ord).is_none()
}

/// Indices of the first S-pair with a nonzero remainder, with that remainder.
pub fn first_failing_pair(
    basis: &[Polynomial],
    ord: &TermOrder,
) -> Option<(usize, usize, Polynomial)> {
    let nonzero: Vec<(usize, &Polynomial)> = basis
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_zero())
        .collect();
    let leads: Vec<Monomial> = nonzero
        .iter()
        .map(|(_, g)| leading_monomial(g, ord).expect("nonzero"))
        .collect();
    let reducer = Reducer::new(basis, ord);
    for a in 0..nonzero.len() {
        for b in a + 1..nonzero.len() {
            if leads[a].is_coprime(&leads[b]) {
                continue;
            }
            let s = s_polynomial(nonzero[a].1, nonzero[b].1, ord);
            let r = reducer.reduce(&s);
            if !r.is_zero() {
                return Some((nonzero[a].0, nonzero[b].0, r));
            }
        }
    }
    None
}

/// Replaces the non-leading part of each generator by its remainder modulo the others.
pub fn reduce_tails(gens: &[Polynomial], ord: &TermOrder) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = gens.to_vec();
    for i in 0..out.len() {
        let Ok((m, c)) = leading_term(&out[i], ord) else {
            continue;
        };
        let lead = Polynomial::term(m, c);
        let tail = &out[i] - &lead;
        let others: Vec<Polynomial> = out
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        out[i] = lead + reduce(&tail, &others, ord);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::sigma;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    fn k5_tetrads() -> Vec<Polynomial> {
        let mut out = Vec::new();
        for i in 1..=5 {
            for j in i + 1..=5 {
                for k in j + 1..=5 {
                    for l in k + 1..=5 {
                        let cross = &sigma(i, k) * &sigma(j, l);
                        out.push(&(&sigma(i, j) * &sigma(k, l)) - &cross);
                        out.push(&(&sigma(i, l) * &sigma(j, k)) - &cross);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn self_reduction_vanishes() {
        let ord = TermOrder::cycle(5);
        let t = p("s_1_2*s_4_5 - s_1_4*s_2_5");
        assert!(reduce(&t, std::slice::from_ref(&t), &ord).is_zero());
        assert!(reduce(&sigma(1, 6), &[sigma(1, 6)], &TermOrder::cycle(7)).is_zero());
    }

    #[test]
    fn crossing_monomial_is_irreducible() {
        let ord = TermOrder::cycle(5);
        let basis = k5_tetrads();
        let f = p("s_1_4*s_2_5");
        let leads: Vec<Monomial> = basis
            .iter()
            .map(|g| leading_monomial(g, &ord).unwrap())
            .collect();
        let m = f.monomials().next().unwrap();
        assert!(leads.iter().all(|l| !l.divides(m)));
        assert_eq!(reduce(&f, &basis, &ord), f);
    }

    #[test]
    fn reduce_of_empty_basis_is_identity() {
        let f = p("s_1_2 + 3");
        assert_eq!(reduce(&f, &[], &TermOrder::cycle(3)), f);
    }

    #[test]
    fn tetrads_of_k5_form_a_groebner_basis() {
        assert!(is_groebner_basis(&k5_tetrads(), &TermOrder::cycle(5)));
    }

    #[test]
    fn two_tetrads_sharing_a_lead_variable_are_not_a_groebner_basis() {
        let ord = TermOrder::cycle(5);
        let basis = vec![
            p("s_1_2*s_4_5 - s_1_4*s_2_5"),
            p("s_1_2*s_3_4 - s_1_3*s_2_4"),
        ];
        assert!(is_groebner_basis(&basis[..1], &ord));
        let (_, _, r) = first_failing_pair(&basis, &ord).expect("S-pair survives");
        assert!(!r.is_zero());
    }

    #[test]
    fn s_polynomial_cancels_leading_terms() {
        let ord = TermOrder::cycle(5);
        let f = p("s_1_2*s_4_5 - s_1_4*s_2_5");
        let g = p("s_1_2*s_3_4 - s_1_3*s_2_4");
        let s = s_polynomial(&f, &g, &ord);
        let l = leading_monomial(&f, &ord)
            .unwrap()
            .lcm(&leading_monomial(&g, &ord).unwrap());
        assert!(s.coefficient(&l).is_zero());
    }

    #[test]
    fn tail_reduction_keeps_leading_terms() {
        let ord = TermOrder::cycle(4);
        let gens = vec![
            p("s_1_2*s_3_4 + s_1_4*s_2_3"),
            p("s_1_4*s_2_3 - s_1_3*s_2_4"),
        ];
        let red = reduce_tails(&gens, &ord);
        assert_eq!(red[0], p("s_1_2*s_3_4 + s_1_3*s_2_4"));
        assert_eq!(red[1], gens[1]);
    }

    #[test]
    fn leading_term_of_zero_errors() {
        assert_eq!(
            leading_term(&Polynomial::zero(), &TermOrder::cycle(2)),
            Err(AlgebraError::ZeroPolynomial)
        );
    }
}
