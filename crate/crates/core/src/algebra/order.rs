use std::cmp::Ordering;
use std::collections::HashMap;

use super::poly::{Monomial, Variable, MAX_INDEX};
use super::AlgebraError;

/// Final tie-break between monomials that agree on every block degree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TieBreak {
    /// Degree-lexicographic with variables ranked by ascending index pair (`s_1_2` largest).
    #[default]
    Natural,
    /// Degree-lexicographic with the ranking reversed (`s_1_2` smallest).
    Reversed,
}

/// Circular block order on sigma-variables.
///
/// Blocks, from largest: chord classes of the cyclic embedding (class = cyclic
/// distance + 1, smaller class first), then sigma-variables off the embedding,
/// then lambda-variables. Block degree vectors are compared lexicographically and
/// ties fall to degree-lexicographic on the tie-break ranking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermOrder {
    embedding: Vec<usize>,
    position: HashMap<usize, usize>,
    tie_break: TieBreak,
}

/// Sort key of a monomial under a fixed order; keys compare like monomials.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderKey(Vec<u64>);

impl TermOrder {
    /// Order for the given cyclic sequence of observed node indices.
    pub fn circular<I: IntoIterator<Item = usize>>(
        embedding: I,
        tie_break: TieBreak,
    ) -> Result<TermOrder, AlgebraError> {
        let embedding: Vec<usize> = embedding.into_iter().collect();
        let mut position = HashMap::with_capacity(embedding.len());
        for (pos, &v) in embedding.iter().enumerate() {
            if v > MAX_INDEX {
                return Err(AlgebraError::IndexOutOfRange(v));
            }
            if position.insert(v, pos).is_some() {
                return Err(AlgebraError::DuplicateVertex(v));
            }
        }
        Ok(TermOrder {
            embedding,
            position,
            tie_break,
        })
    }

    /// Natural cycle `0, 1, ..., n-1`.
    pub fn cycle(n: usize) -> TermOrder {
        TermOrder::circular(0..n, TieBreak::Natural).expect("distinct indices")
    }

    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    pub fn with_tie_break(&self, tie_break: TieBreak) -> TermOrder {
        TermOrder {
            tie_break,
            ..self.clone()
        }
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.position.get(&v).copied()
    }

    /// Edge class of a chord: cyclic distance plus one, in `2..=n/2 + 1`.
    pub fn edge_class(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = (self.position(u)?, self.position(v)?);
        if a == b {
            return None;
        }
        let n = self.embedding.len();
        let d = a.abs_diff(b);
        Some(d.min(n - d) + 1)
    }

    fn num_classes(&self) -> usize {
        self.embedding.len() / 2
    }

    fn block(&self, v: Variable) -> usize {
        match v {
            Variable::Sigma(i, j) => match self.edge_class(i as usize, j as usize) {
                Some(k) => k - 2,
                None => self.num_classes(),
            },
            Variable::Lambda(..) => self.num_classes() + 1,
        }
    }

    fn rank(&self, v: Variable) -> u64 {
        let natural = match v {
            Variable::Sigma(i, j) => (u64::from(i) << 12) | u64::from(j),
            Variable::Lambda(v, h) => (1 << 24) | (u64::from(v) << 12) | u64::from(h),
        };
        match self.tie_break {
            TieBreak::Natural => (1 << 26) - natural,
            TieBreak::Reversed => natural,
        }
    }

    pub fn key(&self, m: &Monomial) -> OrderKey {
        let blocks = self.num_classes() + 2;
        let mut key = vec![0u64; blocks];
        for &(v, e) in m.factors() {
            key[self.block(v)] += u64::from(e);
        }
        let mut ranked: Vec<(u64, u32)> = m
            .factors()
            .iter()
            .map(|&(v, e)| (self.rank(v), e))
            .collect();
        ranked.sort_unstable_by_key(|r| std::cmp::Reverse(r.0));
        key.extend(ranked.into_iter().map(|(r, e)| (r << 32) | u64::from(e)));
        OrderKey(key)
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}
