use std::collections::BTreeMap;

use crate::graded::Word;
use crate::multimap::MultiMap;

/// Per-arity residual maps of one relation. Zero residuals mean the relation holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residuals {
    pub relation: String,
    pub per_arity: BTreeMap<usize, MultiMap>,
}

impl Residuals {
    pub fn new(relation: impl Into<String>) -> Self {
        Residuals { relation: relation.into(), per_arity: BTreeMap::new() }
    }

    pub fn push(&mut self, n: usize, residual: MultiMap) {
        self.per_arity.insert(n, residual);
    }

    pub fn is_zero(&self) -> bool {
        self.per_arity.values().all(|m| m.is_zero())
    }

    /// True when every residual of arity `≤ n` vanishes.
    pub fn zero_through(&self, n: usize) -> bool {
        self.per_arity.range(..=n).all(|(_, m)| m.is_zero())
    }

    pub fn nonzero_counts(&self) -> BTreeMap<usize, usize> {
        self.per_arity.iter().map(|(n, m)| (*n, m.nonzero_count())).collect()
    }

    pub fn total_nonzero(&self) -> usize {
        self.per_arity.values().map(|m| m.nonzero_count()).sum()
    }

    /// The lowest failing arity and its first offending input word.
    pub fn first_offender(&self) -> Option<(usize, Word)> {
        self.per_arity.iter().find_map(|(n, m)| m.table().keys().next().map(|w| (*n, w.clone())))
    }
}
