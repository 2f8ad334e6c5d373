//! Graded modules, basis words and sparse linear combinations.

use std::collections::btree_map::{self, Entry};
use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

/// A basis element, identified by its degree and its index within that degree.
///
/// The derived order is lexicographic on `(degree, index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basis {
    pub degree: i32,
    pub index: usize,
}

impl Basis {
    pub const fn new(degree: i32, index: usize) -> Self {
        Basis { degree, index }
    }

    pub fn shifted(self, by: i32) -> Self {
        Basis { degree: self.degree + by, index: self.index }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.degree, self.index)
    }
}

/// A tensor word `v₁⊗…⊗vₙ` of basis elements.
pub type Word = Vec<Basis>;

pub fn word_degree(w: &[Basis]) -> i32 {
    w.iter().map(|b| b.degree).sum()
}

pub fn format_word(w: &[Basis]) -> String {
    let parts: Vec<String> = w.iter().map(|b| b.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// A finite-dimensional ℤ-graded module. Degrees of dimension zero are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedModule {
    dims: BTreeMap<i32, usize>,
}

impl GradedModule {
    pub fn new(dims: impl IntoIterator<Item = (i32, usize)>) -> Self {
        let mut m = BTreeMap::new();
        for (d, n) in dims {
            *m.entry(d).or_insert(0) += n;
        }
        m.retain(|_, n| *n > 0);
        GradedModule { dims: m }
    }

    pub fn zero() -> Self {
        GradedModule::default()
    }

    pub fn dim(&self, degree: i32) -> usize {
        self.dims.get(&degree).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn dims(&self) -> &BTreeMap<i32, usize> {
        &self.dims
    }

    pub fn contains(&self, b: Basis) -> bool {
        b.index < self.dim(b.degree)
    }

    /// All basis elements in lexicographic order.
    pub fn basis(&self) -> Vec<Basis> {
        self.dims.iter().flat_map(|(&d, &n)| (0..n).map(move |i| Basis::new(d, i))).collect()
    }

    pub fn basis_in_degree(&self, degree: i32) -> Vec<Basis> {
        (0..self.dim(degree)).map(|i| Basis::new(degree, i)).collect()
    }

    /// The module with every degree raised by `by`.
    pub fn shift(&self, by: i32) -> Self {
        GradedModule { dims: self.dims.iter().map(|(&d, &n)| (d + by, n)).collect() }
    }

    /// All words of length `n`, lexicographically ordered.
    pub fn words(&self, n: usize) -> Vec<Word> {
        let basis = self.basis();
        let mut out: Vec<Word> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * basis.len());
            for w in &out {
                for b in &basis {
                    let mut v = w.clone();
                    v.push(*b);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// All words of length `1..=n`, ordered by length then lexicographically.
    pub fn words_up_to(&self, n: usize) -> Vec<Word> {
        (1..=n).flat_map(|k| self.words(k)).collect()
    }
}

/// A sparse linear combination with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Scalar>,
}

/// A vector in a graded module, in canonical sparse form.
pub type Vector = LinComb<Basis>;

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: Scalar) -> Self {
        let mut v = Self::new();
        v.add_term(k, c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, k: &K) -> Option<&Scalar> {
        self.terms.get(k)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, Scalar> {
        self.terms.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, Scalar> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, k: K, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &LinComb<K>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let unit = c.is_one();
        for (k, v) in other.iter() {
            self.add_term(k.clone(), if unit { v.clone() } else { v * c });
        }
    }

    pub fn add_comb(&mut self, other: &LinComb<K>) {
        for (k, v) in other.iter() {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, c);
        out
    }

    pub fn negated(&self) -> Self {
        LinComb { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }

    pub fn map_keys<L: Ord + Clone>(&self, f: impl Fn(&K) -> L) -> LinComb<L> {
        let mut out = LinComb::new();
        for (k, v) in self.iter() {
            out.add_term(f(k), v.clone());
        }
        out
    }
}

impl<K: Ord> IntoIterator for LinComb<K> {
    type Item = (K, Scalar);
    type IntoIter = btree_map::IntoIter<K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<'a, K: Ord> IntoIterator for &'a LinComb<K> {
    type Item = (&'a K, &'a Scalar);
    type IntoIter = btree_map::Iter<'a, K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for LinComb<K> {
    fn from_iter<I: IntoIterator<Item = (K, Scalar)>>(iter: I) -> Self {
        let mut out = LinComb::new();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dimensions_are_normalized_away() {
        let m = GradedModule::new([(0, 2), (3, 0), (-1, 1)]);
        assert_eq!(m.dims().len(), 2);
        assert_eq!(m.total_dim(), 3);
        assert_eq!(m, GradedModule::new([(-1, 1), (0, 2)]));
    }

    #[test]
    fn basis_is_lex_ordered() {
        let m = GradedModule::new([(2, 1), (0, 2)]);
        assert_eq!(m.basis(), vec![Basis::new(0, 0), Basis::new(0, 1), Basis::new(2, 0)]);
        assert_eq!(m.words(2).len(), 9);
        assert_eq!(m.words(2)[1], vec![Basis::new(0, 0), Basis::new(0, 1)]);
    }

    #[test]
    fn lincomb_drops_cancelled_terms() {
        let mut v = Vector::single(Basis::new(0, 0), Scalar::one());
        v.add_term(Basis::new(0, 0), -Scalar::one());
        assert!(v.is_zero());
    }
}
