//! Homogeneous multilinear maps stored as sparse tables over basis words, and
//! their signed tensor evaluation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{word_degree, Basis, GradedModule, LinComb, Vector, Word};
use crate::scalar::Scalar;
use crate::sign::{koszul_sign, Sign};

/// A homogeneous multilinear map `source^{⊗arity} → target` of a fixed degree.
///
/// Absent input words map to zero and stored outputs are never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    source: GradedModule,
    target: GradedModule,
    arity: usize,
    degree: i32,
    table: BTreeMap<Word, Vector>,
}

impl MultiMap {
    pub fn zero(source: GradedModule, target: GradedModule, arity: usize, degree: i32) -> Self {
        assert!(arity >= 1, "multilinear maps have arity at least one");
        MultiMap { source, target, arity, degree, table: BTreeMap::new() }
    }

    /// The zero map with the same shape as `self`.
    pub fn zero_like(&self) -> Self {
        MultiMap::zero(self.source.clone(), self.target.clone(), self.arity, self.degree)
    }

    pub fn identity(module: &GradedModule) -> Self {
        let mut m = MultiMap::zero(module.clone(), module.clone(), 1, 0);
        for b in module.basis() {
            m.table.insert(vec![b], Vector::single(b, Scalar::one()));
        }
        m
    }

    /// Builds a map from explicit entries, validating basis membership and homogeneity.
    pub fn from_entries(
        source: GradedModule,
        target: GradedModule,
        arity: usize,
        degree: i32,
        entries: impl IntoIterator<Item = (Word, Vector)>,
    ) -> Result<Self> {
        let mut m = MultiMap::zero(source, target, arity, degree);
        for (w, v) in entries {
            m.add_entry(w, &v)?;
        }
        Ok(m)
    }

    /// Adds `output` to the value on `inputs` after validating the entry.
    pub fn add_entry(&mut self, inputs: Word, output: &Vector) -> Result<()> {
        if inputs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: inputs.len() });
        }
        if let Some(b) = inputs.iter().find(|b| !self.source.contains(**b)) {
            return Err(Error::UnknownBasis(*b));
        }
        let want = word_degree(&inputs) + self.degree;
        for (b, _) in output.iter() {
            if !self.target.contains(*b) {
                return Err(Error::UnknownBasis(*b));
            }
            if b.degree != want {
                return Err(Error::NotHomogeneous { inputs, output: *b, degree: self.degree });
            }
        }
        for (b, c) in output.iter() {
            self.accumulate(&inputs, *b, c.clone());
        }
        Ok(())
    }

    /// Unvalidated accumulation used by internal constructions; homogeneity is still asserted.
    pub(crate) fn accumulate(&mut self, inputs: &[Basis], output: Basis, c: Scalar) {
        if c.is_zero() {
            return;
        }
        assert_eq!(word_degree(inputs) + self.degree, output.degree, "homogeneity violated in internal construction");
        match self.table.get_mut(inputs) {
            Some(v) => {
                v.add_term(output, c);
                if v.is_zero() {
                    self.table.remove(inputs);
                }
            }
            None => {
                self.table.insert(inputs.to_vec(), Vector::single(output, c));
            }
        }
    }

    pub fn source(&self) -> &GradedModule {
        &self.source
    }

    pub fn target(&self) -> &GradedModule {
        &self.target
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn table(&self) -> &BTreeMap<Word, Vector> {
        &self.table
    }

    pub fn get(&self, inputs: &[Basis]) -> Option<&Vector> {
        self.table.get(inputs)
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    /// Number of nonzero (input word, output basis) coefficients.
    pub fn nonzero_count(&self) -> usize {
        self.table.values().map(|v| v.len()).sum()
    }

    pub fn same_shape(&self, other: &MultiMap) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.arity == other.arity
            && self.degree == other.degree
    }

    fn check_shape(&self, other: &MultiMap) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "arity {} degree {} vs arity {} degree {} (or differing modules)",
                self.arity, self.degree, other.arity, other.degree
            )))
        }
    }

    /// `self += c · other`.
    pub fn add_assign_scaled(&mut self, other: &MultiMap, c: &Scalar) -> Result<()> {
        self.check_shape(other)?;
        if c.is_zero() {
            return Ok(());
        }
        for (w, v) in &other.table {
            for (b, x) in v.iter() {
                self.accumulate(w, *b, x * c);
            }
        }
        Ok(())
    }

    pub fn add_signed(&mut self, other: &MultiMap, sign: Sign) -> Result<()> {
        self.add_assign_scaled(other, &sign.to_scalar())
    }

    pub fn add(&self, other: &MultiMap) -> Result<MultiMap> {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Scalar::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &MultiMap) -> Result<MultiMap> {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Scalar::one())?;
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> MultiMap {
        let mut out = self.zero_like();
        out.add_assign_scaled(self, c).expect("same shape");
        out
    }

    /// Exact equality of maps with identical shape.
    pub fn compare(&self, other: &MultiMap) -> Result<bool> {
        self.check_shape(other)?;
        Ok(self.table == other.table)
    }

    /// `self ∘ (f₁ ⊗ … ⊗ f_k)`, evaluated entry by entry through the inner tables.
    pub fn compose(&self, inners: &[Factor<'_>]) -> Result<MultiMap> {
        if inners.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: inners.len() });
        }
        let source = inners
            .iter()
            .find_map(|f| match f {
                Factor::Map(m) => Some(m.source.clone()),
                Factor::Id => None,
            })
            .unwrap_or_else(|| self.source.clone());
        for f in inners {
            match f {
                Factor::Id if self.source != source => {
                    return Err(Error::Shape("identity factor between different modules".into()))
                }
                Factor::Map(m) if m.target != self.source || m.source != source => {
                    return Err(Error::Shape("inner map does not match outer source".into()))
                }
                _ => {}
            }
        }
        let arity: usize = inners.iter().map(|f| f.arity()).sum();
        let degree = self.degree + inners.iter().map(|f| f.degree()).sum::<i32>();
        let mut out = MultiMap::zero(source, self.target.clone(), arity, degree);

        let preimages: Vec<Preimage> = inners.iter().map(Preimage::new).collect();
        let factor_degrees: Vec<i32> = inners.iter().map(|f| f.degree()).collect();
        let mut state = ProductState::default();
        for (o, outv) in &self.table {
            if o.iter().zip(&preimages).any(|(b, p)| p.get(b).is_none()) {
                continue;
            }
            state.clear();
            expand(o, &preimages, &factor_degrees, 0, &mut state, &mut |inputs, c| {
                for (b, x) in outv.iter() {
                    out.accumulate(inputs, *b, x * c);
                }
            });
        }
        Ok(out)
    }

    /// `self ∘ inner` for an arity-one `self`.
    pub fn after(&self, inner: &MultiMap) -> Result<MultiMap> {
        self.compose(&[Factor::Map(inner)])
    }
}

/// A tensor factor: either the identity of the ambient module or a stored map.
#[derive(Clone, Copy, Debug)]
pub enum Factor<'a> {
    Id,
    Map(&'a MultiMap),
}

impl Factor<'_> {
    pub fn arity(&self) -> usize {
        match self {
            Factor::Id => 1,
            Factor::Map(m) => m.arity,
        }
    }

    pub fn degree(&self) -> i32 {
        match self {
            Factor::Id => 0,
            Factor::Map(m) => m.degree,
        }
    }
}

enum Preimage<'a> {
    Id,
    Index(BTreeMap<Basis, Vec<(&'a [Basis], &'a Scalar)>>),
}

impl<'a> Preimage<'a> {
    fn new(f: &Factor<'a>) -> Self {
        match f {
            Factor::Id => Preimage::Id,
            Factor::Map(m) => {
                let mut idx: BTreeMap<Basis, Vec<(&'a [Basis], &'a Scalar)>> = BTreeMap::new();
                for (w, v) in &m.table {
                    for (b, c) in v.iter() {
                        idx.entry(*b).or_default().push((w.as_slice(), c));
                    }
                }
                Preimage::Index(idx)
            }
        }
    }

    fn get(&self, b: &Basis) -> Option<()> {
        match self {
            Preimage::Id => Some(()),
            Preimage::Index(idx) => idx.get(b).map(|_| ()),
        }
    }
}

#[derive(Default)]
struct ProductState {
    inputs: Vec<Basis>,
    degrees: Vec<i32>,
}

impl ProductState {
    fn clear(&mut self) {
        self.inputs.clear();
        self.degrees.clear();
    }
}

fn expand(
    outer_word: &[Basis],
    preimages: &[Preimage<'_>],
    factor_degrees: &[i32],
    j: usize,
    state: &mut ProductState,
    emit: &mut dyn FnMut(&[Basis], &Scalar),
) {
    expand_inner(outer_word, preimages, factor_degrees, j, state, &Scalar::one(), emit)
}

fn expand_inner(
    outer_word: &[Basis],
    preimages: &[Preimage<'_>],
    factor_degrees: &[i32],
    j: usize,
    state: &mut ProductState,
    coeff: &Scalar,
    emit: &mut dyn FnMut(&[Basis], &Scalar),
) {
    if j == preimages.len() {
        emit(&state.inputs, coeff);
        return;
    }
    let sign = if j == 0 { Sign::Plus } else { koszul_sign(&state.degrees, factor_degrees[j]) };
    let mark = state.inputs.len();
    let target = outer_word[j];
    let mut push_and_recurse = |state: &mut ProductState, w: &[Basis], c: Scalar| {
        state.inputs.extend_from_slice(w);
        state.degrees.extend(w.iter().map(|b| b.degree));
        expand_inner(outer_word, preimages, factor_degrees, j + 1, state, &c, emit);
        state.inputs.truncate(mark);
        state.degrees.truncate(mark);
    };
    match &preimages[j] {
        Preimage::Id => push_and_recurse(state, &[target], sign.apply(coeff.clone())),
        Preimage::Index(idx) => {
            if let Some(list) = idx.get(&target) {
                for (w, c) in list {
                    push_and_recurse(state, w, sign.apply(coeff * c));
                }
            }
        }
    }
}

/// Evaluates `(f₁ ⊗ … ⊗ f_k)(v₁ ⊗ … ⊗ v_n)` with Koszul signs.
///
/// The sign exponent is `Σ_{j≥2} |f_j| · (degrees of the inputs consumed by f₁..f_{j−1})`.
pub fn apply_block(factors: &[Factor<'_>], inputs: &[Basis]) -> Result<LinComb<Word>> {
    let total: usize = factors.iter().map(|f| f.arity()).sum();
    if total != inputs.len() {
        return Err(Error::ArityMismatch { expected: total, found: inputs.len() });
    }
    Ok(apply_block_unchecked(factors, inputs))
}

pub(crate) fn apply_block_unchecked(factors: &[Factor<'_>], inputs: &[Basis]) -> LinComb<Word> {
    let degrees: Vec<i32> = inputs.iter().map(|b| b.degree).collect();
    let mut sign = Sign::Plus;
    let mut start = 0;
    let mut outputs: Vec<Vec<(Basis, Scalar)>> = Vec::with_capacity(factors.len());
    for (j, f) in factors.iter().enumerate() {
        let end = start + f.arity();
        if j > 0 {
            sign = sign * koszul_sign(&degrees[..start], f.degree());
        }
        match f {
            Factor::Id => outputs.push(vec![(inputs[start], Scalar::one())]),
            Factor::Map(m) => match m.get(&inputs[start..end]) {
                Some(v) => outputs.push(v.iter().map(|(b, c)| (*b, c.clone())).collect()),
                None => return LinComb::new(),
            },
        }
        start = end;
    }
    let mut acc: Vec<(Word, Scalar)> = vec![(Vec::with_capacity(factors.len()), sign.to_scalar())];
    for out in &outputs {
        let mut next = Vec::with_capacity(acc.len() * out.len());
        for (w, c) in &acc {
            for (b, x) in out {
                let mut w2 = w.clone();
                w2.push(*b);
                next.push((w2, c * x));
            }
        }
        acc = next;
    }
    acc.into_iter().collect()
}

/// `outer ∘ (1^{⊗ position−1} ⊗ inner ⊗ 1^{⊗ k−position})`.
pub fn insert(outer: &MultiMap, position: usize, inner: &MultiMap) -> Result<MultiMap> {
    let k = outer.arity();
    if position == 0 || position > k {
        return Err(Error::PositionOutOfRange { position, arity: k });
    }
    let mut factors = vec![Factor::Id; k];
    factors[position - 1] = Factor::Map(inner);
    outer.compose(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(d: i32, i: usize) -> Basis {
        Basis::new(d, i)
    }

    #[test]
    fn degree_one_map_past_degree_one_input() {
        let m = GradedModule::new([(0, 1), (1, 1)]);
        let f2 = MultiMap::from_entries(
            m.clone(),
            m.clone(),
            1,
            1,
            [(vec![b(0, 0)], Vector::single(b(1, 0), Scalar::one()))],
        )
        .unwrap();
        let out = apply_block(&[Factor::Id, Factor::Map(&f2)], &[b(1, 0), b(0, 0)]).unwrap();
        assert_eq!(out, LinComb::single(vec![b(1, 0), b(1, 0)], -Scalar::one()));
    }

    #[test]
    fn homogeneity_is_enforced() {
        let m = GradedModule::new([(0, 1), (1, 1)]);
        let bad = MultiMap::from_entries(m.clone(), m, 1, 0, [(vec![b(0, 0)], Vector::single(b(1, 0), Scalar::one()))]);
        assert!(matches!(bad, Err(Error::NotHomogeneous { .. })));
    }

    #[test]
    fn insert_into_identity_returns_inner() {
        let m = GradedModule::new([(0, 2)]);
        let id = MultiMap::identity(&m);
        let inner = MultiMap::from_entries(
            m.clone(),
            m.clone(),
            2,
            0,
            [(vec![b(0, 0), b(0, 1)], Vector::single(b(0, 1), Scalar::from_int(3)))],
        )
        .unwrap();
        assert_eq!(insert(&id, 1, &inner).unwrap(), inner);
        assert!(insert(&id, 2, &inner).is_err());
    }
}
