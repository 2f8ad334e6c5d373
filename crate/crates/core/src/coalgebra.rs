//! The reduced tensor coalgebra: deconcatenation, lifting component families
//! to coderivations, coalgebra morphisms and homotopies, and the
//! componentwise characterizations of the operator identities.

use std::collections::BTreeMap;

use crate::ainfty::{expect_shape, Relation};
use crate::error::{Error, Result};
use crate::graded::{word_degree, Basis, GradedModule, LinComb, Word};
use crate::index_sets::compositions;
use crate::multimap::{insert, Factor, MultiMap};
use crate::report::Residuals;
use crate::scalar::Scalar;
use crate::sign::{koszul_sign, Sign};

/// A linear combination of tensor words.
pub type TensorVector = LinComb<Word>;

/// `C(v₁⊗…⊗v_n) = Σ_{i=1}^{n−1} (v₁…v_i) ⊗ (v_{i+1}…v_n)`; empty for `n = 1`.
pub fn comultiply(word: &[Basis]) -> Vec<(Word, Word)> {
    (1..word.len()).map(|i| (word[..i].to_vec(), word[i..].to_vec())).collect()
}

/// Comultiplication extended linearly.
pub fn comultiply_vector(v: &TensorVector) -> LinComb<(Word, Word)> {
    let mut out = LinComb::new();
    for (w, c) in v.iter() {
        for pair in comultiply(w) {
            out.add_term(pair, c.clone());
        }
    }
    out
}

/// A linear map `T̄V → T̄W` restricted to input words of length at most the truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraOperator {
    source: GradedModule,
    target: GradedModule,
    degree: i32,
    truncation: usize,
    table: BTreeMap<Word, TensorVector>,
}

impl CoalgebraOperator {
    pub fn zero(source: GradedModule, target: GradedModule, degree: i32, truncation: usize) -> Self {
        CoalgebraOperator { source, target, degree, truncation, table: BTreeMap::new() }
    }

    pub fn identity(module: &GradedModule, truncation: usize) -> Self {
        let mut op = CoalgebraOperator::zero(module.clone(), module.clone(), 0, truncation);
        for w in module.words_up_to(truncation) {
            op.table.insert(w.clone(), TensorVector::single(w, Scalar::one()));
        }
        op
    }

    /// Builds an operator from explicit values, validating lengths, basis membership and degree.
    pub fn from_table(
        source: GradedModule,
        target: GradedModule,
        degree: i32,
        truncation: usize,
        entries: impl IntoIterator<Item = (Word, TensorVector)>,
    ) -> Result<Self> {
        let mut op = CoalgebraOperator::zero(source, target, degree, truncation);
        for (w, v) in entries {
            if w.is_empty() || w.len() > truncation {
                return Err(Error::Truncation(format!("input word of length {} outside 1..={truncation}", w.len())));
            }
            if let Some(b) = w.iter().find(|b| !op.source.contains(**b)) {
                return Err(Error::UnknownBasis(*b));
            }
            for (u, _) in v.iter() {
                if let Some(b) = u.iter().find(|b| !op.target.contains(**b)) {
                    return Err(Error::UnknownBasis(*b));
                }
                if u.is_empty() || word_degree(u) != word_degree(&w) + degree {
                    return Err(Error::Shape(format!(
                        "operator value on a word of length {} is not homogeneous",
                        w.len()
                    )));
                }
            }
            op.set(w, v);
        }
        Ok(op)
    }

    fn set(&mut self, w: Word, v: TensorVector) {
        if v.is_zero() {
            self.table.remove(&w);
        } else {
            self.table.insert(w, v);
        }
    }

    pub fn source(&self) -> &GradedModule {
        &self.source
    }

    pub fn target(&self) -> &GradedModule {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn table(&self) -> &BTreeMap<Word, TensorVector> {
        &self.table
    }

    pub fn get(&self, w: &[Basis]) -> Option<&TensorVector> {
        self.table.get(w)
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn nonzero_count(&self) -> usize {
        self.table.values().map(|v| v.len()).sum()
    }

    pub fn apply(&self, v: &TensorVector) -> TensorVector {
        let mut out = TensorVector::new();
        for (w, c) in v.iter() {
            if let Some(x) = self.table.get(w) {
                out.add_scaled(x, c);
            }
        }
        out
    }

    fn check_same(&self, other: &CoalgebraOperator) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape("operators act between different modules".into()));
        }
        if self.degree != other.degree {
            return Err(Error::Shape(format!("operator degrees {} and {} differ", self.degree, other.degree)));
        }
        if self.truncation != other.truncation {
            return Err(Error::Truncation("operators have different truncations".into()));
        }
        Ok(())
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, other: &CoalgebraOperator, c: &Scalar) -> Result<CoalgebraOperator> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (w, v) in &other.table {
            let mut x = out.table.remove(w).unwrap_or_default();
            x.add_scaled(v, c);
            out.set(w.clone(), x);
        }
        Ok(out)
    }

    pub fn add(&self, other: &CoalgebraOperator) -> Result<CoalgebraOperator> {
        self.add_scaled(other, &Scalar::one())
    }

    pub fn sub(&self, other: &CoalgebraOperator) -> Result<CoalgebraOperator> {
        self.add_scaled(other, &-Scalar::one())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &CoalgebraOperator) -> Result<CoalgebraOperator> {
        if inner.target != self.source {
            return Err(Error::Shape("operators are not composable".into()));
        }
        if inner.truncation != self.truncation {
            return Err(Error::Truncation("composed operators have different truncations".into()));
        }
        let mut out = CoalgebraOperator::zero(
            inner.source.clone(),
            self.target.clone(),
            self.degree + inner.degree,
            self.truncation,
        );
        for (w, v) in &inner.table {
            out.set(w.clone(), self.apply(v));
        }
        Ok(out)
    }

    /// The block from input homogeneity `m` to output homogeneity `j`.
    pub fn block(&self, m: usize, j: usize) -> BTreeMap<Word, TensorVector> {
        self.table
            .iter()
            .filter(|(w, _)| w.len() == m)
            .filter_map(|(w, v)| {
                let part: TensorVector =
                    v.iter().filter(|(u, _)| u.len() == j).map(|(u, c)| (u.clone(), c.clone())).collect();
                (!part.is_zero()).then(|| (w.clone(), part))
            })
            .collect()
    }

    /// The restriction to input words of length at most `n`.
    pub fn restricted(&self, n: usize) -> CoalgebraOperator {
        let mut out = self.clone();
        out.table.retain(|w, _| w.len() <= n);
        out
    }

    /// True when no word is sent to a word of greater length.
    pub fn preserves_filtration(&self) -> bool {
        self.table.iter().all(|(w, v)| v.keys().all(|u| u.len() <= w.len()))
    }

    /// Projection onto homogeneity one, as maps `V^{⊗n} → W`.
    pub fn components(&self) -> BTreeMap<usize, MultiMap> {
        let mut out: BTreeMap<usize, MultiMap> = (1..=self.truncation)
            .map(|n| (n, MultiMap::zero(self.source.clone(), self.target.clone(), n, self.degree)))
            .collect();
        for (w, v) in &self.table {
            let m = out.get_mut(&w.len()).expect("word length within truncation");
            for (u, c) in v.iter() {
                if u.len() == 1 {
                    m.accumulate(w, u[0], c.clone());
                }
            }
        }
        out.retain(|_, m| !m.is_zero());
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Coderivation,
    Morphism,
    Homotopy,
}

impl FamilyKind {
    pub fn degree(self) -> i32 {
        match self {
            FamilyKind::Coderivation => -1,
            FamilyKind::Morphism => 0,
            FamilyKind::Homotopy => 1,
        }
    }
}

/// Components `{x_n : V^{⊗n} → W}` of a coderivation, morphism or homotopy of tensor coalgebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentFamily {
    kind: FamilyKind,
    source: GradedModule,
    target: GradedModule,
    truncation: usize,
    components: BTreeMap<usize, MultiMap>,
    flanks: Option<Box<(ComponentFamily, ComponentFamily)>>,
}

impl ComponentFamily {
    fn build(
        kind: FamilyKind,
        source: GradedModule,
        target: GradedModule,
        truncation: usize,
        components: impl IntoIterator<Item = MultiMap>,
        flanks: Option<Box<(ComponentFamily, ComponentFamily)>>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for m in components {
            let n = m.arity();
            if n > truncation {
                return Err(Error::Truncation(format!("component of arity {n} beyond truncation {truncation}")));
            }
            expect_shape(&m, &source, &target, n, kind.degree(), "component")?;
            if map.insert(n, m).is_some() {
                return Err(Error::Shape(format!("duplicate component of arity {n}")));
            }
        }
        map.retain(|_, m: &mut MultiMap| !m.is_zero());
        Ok(ComponentFamily { kind, source, target, truncation, components: map, flanks })
    }

    pub fn coderivation(
        module: GradedModule,
        truncation: usize,
        components: impl IntoIterator<Item = MultiMap>,
    ) -> Result<Self> {
        ComponentFamily::build(FamilyKind::Coderivation, module.clone(), module, truncation, components, None)
    }

    pub fn morphism(
        source: GradedModule,
        target: GradedModule,
        truncation: usize,
        components: impl IntoIterator<Item = MultiMap>,
    ) -> Result<Self> {
        ComponentFamily::build(FamilyKind::Morphism, source, target, truncation, components, None)
    }

    pub fn identity(module: &GradedModule, truncation: usize) -> Self {
        ComponentFamily::morphism(module.clone(), module.clone(), truncation, [MultiMap::identity(module)])
            .expect("identity has degree zero")
    }

    /// A homotopy family whose lift is colinear with respect to `left` and `right`.
    pub fn homotopy(
        left: ComponentFamily,
        right: ComponentFamily,
        components: impl IntoIterator<Item = MultiMap>,
    ) -> Result<Self> {
        if left.kind != FamilyKind::Morphism || right.kind != FamilyKind::Morphism {
            return Err(Error::Shape("homotopy flanks must be morphism families".into()));
        }
        if left.source != right.source || left.target != right.target || left.truncation != right.truncation {
            return Err(Error::Shape("homotopy flanks have different shapes".into()));
        }
        let (s, t, n) = (left.source.clone(), left.target.clone(), left.truncation);
        ComponentFamily::build(FamilyKind::Homotopy, s, t, n, components, Some(Box::new((left, right))))
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn source(&self) -> &GradedModule {
        &self.source
    }

    pub fn target(&self) -> &GradedModule {
        &self.target
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn components(&self) -> &BTreeMap<usize, MultiMap> {
        &self.components
    }

    pub fn component(&self, n: usize) -> Option<&MultiMap> {
        self.components.get(&n)
    }

    pub fn flanks(&self) -> Option<(&ComponentFamily, &ComponentFamily)> {
        self.flanks.as_deref().map(|(l, r)| (l, r))
    }

    /// The lift to the tensor coalgebra, dispatched on the family kind.
    pub fn lift(&self) -> CoalgebraOperator {
        match self.kind {
            FamilyKind::Coderivation => lift_coderivation(self),
            FamilyKind::Morphism => lift_morphism(self),
            FamilyKind::Homotopy => lift_homotopy(self),
        }
    }

    /// The family of the same kind and flanks whose components are read off an operator.
    pub fn with_components_of(&self, op: &CoalgebraOperator) -> Result<Self> {
        let comps = op.components().into_values();
        ComponentFamily::build(
            self.kind,
            self.source.clone(),
            self.target.clone(),
            self.truncation,
            comps,
            self.flanks.clone(),
        )
    }
}

fn unit() -> TensorVector {
    TensorVector::single(Vec::new(), Scalar::one())
}

/// `sign · (prefix ⊗ rest)` accumulated into `out`.
fn prepend(out: &mut TensorVector, prefix: &[(Basis, Scalar)], rest: &TensorVector, sign: Sign) {
    for (b, c) in prefix {
        let c = sign.apply(c.clone());
        for (u, d) in rest.iter() {
            let mut w = Vec::with_capacity(u.len() + 1);
            w.push(*b);
            w.extend_from_slice(u);
            out.add_term(w, &c * d);
        }
    }
}

fn component_value(m: Option<&MultiMap>, w: &[Basis]) -> Vec<(Basis, Scalar)> {
    m.and_then(|m| m.get(w)).map(|v| v.iter().map(|(b, c)| (*b, c.clone())).collect()).unwrap_or_default()
}

fn lookup<'a>(
    table: &'a BTreeMap<Word, TensorVector>,
    w: &[Basis],
    unit: &'a TensorVector,
) -> Option<&'a TensorVector> {
    if w.is_empty() {
        Some(unit)
    } else {
        table.get(w)
    }
}

fn degrees(w: &[Basis]) -> Vec<i32> {
    w.iter().map(|b| b.degree).collect()
}

/// `δ|_{V^{⊗n}} = Σ_{a+ℓ+b=n} 1^{⊗a} ⊗ δ_ℓ ⊗ 1^{⊗b}`.
pub fn lift_coderivation(family: &ComponentFamily) -> CoalgebraOperator {
    let d = family.kind.degree();
    let mut op = CoalgebraOperator::zero(family.source.clone(), family.target.clone(), d, family.truncation);
    for w in family.source.words_up_to(family.truncation) {
        let mut out = TensorVector::new();
        for l in 1..=w.len() {
            let head = component_value(family.component(l), &w[..l]);
            if !head.is_empty() {
                let rest = TensorVector::single(w[l..].to_vec(), Scalar::one());
                prepend(&mut out, &head, &rest, Sign::Plus);
            }
        }
        if w.len() > 1 {
            if let Some(rest) = op.table.get(&w[1..]) {
                let sign = koszul_sign(&degrees(&w[..1]), d);
                prepend(&mut out, &[(w[0], Scalar::one())], rest, sign);
            }
        }
        op.set(w, out);
    }
    op
}

/// `F|_{V^{⊗n}} = Σ_{r₁+…+r_k=n} f_{r₁} ⊗ … ⊗ f_{r_k}`.
pub fn lift_morphism(family: &ComponentFamily) -> CoalgebraOperator {
    let mut op = CoalgebraOperator::zero(family.source.clone(), family.target.clone(), 0, family.truncation);
    let one = unit();
    for w in family.source.words_up_to(family.truncation) {
        let mut out = TensorVector::new();
        for i in 1..=w.len() {
            let head = component_value(family.component(i), &w[..i]);
            if head.is_empty() {
                continue;
            }
            if let Some(rest) = lookup(&op.table, &w[i..], &one) {
                prepend(&mut out, &head, rest, koszul_sign(&degrees(&w[..i]), 0));
            }
        }
        op.set(w, out);
    }
    op
}

/// `H|_{V^{⊗n}} = Σ_{r₁+…+r_k=n} Σ_i e_{r₁} ⊗ … ⊗ e_{r_{i−1}} ⊗ h_{r_i} ⊗ g_{r_{i+1}} ⊗ … ⊗ g_{r_k}`.
pub fn lift_homotopy(family: &ComponentFamily) -> CoalgebraOperator {
    let (left, right) = family.flanks().expect("homotopy families carry flanks");
    let right_op = lift_morphism(right);
    let d = family.kind.degree();
    let mut op = CoalgebraOperator::zero(family.source.clone(), family.target.clone(), d, family.truncation);
    let one = unit();
    for w in family.source.words_up_to(family.truncation) {
        let mut out = TensorVector::new();
        for i in 1..=w.len() {
            let head = component_value(family.component(i), &w[..i]);
            if !head.is_empty() {
                if let Some(rest) = lookup(&right_op.table, &w[i..], &one) {
                    prepend(&mut out, &head, rest, koszul_sign(&degrees(&w[..i]), right_op.degree));
                }
            }
            if i < w.len() {
                let head = component_value(left.component(i), &w[..i]);
                if !head.is_empty() {
                    if let Some(rest) = op.table.get(&w[i..]) {
                        prepend(&mut out, &head, rest, koszul_sign(&degrees(&w[..i]), d));
                    }
                }
            }
        }
        op.set(w, out);
    }
    op
}

/// A tensor factor of an operator pair: the identity or a stored operator.
#[derive(Clone, Copy, Debug)]
pub enum Side<'a> {
    Id,
    Op(&'a CoalgebraOperator),
}

impl Side<'_> {
    fn degree(&self) -> i32 {
        match self {
            Side::Id => 0,
            Side::Op(op) => op.degree,
        }
    }

    fn apply_word(&self, w: &[Basis]) -> TensorVector {
        match self {
            Side::Id => TensorVector::single(w.to_vec(), Scalar::one()),
            Side::Op(op) => op.get(w).cloned().unwrap_or_default(),
        }
    }
}

/// Input words on which `C ∘ op ≠ Σ_pairs (a ⊗ b) ∘ C`.
pub fn colinearity_defects(op: &CoalgebraOperator, pairs: &[(Side<'_>, Side<'_>)]) -> Vec<Word> {
    let mut bad = Vec::new();
    for w in op.source.words_up_to(op.truncation) {
        let lhs = op.get(&w).map(comultiply_vector).unwrap_or_default();
        let mut rhs = LinComb::new();
        for (w1, w2) in comultiply(&w) {
            for (a, b) in pairs {
                let sign = koszul_sign(&degrees(&w1), b.degree());
                let x = a.apply_word(&w1);
                let y = b.apply_word(&w2);
                for (u1, c1) in x.iter() {
                    for (u2, c2) in y.iter() {
                        rhs.add_term((u1.clone(), u2.clone()), sign.apply(c1 * c2));
                    }
                }
            }
        }
        if lhs != rhs {
            bad.push(w);
        }
    }
    bad
}

/// Colinearity defects of a lifted family, using the pairs dictated by its kind.
pub fn lift_colinearity_defects(family: &ComponentFamily) -> Vec<Word> {
    let op = family.lift();
    match family.kind {
        FamilyKind::Coderivation => colinearity_defects(&op, &[(Side::Op(&op), Side::Id), (Side::Id, Side::Op(&op))]),
        FamilyKind::Morphism => colinearity_defects(&op, &[(Side::Op(&op), Side::Op(&op))]),
        FamilyKind::Homotopy => {
            let (l, r) = family.flanks().expect("homotopy families carry flanks");
            let (lo, ro) = (l.lift(), r.lift());
            colinearity_defects(&op, &[(Side::Op(&lo), Side::Op(&op)), (Side::Op(&op), Side::Op(&ro))])
        }
    }
}

fn expect_kind(family: &ComponentFamily, kind: FamilyKind) -> Result<()> {
    if family.kind != kind {
        return Err(Error::Shape(format!("expected a {kind:?} family, found {:?}", family.kind)));
    }
    Ok(())
}

fn check_arity(n_max: usize, truncation: usize) -> Result<()> {
    if n_max > truncation {
        return Err(Error::Truncation(format!("requested arity {n_max} beyond truncation {truncation}")));
    }
    Ok(())
}

/// `Σ_{k+ℓ=n+1} Σ_{i=1}^{k} x_k(1^{⊗i−1} ⊗ δ_ℓ ⊗ 1^{⊗k−i})`, each pair `(k, ℓ)` counted once.
fn precompose_sum(
    rel: &mut Relation,
    x: &ComponentFamily,
    delta: &ComponentFamily,
    n: usize,
    sign: Sign,
) -> Result<()> {
    for k in 1..=n {
        let l = n + 1 - k;
        if let (Some(xk), Some(dl)) = (x.component(k), delta.component(l)) {
            for i in 1..=k {
                rel.add(sign, insert(xk, i, dl))?;
            }
        }
    }
    Ok(())
}

/// `Σ_{r₁+…+r_k=n} δ_k(x_{r₁} ⊗ … ⊗ x_{r_k})`, or the homotopy-shaped variant with flanks.
fn postcompose_sum(
    rel: &mut Relation,
    delta: &ComponentFamily,
    x: &ComponentFamily,
    n: usize,
    sign: Sign,
) -> Result<()> {
    for r in compositions(n) {
        let Some(dk) = delta.component(r.len()) else { continue };
        match x.flanks() {
            None => {
                let parts: Option<Vec<Factor<'_>>> = r.iter().map(|j| x.component(*j).map(Factor::Map)).collect();
                if let Some(parts) = parts {
                    rel.add(sign, dk.compose(&parts))?;
                }
            }
            Some((e, g)) => {
                for i in 0..r.len() {
                    let parts: Option<Vec<Factor<'_>>> = r
                        .iter()
                        .enumerate()
                        .map(|(j, a)| {
                            let fam = match j.cmp(&i) {
                                std::cmp::Ordering::Less => e,
                                std::cmp::Ordering::Equal => x,
                                std::cmp::Ordering::Greater => g,
                            };
                            fam.component(*a).map(Factor::Map)
                        })
                        .collect();
                    if let Some(parts) = parts {
                        rel.add(sign, dk.compose(&parts))?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Componentwise `δ ∘ δ = 0`: `Σ_{k+ℓ=n+1} Σ_i δ_k(1^{⊗i−1} ⊗ δ_ℓ ⊗ 1^{⊗k−i})` per arity.
pub fn check_codifferential(delta: &ComponentFamily, n_max: usize) -> Result<Residuals> {
    expect_kind(delta, FamilyKind::Coderivation)?;
    check_arity(n_max, delta.truncation)?;
    let mut out = Residuals::new("codifferential components");
    for n in 1..=n_max {
        let mut rel = Relation::new(&delta.source, &delta.target, n, -2);
        precompose_sum(&mut rel, delta, delta, n, Sign::Plus)?;
        out.push(n, rel.finish());
    }
    Ok(out)
}

/// Componentwise `δ^W ∘ F − F ∘ δ^V` per arity.
pub fn check_morphism_components(
    f: &ComponentFamily,
    delta_v: &ComponentFamily,
    delta_w: &ComponentFamily,
    n_max: usize,
) -> Result<Residuals> {
    expect_kind(f, FamilyKind::Morphism)?;
    expect_kind(delta_v, FamilyKind::Coderivation)?;
    expect_kind(delta_w, FamilyKind::Coderivation)?;
    check_arity(n_max, f.truncation)?;
    let mut out = Residuals::new("morphism components");
    for n in 1..=n_max {
        let mut rel = Relation::new(&f.source, &f.target, n, -1);
        postcompose_sum(&mut rel, delta_w, f, n, Sign::Plus)?;
        precompose_sum(&mut rel, f, delta_v, n, Sign::Minus)?;
        out.push(n, rel.finish());
    }
    Ok(out)
}

/// Componentwise `E − G − F∘δ^V − δ^W∘F` per arity, where `E`, `G` are the flanks of `F`.
pub fn check_homotopy_components(
    f: &ComponentFamily,
    delta_v: &ComponentFamily,
    delta_w: &ComponentFamily,
    n_max: usize,
) -> Result<Residuals> {
    expect_kind(f, FamilyKind::Homotopy)?;
    expect_kind(delta_v, FamilyKind::Coderivation)?;
    expect_kind(delta_w, FamilyKind::Coderivation)?;
    check_arity(n_max, f.truncation)?;
    let (e, g) = f.flanks().expect("homotopy families carry flanks");
    let mut out = Residuals::new("homotopy components");
    for n in 1..=n_max {
        let mut rel = Relation::new(&f.source, &f.target, n, 0);
        if let Some(x) = e.component(n) {
            rel.add(Sign::Plus, Ok(x.clone()))?;
        }
        if let Some(x) = g.component(n) {
            rel.add(Sign::Minus, Ok(x.clone()))?;
        }
        precompose_sum(&mut rel, f, delta_v, n, Sign::Minus)?;
        postcompose_sum(&mut rel, delta_w, f, n, Sign::Minus)?;
        out.push(n, rel.finish());
    }
    Ok(out)
}

/// Operator-level `δ ∘ δ`.
pub fn codifferential_square(delta: &ComponentFamily) -> Result<CoalgebraOperator> {
    let op = delta.lift();
    op.compose(&op)
}

/// Operator-level `δ^W ∘ F − F ∘ δ^V`.
pub fn morphism_defect(
    f: &ComponentFamily,
    delta_v: &ComponentFamily,
    delta_w: &ComponentFamily,
) -> Result<CoalgebraOperator> {
    let fo = f.lift();
    delta_w.lift().compose(&fo)?.sub(&fo.compose(&delta_v.lift())?)
}

/// Operator-level `E − G − F ∘ δ^V − δ^W ∘ F`.
pub fn homotopy_defect(
    f: &ComponentFamily,
    delta_v: &ComponentFamily,
    delta_w: &ComponentFamily,
) -> Result<CoalgebraOperator> {
    let (e, g) = f.flanks().ok_or_else(|| Error::Shape("homotopy family without flanks".into()))?;
    let fo = f.lift();
    e.lift().sub(&g.lift())?.sub(&fo.compose(&delta_v.lift())?)?.sub(&delta_w.lift().compose(&fo)?)
}

/// True when the projection of `op` to homogeneity one matches `residuals` at every arity.
pub fn components_match(op: &CoalgebraOperator, residuals: &Residuals) -> bool {
    let comps = op.components();
    residuals.per_arity.iter().all(|(n, m)| match comps.get(n) {
        Some(c) => c.table() == m.table(),
        None => m.is_zero(),
    }) && comps.keys().all(|n| residuals.per_arity.contains_key(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::Vector;

    fn b(d: i32, i: usize) -> Basis {
        Basis::new(d, i)
    }

    #[test]
    fn comultiplication_counts() {
        assert!(comultiply(&[b(0, 0)]).is_empty());
        assert_eq!(comultiply(&[b(0, 0), b(1, 0)]), vec![(vec![b(0, 0)], vec![b(1, 0)])]);
        assert_eq!(comultiply(&[b(0, 0); 4]).len(), 3);
    }

    #[test]
    fn lift_of_differential_only() {
        let m = GradedModule::new([(0, 1), (1, 1)]);
        let d = MultiMap::from_entries(
            m.clone(),
            m.clone(),
            1,
            -1,
            [(vec![b(1, 0)], Vector::single(b(0, 0), Scalar::one()))],
        )
        .unwrap();
        let fam = ComponentFamily::coderivation(m.clone(), 3, [d]).unwrap();
        let op = fam.lift();
        let v = op.get(&[b(1, 0), b(1, 0)]).unwrap();
        let mut want = TensorVector::new();
        want.add_term(vec![b(0, 0), b(1, 0)], Scalar::one());
        want.add_term(vec![b(1, 0), b(0, 0)], -Scalar::one());
        assert_eq!(v, &want);
        assert!(codifferential_square(&fam).unwrap().is_zero());
        assert_eq!(fam.with_components_of(&op).unwrap(), fam);
    }

    #[test]
    fn strict_morphism_lift_is_tensor_power() {
        let m = GradedModule::new([(0, 2)]);
        let f = MultiMap::from_entries(
            m.clone(),
            m.clone(),
            1,
            0,
            [
                (vec![b(0, 0)], Vector::single(b(0, 1), Scalar::from_int(2))),
                (vec![b(0, 1)], Vector::single(b(0, 0), Scalar::one())),
            ],
        )
        .unwrap();
        let fam = ComponentFamily::morphism(m.clone(), m, 3, [f]).unwrap();
        let op = fam.lift();
        let v = op.get(&[b(0, 0), b(0, 0), b(0, 1)]).unwrap();
        assert_eq!(v, &TensorVector::single(vec![b(0, 1), b(0, 1), b(0, 0)], Scalar::from_int(4)));
        assert!(lift_colinearity_defects(&fam).is_empty());
    }
}
