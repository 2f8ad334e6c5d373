//! A∞ algebras, morphisms and homotopies in the unsuspended convention, with
//! exact residual checkers for their defining relations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::GradedModule;
use crate::index_sets::{enum_a, enum_b};
use crate::multimap::{insert, Factor, MultiMap};
use crate::report::Residuals;
use crate::sign::{theta, Sign};

/// A differential and products `μ_n` (arity n, degree n−2) for `2 ≤ n ≤ N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfinity {
    carrier: GradedModule,
    differential: MultiMap,
    products: BTreeMap<usize, MultiMap>,
    truncation: usize,
}

impl AInfinity {
    pub fn new(
        carrier: GradedModule,
        differential: MultiMap,
        products: impl IntoIterator<Item = MultiMap>,
        truncation: usize,
    ) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::Truncation("truncation must be at least 1".into()));
        }
        expect_shape(&differential, &carrier, &carrier, 1, -1, "differential")?;
        let mut map = BTreeMap::new();
        for m in products {
            let n = m.arity();
            if n < 2 {
                return Err(Error::Shape("products start at arity 2".into()));
            }
            if n > truncation {
                return Err(Error::Truncation(format!("product of arity {n} exceeds truncation {truncation}")));
            }
            expect_shape(&m, &carrier, &carrier, n, n as i32 - 2, "product")?;
            if map.insert(n, m).is_some() {
                return Err(Error::Shape(format!("duplicate product of arity {n}")));
            }
        }
        map.retain(|_, m| !m.is_zero());
        Ok(AInfinity { carrier, differential, products: map, truncation })
    }

    /// A chain complex viewed as an A∞ algebra with vanishing products.
    pub fn from_complex(carrier: GradedModule, differential: MultiMap, truncation: usize) -> Result<Self> {
        AInfinity::new(carrier, differential, [], truncation)
    }

    pub fn carrier(&self) -> &GradedModule {
        &self.carrier
    }

    pub fn differential(&self) -> &MultiMap {
        &self.differential
    }

    pub fn products(&self) -> &BTreeMap<usize, MultiMap> {
        &self.products
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `μ_n`, where `μ_1` is the differential; `None` means zero.
    pub fn op(&self, n: usize) -> Option<&MultiMap> {
        if n == 1 {
            Some(&self.differential)
        } else {
            self.products.get(&n)
        }
    }

    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        let products = self.products.values().filter(|m| m.arity() <= truncation).cloned();
        AInfinity::new(self.carrier.clone(), self.differential.clone(), products, truncation)
    }
}

pub(crate) fn expect_shape(
    m: &MultiMap,
    source: &GradedModule,
    target: &GradedModule,
    arity: usize,
    degree: i32,
    what: &str,
) -> Result<()> {
    if m.source() != source || m.target() != target {
        return Err(Error::Shape(format!("{what} has the wrong source or target module")));
    }
    if m.arity() != arity {
        return Err(Error::ArityMismatch { expected: arity, found: m.arity() });
    }
    if m.degree() != degree {
        return Err(Error::Shape(format!("{what} of arity {arity} must have degree {degree}, found {}", m.degree())));
    }
    Ok(())
}

fn check_range(n_max: usize, truncation: usize) -> Result<()> {
    if n_max > truncation {
        return Err(Error::Truncation(format!("requested arity {n_max} beyond truncation {truncation}")));
    }
    Ok(())
}

/// Accumulates signed terms of one relation at a fixed arity.
pub(crate) struct Relation {
    acc: MultiMap,
}

impl Relation {
    pub(crate) fn new(source: &GradedModule, target: &GradedModule, arity: usize, degree: i32) -> Self {
        Relation { acc: MultiMap::zero(source.clone(), target.clone(), arity, degree) }
    }

    pub(crate) fn add(&mut self, sign: Sign, term: Result<MultiMap>) -> Result<()> {
        self.acc.add_signed(&term?, sign)
    }

    pub(crate) fn finish(self) -> MultiMap {
        self.acc
    }
}

/// `(−1)^{i(ℓ+1)+n}`, the sign attached to `μ_k(1^{i−1} ⊗ μ_ℓ ⊗ 1^{k−i})` in A(n).
pub(crate) fn a_sign(i: usize, l: usize, n: usize) -> Sign {
    Sign::pow((i * (l + 1) + n) as i64)
}

/// Residuals of the A∞ relations. Arity 1 records `∂∘∂`; arity `n ≥ 2` records
/// `∂μ_n − Σ_i (−1)^n μ_n(1⊗…⊗∂⊗…⊗1) − Σ_{A(n)} (−1)^{i(ℓ+1)+n} μ_k(1⊗…⊗μ_ℓ⊗…⊗1)`.
pub fn check_structure(a: &AInfinity, n_max: usize) -> Result<Residuals> {
    check_range(n_max, a.truncation)?;
    let v = &a.carrier;
    let d = &a.differential;
    let mut out = Residuals::new("A-infinity relations");
    for n in 1..=n_max {
        let mut rel = Relation::new(v, v, n, n as i32 - 3);
        if n == 1 {
            rel.add(Sign::Plus, d.after(d))?;
        } else {
            if let Some(mu) = a.op(n) {
                rel.add(Sign::Plus, d.after(mu))?;
                for i in 1..=n {
                    rel.add(Sign::Minus * Sign::pow(n as i64), insert(mu, i, d))?;
                }
            }
            for t in enum_a(n) {
                if let (Some(mk), Some(ml)) = (a.op(t.k), a.op(t.l)) {
                    rel.add(Sign::Minus * a_sign(t.i, t.l, n), insert(mk, t.i, ml))?;
                }
            }
        }
        out.push(n, rel.finish());
    }
    Ok(out)
}

/// An A∞ morphism with components `f_n` of degree `n−1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInftyMorphism {
    source: Arc<AInfinity>,
    target: Arc<AInfinity>,
    components: BTreeMap<usize, MultiMap>,
}

impl AInftyMorphism {
    pub fn new(
        source: Arc<AInfinity>,
        target: Arc<AInfinity>,
        components: impl IntoIterator<Item = MultiMap>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for m in components {
            let n = m.arity();
            expect_shape(&m, source.carrier(), target.carrier(), n, n as i32 - 1, "morphism component")?;
            if map.insert(n, m).is_some() {
                return Err(Error::Shape(format!("duplicate morphism component of arity {n}")));
            }
        }
        map.retain(|_, m| !m.is_zero());
        Ok(AInftyMorphism { source, target, components: map })
    }

    pub fn identity(a: Arc<AInfinity>) -> Self {
        let id = MultiMap::identity(a.carrier());
        AInftyMorphism::new(a.clone(), a, [id]).expect("identity has the right shape")
    }

    pub fn source(&self) -> &Arc<AInfinity> {
        &self.source
    }

    pub fn target(&self) -> &Arc<AInfinity> {
        &self.target
    }

    pub fn components(&self) -> &BTreeMap<usize, MultiMap> {
        &self.components
    }

    pub fn component(&self, n: usize) -> Option<&MultiMap> {
        self.components.get(&n)
    }

    pub fn truncation(&self) -> usize {
        self.source.truncation().min(self.target.truncation())
    }
}

fn compose_all(outer: &MultiMap, parts: &[&MultiMap]) -> Result<MultiMap> {
    let factors: Vec<Factor<'_>> = parts.iter().map(|m| Factor::Map(m)).collect();
    outer.compose(&factors)
}

fn gather<'a>(family: &'a BTreeMap<usize, MultiMap>, r: &[usize]) -> Option<Vec<&'a MultiMap>> {
    r.iter().map(|x| family.get(x)).collect()
}

/// Residuals of the morphism relation
/// `∂_W f_n + Σ_{B(n)} (−1)^ϑ ν_k(f_{r₁}⊗…⊗f_{r_k}) − f₁μ_n + Σ_i (−1)^n f_n(…∂…) + Σ_{A(n)} (−1)^{i(ℓ+1)+n} f_k(…μ_ℓ…)`.
/// At arity 1 this is `∂_W f₁ − f₁ ∂_V`.
pub fn check_morphism(m: &AInftyMorphism, n_max: usize) -> Result<Residuals> {
    check_range(n_max, m.truncation())?;
    let (mu, nu) = (&*m.source, &*m.target);
    let (v, w) = (mu.carrier(), nu.carrier());
    let f = &m.components;
    let mut out = Residuals::new("A-infinity morphism relations");
    for n in 1..=n_max {
        let mut rel = Relation::new(v, w, n, n as i32 - 2);
        if let Some(fnn) = f.get(&n) {
            rel.add(Sign::Plus, nu.differential().after(fnn))?;
        }
        if n == 1 {
            if let Some(f1) = f.get(&1) {
                rel.add(Sign::Minus, f1.after(mu.differential()))?;
            }
        } else {
            for r in enum_b(n) {
                if let (Some(nuk), Some(parts)) = (nu.op(r.len()), gather(f, &r)) {
                    rel.add(Sign::pow(theta(&r)), compose_all(nuk, &parts))?;
                }
            }
            if let (Some(f1), Some(mun)) = (f.get(&1), mu.op(n)) {
                rel.add(Sign::Minus, f1.after(mun))?;
            }
            if let Some(fnn) = f.get(&n) {
                for i in 1..=n {
                    rel.add(Sign::pow(n as i64), insert(fnn, i, mu.differential()))?;
                }
            }
            for t in enum_a(n) {
                if let (Some(fk), Some(ml)) = (f.get(&t.k), mu.op(t.l)) {
                    rel.add(a_sign(t.i, t.l, n), insert(fk, t.i, ml))?;
                }
            }
        }
        out.push(n, rel.finish());
    }
    Ok(out)
}

/// `(gf)_n = g₁f_n + Σ_{B(n)} (−1)^ϑ g_k(f_{r₁}⊗…⊗f_{r_k})`.
pub fn compose_morphisms(g: &AInftyMorphism, f: &AInftyMorphism) -> Result<AInftyMorphism> {
    if f.target != g.source {
        return Err(Error::Shape("morphisms are not composable".into()));
    }
    if f.truncation() != g.truncation() {
        return Err(Error::Truncation("composed morphisms have different truncations".into()));
    }
    let n_max = f.truncation();
    let (u, w) = (f.source.carrier(), g.target.carrier());
    let mut comps = Vec::new();
    for n in 1..=n_max {
        let mut rel = Relation::new(u, w, n, n as i32 - 1);
        if let (Some(g1), Some(fnn)) = (g.component(1), f.component(n)) {
            rel.add(Sign::Plus, g1.after(fnn))?;
        }
        for r in enum_b(n) {
            if let (Some(gk), Some(parts)) = (g.component(r.len()), gather(&f.components, &r)) {
                rel.add(Sign::pow(theta(&r)), compose_all(gk, &parts))?;
            }
        }
        comps.push(rel.finish());
    }
    AInftyMorphism::new(f.source.clone(), g.target.clone(), comps)
}

/// An A∞ homotopy with components `h_n` of degree `n`, from `from` to `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInftyHomotopy {
    from: Arc<AInftyMorphism>,
    to: Arc<AInftyMorphism>,
    components: BTreeMap<usize, MultiMap>,
}

impl AInftyHomotopy {
    pub fn new(
        from: Arc<AInftyMorphism>,
        to: Arc<AInftyMorphism>,
        components: impl IntoIterator<Item = MultiMap>,
    ) -> Result<Self> {
        if *from.source != *to.source || *from.target != *to.target {
            return Err(Error::Shape("homotopy between morphisms with different endpoints".into()));
        }
        let (v, w) = (from.source.carrier().clone(), from.target.carrier().clone());
        let mut map = BTreeMap::new();
        for m in components {
            let n = m.arity();
            expect_shape(&m, &v, &w, n, n as i32, "homotopy component")?;
            if map.insert(n, m).is_some() {
                return Err(Error::Shape(format!("duplicate homotopy component of arity {n}")));
            }
        }
        map.retain(|_, m| !m.is_zero());
        Ok(AInftyHomotopy { from, to, components: map })
    }

    pub fn from(&self) -> &Arc<AInftyMorphism> {
        &self.from
    }

    pub fn to(&self) -> &Arc<AInftyMorphism> {
        &self.to
    }

    pub fn components(&self) -> &BTreeMap<usize, MultiMap> {
        &self.components
    }

    pub fn component(&self, n: usize) -> Option<&MultiMap> {
        self.components.get(&n)
    }
}

/// How the sign of the `ν_k(f…f ⊗ h_{r_i} ⊗ g…g)` terms of the homotopy relation is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HomotopySign {
    /// `(−1)^{ϑ(r₁,…,r_k)}`.
    ThetaOnly,
    /// `(−1)^{ϑ(r₁,…,r_k) + (k−i) + r₁ + … + r_{i−1}}`, the sign transported from the suspension.
    Transported,
}

/// Residuals of the homotopy relation
/// `f_n − g_n − [h₁μ_n − Σ_i (−1)^n h_n(…∂…) − Σ_{A(n)} (−1)^{i(ℓ+1)+n} h_k(…μ_ℓ…) + ∂_W h_n
///  + Σ_{B(n)} Σ_i ε ν_k(f…f ⊗ h_{r_i} ⊗ g…g)]` with the transported sign `ε`,
/// reading the target-side term as the differential `∂_W`. At arity 1 this is
/// `f₁ − g₁ − h₁∂_V − ∂_W h₁`.
pub fn check_homotopy(h: &AInftyHomotopy, n_max: usize) -> Result<Residuals> {
    check_homotopy_with(h, n_max, HomotopySign::Transported)
}

/// [`check_homotopy`] with an explicit reading of the `B(n)` sign.
pub fn check_homotopy_with(h: &AInftyHomotopy, n_max: usize, reading: HomotopySign) -> Result<Residuals> {
    check_range(n_max, h.from.truncation())?;
    let (mu, nu) = (&*h.from.source, &*h.from.target);
    let (v, w) = (mu.carrier(), nu.carrier());
    let (f, g, hh) = (&h.from.components, &h.to.components, &h.components);
    let mut out = Residuals::new("A-infinity homotopy relations");
    for n in 1..=n_max {
        let mut rel = Relation::new(v, w, n, n as i32 - 1);
        if let Some(x) = f.get(&n) {
            rel.add(Sign::Plus, Ok(x.clone()))?;
        }
        if let Some(x) = g.get(&n) {
            rel.add(Sign::Minus, Ok(x.clone()))?;
        }
        if let Some(hn) = hh.get(&n) {
            rel.add(Sign::Minus, nu.differential().after(hn))?;
        }
        if n == 1 {
            if let Some(h1) = hh.get(&1) {
                rel.add(Sign::Minus, h1.after(mu.differential()))?;
            }
        } else {
            if let (Some(h1), Some(mun)) = (hh.get(&1), mu.op(n)) {
                rel.add(Sign::Minus, h1.after(mun))?;
            }
            if let Some(hn) = hh.get(&n) {
                for i in 1..=n {
                    rel.add(Sign::pow(n as i64), insert(hn, i, mu.differential()))?;
                }
            }
            for t in enum_a(n) {
                if let (Some(hk), Some(ml)) = (hh.get(&t.k), mu.op(t.l)) {
                    rel.add(a_sign(t.i, t.l, n), insert(hk, t.i, ml))?;
                }
            }
            for r in enum_b(n) {
                let Some(nuk) = nu.op(r.len()) else { continue };
                let k = r.len();
                for i in 0..k {
                    let shift = match reading {
                        HomotopySign::ThetaOnly => 0,
                        HomotopySign::Transported => (k - 1 - i) + r[..i].iter().sum::<usize>(),
                    };
                    let sign = Sign::Minus * Sign::pow(theta(&r) + shift as i64);
                    let parts: Option<Vec<&MultiMap>> = r
                        .iter()
                        .enumerate()
                        .map(|(j, x)| match j.cmp(&i) {
                            std::cmp::Ordering::Less => f.get(x),
                            std::cmp::Ordering::Equal => hh.get(x),
                            std::cmp::Ordering::Greater => g.get(x),
                        })
                        .collect();
                    if let Some(parts) = parts {
                        rel.add(sign, compose_all(nuk, &parts))?;
                    }
                }
            }
        }
        out.push(n, rel.finish());
    }
    Ok(out)
}

/// A single-component morphism `f₁` (a strict morphism).
pub fn strict_morphism(source: Arc<AInfinity>, target: Arc<AInfinity>, f1: MultiMap) -> Result<AInftyMorphism> {
    AInftyMorphism::new(source, target, [f1])
}
