//! Suspension `s : V → sV` and desuspension `ω : sV → V` as degree ±1
//! identity-on-basis maps, and the induced dictionary between A∞ data on `V`
//! and component families on `T̄sV`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainfty::{AInfinity, AInftyHomotopy, AInftyMorphism};
use crate::coalgebra::ComponentFamily;
use crate::error::{Error, Result};
use crate::graded::{Basis, GradedModule, LinComb, Vector};
use crate::multimap::{apply_block, Factor, MultiMap};
use crate::scalar::Scalar;
use crate::sign::suspension_sign;

/// `(sV)_i = V_{i−1}`.
pub fn suspend_module(v: &GradedModule) -> GradedModule {
    v.shift(1)
}

/// `(ωV)_i = V_{i+1}`.
pub fn desuspend_module(sv: &GradedModule) -> GradedModule {
    sv.shift(-1)
}

fn shift_map(from: &GradedModule, to: &GradedModule, by: i32) -> MultiMap {
    let entries = from.basis().into_iter().map(|b| (vec![b], Vector::single(b.shifted(by), Scalar::one())));
    MultiMap::from_entries(from.clone(), to.clone(), 1, by, entries).expect("shift maps are homogeneous")
}

/// `s : V → sV`, degree +1.
pub fn s_map(v: &GradedModule) -> MultiMap {
    shift_map(v, &suspend_module(v), 1)
}

/// `ω : sV → V`, degree −1.
pub fn omega_map(v: &GradedModule) -> MultiMap {
    shift_map(&suspend_module(v), v, -1)
}

/// `x̂ = s_W ∘ x ∘ ω_V^{⊗n}` for `x : V^{⊗n} → W`.
pub fn suspend_map(x: &MultiMap) -> Result<MultiMap> {
    let omega = omega_map(x.source());
    let inner = x.compose(&vec![Factor::Map(&omega); x.arity()])?;
    s_map(x.target()).after(&inner)
}

/// `x = (−1)^{n(n−1)/2} ω_W ∘ x̂ ∘ s_V^{⊗n}` for `x̂ : (sV)^{⊗n} → sW`, inverting [`suspend_map`].
pub fn desuspend_map(xh: &MultiMap) -> Result<MultiMap> {
    let v = desuspend_module(xh.source());
    let w = desuspend_module(xh.target());
    let s = s_map(&v);
    let inner = xh.compose(&vec![Factor::Map(&s); xh.arity()])?;
    let out = omega_map(&w).after(&inner)?;
    Ok(out.scale(&suspension_sign(xh.arity()).to_scalar()))
}

/// Input words of length `n` on which `s^{⊗n} ∘ ω^{⊗n}` differs from `(−1)^{n(n−1)/2}`.
pub fn sign_identity_defects(v: &GradedModule, n: usize) -> Result<Vec<Vec<Basis>>> {
    let (s, omega) = (s_map(v), omega_map(v));
    let sv = suspend_module(v);
    let expected = suspension_sign(n).to_scalar();
    let mut bad = Vec::new();
    for w in sv.words(n) {
        let mid = apply_block(&vec![Factor::Map(&omega); n], &w)?;
        let mut out = LinComb::new();
        for (u, c) in mid.iter() {
            out.add_scaled(&apply_block(&vec![Factor::Map(&s); n], u)?, c);
        }
        if out != LinComb::single(w.clone(), expected.clone()) {
            bad.push(w);
        }
    }
    Ok(bad)
}

/// An A∞ structure transported to the suspension: `δ₁ = s∂ω`, `δ_n = sμ_nω^{⊗n}`, all of degree −1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspendedAInfinity {
    carrier: GradedModule,
    deltas: BTreeMap<usize, MultiMap>,
    truncation: usize,
}

impl SuspendedAInfinity {
    pub fn carrier(&self) -> &GradedModule {
        &self.carrier
    }

    pub fn deltas(&self) -> &BTreeMap<usize, MultiMap> {
        &self.deltas
    }

    pub fn delta(&self, n: usize) -> Option<&MultiMap> {
        self.deltas.get(&n)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// The coderivation family `{δ₁, δ₂, …}`.
    pub fn codifferential(&self) -> ComponentFamily {
        ComponentFamily::coderivation(self.carrier.clone(), self.truncation, self.deltas.values().cloned())
            .expect("suspended components have degree −1")
    }

    /// The coderivation family `{δ₁}` alone.
    pub fn linear_part(&self) -> ComponentFamily {
        ComponentFamily::coderivation(self.carrier.clone(), self.truncation, self.deltas.get(&1).cloned())
            .expect("suspended components have degree −1")
    }

    /// The coderivation family `{δ₂, δ₃, …}`.
    pub fn higher_part(&self) -> ComponentFamily {
        let higher = self.deltas.range(2..).map(|(_, m)| m.clone());
        ComponentFamily::coderivation(self.carrier.clone(), self.truncation, higher)
            .expect("suspended components have degree −1")
    }
}

pub fn suspend_structure(a: &AInfinity) -> Result<SuspendedAInfinity> {
    let mut deltas = BTreeMap::new();
    for n in 1..=a.truncation() {
        if let Some(m) = a.op(n) {
            let d = suspend_map(m)?;
            if !d.is_zero() {
                deltas.insert(n, d);
            }
        }
    }
    let carrier = suspend_module(a.carrier());
    deltas.entry(1).or_insert_with(|| MultiMap::zero(carrier.clone(), carrier.clone(), 1, -1));
    Ok(SuspendedAInfinity { carrier, deltas, truncation: a.truncation() })
}

pub fn desuspend_structure(s: &SuspendedAInfinity) -> Result<AInfinity> {
    let carrier = desuspend_module(&s.carrier);
    let differential = match s.deltas.get(&1) {
        Some(d) => desuspend_map(d)?,
        None => MultiMap::zero(carrier.clone(), carrier.clone(), 1, -1),
    };
    let products = s.deltas.range(2..).map(|(_, d)| desuspend_map(d)).collect::<Result<Vec<_>>>()?;
    AInfinity::new(carrier, differential, products, s.truncation)
}

/// The suspended family of an A∞ structure built from explicit `δ_n`.
pub fn suspended_from_deltas(
    carrier: GradedModule,
    deltas: impl IntoIterator<Item = MultiMap>,
    truncation: usize,
) -> Result<SuspendedAInfinity> {
    let fam = ComponentFamily::coderivation(carrier.clone(), truncation, deltas)?;
    let mut deltas = fam.components().clone();
    deltas.entry(1).or_insert_with(|| MultiMap::zero(carrier.clone(), carrier.clone(), 1, -1));
    Ok(SuspendedAInfinity { carrier, deltas, truncation })
}

fn suspend_all(components: &BTreeMap<usize, MultiMap>) -> Result<Vec<MultiMap>> {
    components.values().map(suspend_map).collect()
}

/// `f̂_n = s_W ∘ φ_n ∘ ω_V^{⊗n}`, degree 0.
pub fn suspend_morphism(m: &AInftyMorphism) -> Result<ComponentFamily> {
    ComponentFamily::morphism(
        suspend_module(m.source().carrier()),
        suspend_module(m.target().carrier()),
        m.truncation(),
        suspend_all(m.components())?,
    )
}

/// `ĥ_n = s_W ∘ h_n ∘ ω_V^{⊗n}`, degree +1, flanked by the suspended endpoints.
pub fn suspend_homotopy(h: &AInftyHomotopy) -> Result<ComponentFamily> {
    ComponentFamily::homotopy(suspend_morphism(h.from())?, suspend_morphism(h.to())?, suspend_all(h.components())?)
}

/// The A∞ morphism with components desuspended from a morphism family.
pub fn desuspend_morphism(
    family: &ComponentFamily,
    source: Arc<AInfinity>,
    target: Arc<AInfinity>,
) -> Result<AInftyMorphism> {
    if suspend_module(source.carrier()) != *family.source() || suspend_module(target.carrier()) != *family.target() {
        return Err(Error::Shape("family does not act between the suspended carriers".into()));
    }
    let comps = family.components().values().map(desuspend_map).collect::<Result<Vec<_>>>()?;
    AInftyMorphism::new(source, target, comps)
}

/// The A∞ homotopy with components desuspended from a homotopy family.
pub fn desuspend_homotopy(
    family: &ComponentFamily,
    from: Arc<AInftyMorphism>,
    to: Arc<AInftyMorphism>,
) -> Result<AInftyHomotopy> {
    let comps = family.components().values().map(desuspend_map).collect::<Result<Vec<_>>>()?;
    AInftyHomotopy::new(from, to, comps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_shift_roundtrip() {
        let v = GradedModule::new([(0, 2), (3, 1)]);
        let sv = suspend_module(&v);
        assert_eq!(sv.dim(1), 2);
        assert_eq!(sv.dim(4), 1);
        assert_eq!(desuspend_module(&sv), v);
    }

    #[test]
    fn global_sign_small_cases() {
        let v = GradedModule::new([(0, 1), (1, 1)]);
        for n in 1..=6 {
            assert!(sign_identity_defects(&v, n).unwrap().is_empty());
        }
        assert!(suspension_sign(2).is_minus());
        assert!(!suspension_sign(4).is_minus());
    }
}
