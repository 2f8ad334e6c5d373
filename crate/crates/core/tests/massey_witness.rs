use std::collections::BTreeMap;

use stasheff::kernels::transfer;
use stasheff::perturbation::{build_perturbation, hpl_transfer};
use stasheff::retract::{harmonious_retract, instance_massey, massey};
use stasheff::suspension::suspend_structure;
use stasheff::{Basis, LinComb, Scalar, Vector};

/// A direct evaluation of `ν₃ = (−1)^{3} ω f̂ p̂₃ ĝ^{⊗3} s^{⊗3}` on degree-one inputs,
/// with `p̂₃ = δ₂(ĥδ₂ ⊗ 1) + δ₂(1 ⊗ ĥδ₂)`, `δ₂ = sμ₂(ω ⊗ ω)`, `ĥ = shω`, using
/// only the Koszul rule for each suspension and desuspension.
struct Oracle {
    mu2: BTreeMap<(Basis, Basis), Basis>,
    h: BTreeMap<Basis, (i64, Basis)>,
}

impl Oracle {
    fn massey() -> Self {
        use massey::*;
        let mu2 = [((X, Y), P), ((Y, Z), Q), ((U, Z), M), ((X, W), M_PRIME)].into_iter().collect();
        let h = [(P, (-1, U)), (Q, (-1, W))].into_iter().collect();
        Oracle { mu2, h }
    }

    /// `δ₂(sa ⊗ sb) = (−1)^{|sa|·|ω|} s(ab) = (−1)^{|a|+1} s(ab)`, in unsuspended labels.
    fn delta2(&self, a: (i64, Basis), b: (i64, Basis)) -> Option<(i64, Basis)> {
        let out = self.mu2.get(&(a.1, b.1))?;
        let sign = if (a.1.degree + 1) % 2 == 0 { 1 } else { -1 };
        Some((a.0 * b.0 * sign, *out))
    }

    fn hat_h(&self, a: (i64, Basis)) -> Option<(i64, Basis)> {
        self.h.get(&a.1).map(|(c, b)| (a.0 * c, *b))
    }

    fn nu3(&self, x: Basis, y: Basis, z: Basis) -> BTreeMap<Basis, i64> {
        let input_sign = {
            let koszul = (y.degree + 2 * x.degree) % 2;
            let global = -1;
            global * if koszul == 0 { 1 } else { -1 }
        };
        let mut out = BTreeMap::new();
        let left = self.delta2((1, x), (1, y)).and_then(|v| self.hat_h(v)).and_then(|v| self.delta2(v, (1, z)));
        let right = self.delta2((1, y), (1, z)).and_then(|v| self.hat_h(v)).and_then(|v| self.delta2((1, x), v));
        for (c, b) in left.into_iter().chain(right) {
            *out.entry(b).or_insert(0) += input_sign * c;
        }
        out.retain(|_, c| *c != 0);
        out
    }
}

fn class_of(r: &stasheff::retract::DeformationRetract, v: Basis) -> Basis {
    r.small()
        .module()
        .basis()
        .into_iter()
        .find(|w| r.g().get(&[*w]) == Some(&Vector::single(v, Scalar::one())))
        .expect("degree-one basis elements are cycles represented by themselves")
}

#[test]
fn massey_triple_product_matches_direct_evaluation() {
    let a = instance_massey(5).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    let pkg = transfer(&r, &a, 5).unwrap();
    let oracle = Oracle::massey();
    let expected_v = oracle.nu3(massey::X, massey::Y, massey::Z);
    assert_eq!(expected_v, [(massey::M, -1), (massey::M_PRIME, -1)].into_iter().collect());

    let mut expected = Vector::new();
    for (b, c) in &expected_v {
        expected.add_scaled(r.f().get(&[*b]).unwrap(), &Scalar::from_int(*c));
    }
    let word = [class_of(&r, massey::X), class_of(&r, massey::Y), class_of(&r, massey::Z)];
    let nu3 = pkg.nu.op(3).unwrap();
    assert_eq!(nu3.get(&word), Some(&expected));
    assert!(!expected.is_zero());

    let data = build_perturbation(&suspend_structure(&a).unwrap(), &r).unwrap();
    let hpl = hpl_transfer(&data).unwrap();
    let suspended_word: Vec<Basis> = word.iter().map(|b| b.shifted(1)).collect();
    let hat: LinComb<Vec<Basis>> = expected.iter().map(|(b, c)| (vec![b.shifted(1)], c.clone())).collect();
    let block = hpl.nu.block(3, 1);
    assert_eq!(block.get(&suspended_word), Some(&hat));
}

#[test]
fn massey_transfer_has_no_binary_product() {
    let a = instance_massey(4).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    let pkg = transfer(&r, &a, 4).unwrap();
    assert!(pkg.nu.op(2).is_none_or(|m| m.is_zero()));
}
