use std::time::Instant;

use stasheff::ainfty::AInfinity;
use stasheff::kernels::transfer;
use stasheff::perturbation::{
    build_perturbation, check_annihilation_lemmas, check_side_conditions, compare_hpl_vs_kernels, hpl_transfer,
    lowers_homogeneity, shape_defects, ComparisonStatus,
};
use stasheff::retract::{
    harmonious_retract, instance_forms, instance_massey, massey, ChainComplex, DeformationRetract,
};
use stasheff::suspension::suspend_structure;
use stasheff::{Basis, Error, GradedModule, MultiMap, Scalar, Vector};

fn full_pipeline(a: &AInfinity, r: &DeformationRetract, n: usize) {
    let data = build_perturbation(&suspend_structure(a).unwrap(), r).unwrap();
    assert!(lowers_homogeneity(&data.perturbation));
    assert!((1..=n).all(|k| data.nilpotency[&k] <= k));
    let out = hpl_transfer(&data).unwrap();
    for (name, op) in out.identities.all() {
        assert!(op.is_zero(), "{name} has {} nonzero entries", op.nonzero_count());
    }
    assert!(out.series_disagreements().is_empty());
    let pkg = transfer(r, a, n).unwrap();
    assert!(pkg.reports.is_zero());
    let cmp = compare_hpl_vs_kernels(&out, &pkg, n).unwrap();
    assert_eq!(cmp.status, ComparisonStatus::Exact, "{cmp:?}");
    let lemmas = check_annihilation_lemmas(&pkg, n).unwrap();
    for l in lemmas.all() {
        assert!(l.is_zero(), "{} fails: {:?}", l.name, l.first_offender().map(|c| (c.arity, c.position)));
    }
    assert_eq!(out.extraction_status(), "canonical");
    assert_eq!(shape_defects(&out).unwrap().total(), 0);
}

#[test]
fn massey_hpl_agrees_with_kernels() {
    let start = Instant::now();
    let a = instance_massey(5).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    full_pipeline(&a, &r, 5);
    assert!(start.elapsed().as_secs() < 10);
}

#[test]
fn forms_hpl_agrees_with_kernels() {
    let a = instance_forms(5).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    full_pipeline(&a, &r, 5);
}

fn delta_word(b: Basis) -> Vec<Basis> {
    vec![b.shifted(1)]
}

#[test]
fn massey_perturbation_kills_homogeneity_one() {
    let a = instance_massey(5).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    let data = build_perturbation(&suspend_structure(&a).unwrap(), &r).unwrap();
    assert!(data.perturbation.block(1, 1).is_empty());
    assert!(data.perturbation.get(&delta_word(massey::X)).is_none());
    assert!((1..=5).all(|n| data.nilpotency[&n] <= n));
    assert_eq!(data.nilpotency[&1], 1);
}

/// `h + ∂k − k∂` with `k(x) = u`, which keeps the homotopy identity but breaks `hg = 0`.
fn shifted_massey(n: usize) -> (AInfinity, DeformationRetract) {
    let a = instance_massey(n).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    let v = a.carrier().clone();
    let mut k = MultiMap::zero(v.clone(), v, 1, 2);
    k.add_entry(vec![massey::X], &Vector::single(massey::U, Scalar::one())).unwrap();
    (a, r.with_homotopy_shift(&k).unwrap())
}

#[test]
fn broken_side_conditions_keep_operator_identities_and_skip_comparison() {
    let (a, r) = shifted_massey(4);
    let sc = r.side_conditions();
    assert!(!sc.hg_zero);
    assert_eq!(check_side_conditions(&r).unwrap(), sc);
    let data = build_perturbation(&suspend_structure(&a).unwrap(), &r).unwrap();
    let out = hpl_transfer(&data).unwrap();
    assert!(out.identities.is_zero());
    assert_eq!(out.extraction_status(), "non-canonical");
    let pkg = transfer(&r, &a, 4).unwrap();
    let cmp = compare_hpl_vs_kernels(&out, &pkg, 4).unwrap();
    assert_eq!(cmp.status, ComparisonStatus::SideConditionsNotMet);
    assert_eq!(cmp.status.as_str(), "skipped: side conditions not met");
    assert!(shape_defects(&out).unwrap().total() > 0);
}

#[test]
fn small_twist_is_flagged() {
    let v = GradedModule::new([(0, 1), (1, 1)]);
    let c = ChainComplex::trivial(v.clone());
    let r = harmonious_retract(&c).unwrap();
    assert!(r.h().is_zero());
    let mut twist = MultiMap::zero(v.clone(), v, 1, 1);
    twist.add_entry(vec![Basis::new(0, 0)], &Vector::single(Basis::new(1, 0), Scalar::one())).unwrap();
    let r2 = r.with_small_twist(&twist).unwrap();
    let sc = check_side_conditions(&r2).unwrap();
    assert!(sc.fg_identity);
    assert!(!sc.hg_zero);
    assert!(!sc.fh_zero);
    assert!(sc.hh_zero);
}

#[test]
fn zero_complex_satisfies_side_conditions() {
    let c = ChainComplex::trivial(GradedModule::zero());
    let r = harmonious_retract(&c).unwrap();
    assert!(check_side_conditions(&r).unwrap().all());
}

#[test]
fn trivial_perturbation_returns_the_inputs() {
    let forms = instance_forms(4).unwrap();
    let a = AInfinity::from_complex(forms.carrier().clone(), forms.differential().clone(), 4).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    let data = build_perturbation(&suspend_structure(&a).unwrap(), &r).unwrap();
    assert!(data.perturbation.is_zero());
    let out = hpl_transfer(&data).unwrap();
    assert!(out.nu.is_zero());
    assert_eq!(out.codifferential, data.delta_w);
    assert_eq!(out.psi, data.g);
    assert_eq!(out.phi, data.f);
    assert_eq!(out.homotopy, data.h);
    assert!(out.series.is_zero());
}

#[test]
fn homogeneity_one_blocks() {
    let a = instance_massey(4).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    let data = build_perturbation(&suspend_structure(&a).unwrap(), &r).unwrap();
    let out = hpl_transfer(&data).unwrap();
    assert!(out.nu.block(1, 1).is_empty());
    assert_eq!(out.phi.block(1, 1), data.f.block(1, 1));
}

#[test]
fn non_nilpotent_perturbation_is_rejected() {
    let a = instance_massey(3).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    let mut data = build_perturbation(&suspend_structure(&a).unwrap(), &r).unwrap();
    data.perturbation = data.delta_v.clone();
    assert_eq!(hpl_transfer(&data).unwrap_err(), Error::Nilpotency(1));
}
