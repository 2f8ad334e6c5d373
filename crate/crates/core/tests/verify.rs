use std::sync::Arc;

use stasheff::ainfty::AInfinity;
use stasheff::corpus::{corpus, MAX_DEGREE, MAX_DIMENSION, MIN_DEGREE};
use stasheff::kernels::transfer;
use stasheff::retract::{harmonious_retract, instance_forms, instance_massey};
use stasheff::sign::{with_mutant, Mutant};
use stasheff::verify::{
    corrupt_homotopy, corrupt_morphism, corrupt_structure, equivalence_rows, first_failure, h_zero_defects,
    mutation_suite, parity_probe, rescaling_retract, selftest, selftest_instance, tally_directions,
    trivial_perturbation_defects, Relation,
};
use stasheff::{GradedModule, MultiMap};

#[test]
fn massey_and_forms_pass_the_full_battery() {
    for (label, a) in [("massey", instance_massey(5).unwrap()), ("forms", instance_forms(5).unwrap())] {
        let r = harmonious_retract(&a.complex()).unwrap();
        let report = selftest_instance(label, &a, &r, 5).unwrap();
        let failures: Vec<_> = report.failures().map(|c| (&c.name, &c.detail)).collect();
        assert!(failures.is_empty(), "{label}: {failures:?}");
        assert!(report.checks.len() > 30);
    }
}

#[test]
fn small_selftest_passes_and_exercises_every_direction() {
    let report = selftest(12, 1, 4).unwrap();
    assert!(report.passed());
    assert_eq!(report.instances.len(), 12);
    assert_eq!(report.directions.len(), 6);
    for d in &report.directions {
        assert_eq!(d.discrepancies, 0, "{}", d.name());
        assert!(d.fully_exercised(), "{}", d.name());
    }
    assert_eq!(report.mutants.len(), Mutant::ALL.len());
    assert_eq!(report.mutants_killed(), Mutant::ALL.len());
}

#[test]
fn empty_selftest_is_trivially_green() {
    let report = selftest(0, 1, 5).unwrap();
    assert!(report.passed());
    assert!(report.instances.is_empty());
    assert!(report.mutants.is_empty());
}

#[test]
fn selftest_is_deterministic() {
    assert_eq!(selftest(4, 9, 3).unwrap(), selftest(4, 9, 3).unwrap());
}

#[test]
fn corpus_respects_its_bounds() {
    for inst in corpus(40, 3, 3).unwrap() {
        let v = inst.algebra.carrier();
        assert!(v.total_dim() <= MAX_DIMENSION);
        assert!(v.dims().keys().all(|d| (MIN_DEGREE..=MAX_DEGREE).contains(d)));
        assert!(inst.retract.side_conditions().all());
    }
}

#[test]
fn corrupted_copies_break_and_are_seen_by_all_three_checks() {
    let a = instance_massey(4).unwrap();
    let r = harmonious_retract(&a.complex()).unwrap();
    let pkg = transfer(&r, &a, 4).unwrap();
    assert!(corrupt_structure(&a, 4).unwrap().is_some());
    assert!(corrupt_morphism(&pkg.phi, 4).unwrap().is_some());
    assert!(corrupt_homotopy(&pkg.homotopy, 4).unwrap().is_some());
    let rows = equivalence_rows(&a, &r, 4).unwrap();
    for relation in Relation::ALL {
        let failing = rows.iter().filter(|x| x.relation == relation && x.corrupted).collect::<Vec<_>>();
        assert_eq!(failing.len(), 1, "{relation:?}");
        let row = failing[0];
        assert!(!row.definition && !row.components && !row.operator && row.residuals_match, "{row:?}");
    }
    assert!(rows.iter().all(|x| x.consistent()));
    assert!(tally_directions(&rows).iter().all(|d| d.fully_exercised() && d.discrepancies == 0));
}

#[test]
fn one_dimensional_algebra_has_no_breaking_structure_corruption() {
    let v = GradedModule::new([(0, 1)]);
    let a = AInfinity::from_complex(v.clone(), MultiMap::zero(v.clone(), v, 1, -1), 3).unwrap();
    assert!(corrupt_structure(&a, 3).unwrap().is_none());
}

#[test]
fn h_zero_retracts_degenerate_exactly() {
    for a in [instance_massey(5).unwrap(), instance_forms(5).unwrap()] {
        let r = rescaling_retract(&a.complex()).unwrap();
        assert!(r.h().is_zero());
        assert!(r.side_conditions().all());
        assert_eq!(h_zero_defects(&a, 5).unwrap(), vec![]);
        let pkg = transfer(&r, &a, 5).unwrap();
        assert!(pkg.reports.is_zero());
        assert!(pkg.nu.op(3).is_none());
        assert!(pkg.phi.components().keys().all(|&k| k == 1));
    }
}

#[test]
fn zero_differential_gives_the_identity_retract() {
    let a = instance_massey(3).unwrap();
    let bare = AInfinity::new(
        a.carrier().clone(),
        MultiMap::zero(a.carrier().clone(), a.carrier().clone(), 1, -1),
        a.products().values().cloned(),
        3,
    )
    .unwrap();
    let r = harmonious_retract(&bare.complex()).unwrap();
    let id = MultiMap::identity(a.carrier());
    assert_eq!(r.f(), &id);
    assert_eq!(r.g(), &id);
    assert!(r.h().is_zero());
}

#[test]
fn trivial_perturbation_returns_the_input() {
    for a in [instance_massey(4).unwrap(), instance_forms(4).unwrap()] {
        assert!(trivial_perturbation_defects(&a).unwrap().is_empty());
    }
}

#[test]
fn parity_probe_keeps_one_element_per_parity() {
    let v = GradedModule::new([(-3, 2), (-2, 1), (0, 4), (1, 1)]);
    assert_eq!(parity_probe(&v), GradedModule::new([(-3, 1), (-2, 1)]));
    assert_eq!(parity_probe(&GradedModule::zero()), GradedModule::zero());
}

#[test]
fn every_mutant_is_killed_on_massey() {
    let a = Arc::new(instance_massey(4).unwrap());
    let outcomes = mutation_suite(&[("massey".into(), a.clone())], 4);
    let survivors: Vec<_> = outcomes.iter().filter(|o| o.killed_by.is_none()).map(|o| o.mutant).collect();
    assert!(survivors.is_empty(), "{survivors:?}");
    assert_eq!(first_failure(&a, 4), None);
    assert!(with_mutant(Mutant::ThetaOffset, || first_failure(&a, 4)).is_some());
}
