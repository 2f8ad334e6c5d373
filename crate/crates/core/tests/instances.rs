use stasheff::ainfty::check_structure;
use stasheff::coalgebra::{check_codifferential, codifferential_square, components_match, lift_colinearity_defects};
use stasheff::retract::{harmonious_retract, homology, instance_forms, instance_massey, massey};
use stasheff::suspension::{desuspend_structure, suspend_structure};
use stasheff::{Scalar, Vector};

#[test]
fn massey_instance_is_a_dga() {
    let a = instance_massey(6).unwrap();
    assert!(check_structure(&a, 6).unwrap().is_zero());
}

#[test]
fn forms_instance_is_a_dga() {
    let a = instance_forms(6).unwrap();
    assert!(check_structure(&a, 6).unwrap().is_zero());
}

#[test]
fn massey_suspension_is_a_codifferential() {
    let a = instance_massey(5).unwrap();
    let s = suspend_structure(&a).unwrap();
    let fam = s.codifferential();
    let res = check_codifferential(&fam, 5).unwrap();
    assert!(res.is_zero());
    let sq = codifferential_square(&fam).unwrap();
    assert!(sq.is_zero());
    assert!(components_match(&sq, &res));
    assert!(lift_colinearity_defects(&fam).is_empty());
    assert_eq!(desuspend_structure(&s).unwrap(), a);
}

#[test]
fn massey_homology_and_retract() {
    let a = instance_massey(5).unwrap();
    let h = homology(&a.complex()).unwrap();
    assert_eq!(h.dim(1), 3);
    assert_eq!(h.dim(2), 0);
    assert_eq!(h.dim(3), 0);
    assert_eq!(h.dim(4), 2);
    let r = harmonious_retract(&a.complex()).unwrap();
    assert!(r.side_conditions().all());
    let hp = r.h().get(&[massey::P]).unwrap();
    assert_eq!(hp, &Vector::single(massey::U, -Scalar::one()));
}
