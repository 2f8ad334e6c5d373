use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stasheff::ainfty::{check_structure, compose_morphisms, AInftyMorphism};
use stasheff::coalgebra::ComponentFamily;
use stasheff::corpus::{corpus_instance, side_condition_breaker};
use stasheff::graded::word_degree;
use stasheff::index_sets::{enum_a, enum_b, enum_c};
use stasheff::kernels::transfer;
use stasheff::perturbation::{build_perturbation, compare_hpl_vs_kernels, hpl_transfer, ComparisonStatus};
use stasheff::retract::{harmonious_retract, homology};
use stasheff::suspension::{desuspend_map, sign_identity_defects, suspend_map, suspend_module, suspend_structure};
use stasheff::verify::selftest_instance;
use stasheff::{insert, koszul_sign, suspension_sign, theta, Factor, GradedModule, MultiMap, Scalar, Sign, Vector};

fn small_module(rng: &mut ChaCha8Rng) -> GradedModule {
    loop {
        let m = GradedModule::new((-1..=1).map(|d| (d, rng.gen_range(0..=2usize))));
        if m.total_dim() > 0 && m.total_dim() <= 4 {
            return m;
        }
    }
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

fn random_map(
    rng: &mut ChaCha8Rng,
    source: &GradedModule,
    target: &GradedModule,
    arity: usize,
    degree: i32,
) -> MultiMap {
    let mut m = MultiMap::zero(source.clone(), target.clone(), arity, degree);
    for w in source.words(arity) {
        for b in target.basis_in_degree(word_degree(&w) + degree) {
            if rng.gen_bool(0.5) {
                m.add_entry(w.clone(), &Vector::single(b, random_scalar(rng))).unwrap();
            }
        }
    }
    m
}

fn random_map_in(
    rng: &mut ChaCha8Rng,
    v: &GradedModule,
    arity: usize,
    degrees: std::ops::RangeInclusive<i32>,
) -> MultiMap {
    let degree = rng.gen_range(degrees);
    random_map(rng, v, v, arity, degree)
}

fn parity(d: i32) -> i64 {
    d.rem_euclid(2) as i64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nested_insertion_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = small_module(&mut rng);
        let (ka, kb, kc) = (rng.gen_range(1..=2), rng.gen_range(1..=2), rng.gen_range(1..=2));
        let a = random_map_in(&mut rng, &v, ka, -1..=1);
        let b = random_map_in(&mut rng, &v, kb, -1..=1);
        let c = random_map_in(&mut rng, &v, kc, -1..=1);
        let i = rng.gen_range(1..=ka);
        let j = rng.gen_range(1..=kb);
        let left = insert(&insert(&a, i, &b).unwrap(), i + j - 1, &c).unwrap();
        let right = insert(&a, i, &insert(&b, j, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    /// `(b ⊗ 1)(1 ⊗ c) = b ⊗ c` while `(1 ⊗ c)(b ⊗ 1) = (−1)^{|b||c|} b ⊗ c`.
    #[test]
    fn parallel_insertions_commute_up_to_koszul_sign(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = small_module(&mut rng);
        let a = random_map_in(&mut rng, &v, 2, -1..=1);
        let (kb, kc) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let (db, dc) = (rng.gen_range(-1..=1), rng.gen_range(-1..=1));
        let b = random_map(&mut rng, &v, &v, kb, db);
        let c = random_map(&mut rng, &v, &v, kc, dc);
        let b_first = insert(&insert(&a, 1, &b).unwrap(), kb + 1, &c).unwrap();
        let c_first = insert(&insert(&a, 2, &c).unwrap(), 1, &b).unwrap();
        let sign = Sign::pow(parity(db) * parity(dc)).to_scalar();
        prop_assert_eq!(b_first, c_first.scale(&sign));
    }

    #[test]
    fn identity_factors_leave_a_map_unchanged(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = small_module(&mut rng);
        let k = rng.gen_range(1..=3);
        let a = random_map_in(&mut rng, &v, k, -1..=1);
        prop_assert_eq!(a.compose(&vec![Factor::Id; k]).unwrap(), a.clone());
        let id = MultiMap::identity(&v);
        prop_assert_eq!(a.compose(&vec![Factor::Map(&id); k]).unwrap(), a);
    }

    #[test]
    fn composition_is_linear_in_the_outer_map(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = small_module(&mut rng);
        let d = rng.gen_range(-1..=1);
        let a1 = random_map(&mut rng, &v, &v, 2, d);
        let a2 = random_map(&mut rng, &v, &v, 2, d);
        let inner = random_map_in(&mut rng, &v, 2, -1..=1);
        let c = random_scalar(&mut rng);
        let mut sum = a1.clone();
        sum.add_assign_scaled(&a2, &c).unwrap();
        let lhs = insert(&sum, 2, &inner).unwrap();
        let mut rhs = insert(&a1, 2, &inner).unwrap();
        rhs.add_assign_scaled(&insert(&a2, 2, &inner).unwrap(), &c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn suspension_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = small_module(&mut rng);
        let k = rng.gen_range(1..=3);
        let x = random_map_in(&mut rng, &v, k, -1..=2);
        let hat = suspend_map(&x).unwrap();
        prop_assert_eq!(hat.degree(), x.degree() + 1 - k as i32);
        prop_assert_eq!(hat.source(), &suspend_module(&v));
        prop_assert_eq!(desuspend_map(&hat).unwrap(), x);
    }

    #[test]
    fn lift_then_extract_is_the_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = small_module(&mut rng);
        let w = small_module(&mut rng);
        let comps: Vec<MultiMap> = (1..=3).map(|k| random_map(&mut rng, &v, &w, k, 0)).collect();
        let fam = ComponentFamily::morphism(v.clone(), w, 3, comps.clone()).unwrap();
        let back = fam.lift().components();
        let expected: Vec<MultiMap> = comps.into_iter().filter(|m| !m.is_zero()).collect();
        prop_assert_eq!(back.into_values().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn koszul_sign_is_multiplicative(
        left in prop::collection::vec(-3i32..=3, 0..5),
        right in prop::collection::vec(-3i32..=3, 0..5),
        d in -3i32..=3,
    ) {
        let both: Vec<i32> = left.iter().chain(&right).copied().collect();
        prop_assert_eq!(koszul_sign(&both, d), koszul_sign(&left, d) * koszul_sign(&right, d));
        let odd_passes = both.iter().filter(|x| x.rem_euclid(2) == 1).count() as i64;
        prop_assert_eq!(koszul_sign(&both, d), Sign::pow(parity(d) * odd_passes));
    }

    /// `Σ_{i<j} u_i(u_j + 1) = Σ_j (u_j + 1)(u₁ + … + u_{j−1})`.
    #[test]
    fn theta_matches_prefix_sum_form(u in prop::collection::vec(1usize..=5, 0..7)) {
        let mut prefix = 0i64;
        let mut expected = 0i64;
        for &x in &u {
            expected += (x as i64 + 1) * prefix;
            prefix += x as i64;
        }
        prop_assert_eq!(theta(&u), expected);
    }

    #[test]
    fn scalar_field_axioms_and_round_trip(a in -50i64..50, b in 1i64..20, c in -50i64..50, d in 1i64..20) {
        let x = Scalar::ratio(a, b);
        let y = Scalar::ratio(c, d);
        prop_assert_eq!(x.to_string().parse::<Scalar>().unwrap(), x.clone());
        let lhs = &(&x + &y) * &y;
        let rhs = &(&x * &y) + &(&y * &y);
        prop_assert_eq!(lhs, rhs);
        if !y.is_zero() {
            prop_assert!((&y * &y.inverse().unwrap()).is_one());
            prop_assert_eq!(x.checked_div(&y).unwrap() * y.clone(), x);
        } else {
            prop_assert!(y.inverse().is_err());
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn index_set_sizes() {
    for n in 1..=9usize {
        let a: usize = (2..n).sum();
        assert_eq!(enum_a(n).len(), a, "A({n})");
        let b = if n == 0 { 0 } else { (1usize << (n - 1)) - 1 };
        assert_eq!(enum_b(n).len(), b, "B({n})");
        let mut c = 0;
        for k in 2..=n {
            for i in 1..=k {
                let m = n + i - k;
                if m >= i {
                    c += binomial(m - 1, i - 1);
                }
            }
        }
        assert_eq!(enum_c(n).len(), c, "C({n})");
    }
}

#[test]
fn suspension_sign_identity_through_arity_eight() {
    let v = GradedModule::new([(0, 1), (1, 1)]);
    for n in 1..=8 {
        assert!(sign_identity_defects(&v, n).unwrap().is_empty(), "n={n}");
        let expected = if (n * (n - 1) / 2) % 2 == 0 { Sign::Plus } else { Sign::Minus };
        assert_eq!(suspension_sign(n), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn corpus_instances_pass_every_checker(seed in 0u64..1000, index in 0usize..50) {
        let inst = corpus_instance(seed, index, 4).unwrap();
        prop_assert!(check_structure(&inst.algebra, 4).unwrap().is_zero());
        let h = homology(&inst.algebra.complex()).unwrap();
        prop_assert_eq!(inst.retract.small().module(), &h);
        let report = selftest_instance("prop", &inst.algebra, &inst.retract, 4).unwrap();
        let failures: Vec<_> = report.failures().map(|c| (c.name.clone(), c.detail.clone())).collect();
        prop_assert!(failures.is_empty(), "{:?}", failures);
    }

    #[test]
    fn broken_side_conditions_skip_the_comparison(seed in 0u64..1000, index in 0usize..50) {
        let inst = corpus_instance(seed, index, 4).unwrap();
        if let Some(broken) = side_condition_breaker(&inst.retract).unwrap() {
            prop_assert!(!broken.side_conditions().all());
            let data = build_perturbation(&suspend_structure(&inst.algebra).unwrap(), &broken).unwrap();
            let out = hpl_transfer(&data).unwrap();
            prop_assert!(out.identities.is_zero());
            prop_assert_eq!(out.extraction_status(), "non-canonical");
            let pkg = transfer(&broken, &inst.algebra, 4).unwrap();
            let cmp = compare_hpl_vs_kernels(&out, &pkg, 4).unwrap();
            prop_assert_eq!(cmp.status, ComparisonStatus::SideConditionsNotMet);
        }
    }

    #[test]
    fn transfer_is_deterministic(seed in 0u64..1000, index in 0usize..50) {
        let inst = corpus_instance(seed, index, 3).unwrap();
        let again = corpus_instance(seed, index, 3).unwrap();
        prop_assert_eq!(&inst, &again);
        let r = harmonious_retract(&inst.algebra.complex()).unwrap();
        prop_assert_eq!(&r, &inst.retract);
        prop_assert_eq!(transfer(&r, &inst.algebra, 3).unwrap(), transfer(&r, &inst.algebra, 3).unwrap());
    }

    #[test]
    fn morphism_composition_is_associative(seed in 0u64..1000, index in 0usize..50, salt in any::<u64>()) {
        let a = Arc::new(corpus_instance(seed, index, 3).unwrap().algebra);
        let v = a.carrier().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(salt);
        let mut morphism = || {
            let mut f1 = MultiMap::zero(v.clone(), v.clone(), 1, 0);
            for b in v.basis() {
                f1.add_entry(vec![b], &Vector::single(b, Scalar::from_int(rng.gen_range(1..=3)))).unwrap();
            }
            let f2 = random_map(&mut rng, &v, &v, 2, 1);
            AInftyMorphism::new(a.clone(), a.clone(), [f1, f2]).unwrap()
        };
        let (f, g, h) = (morphism(), morphism(), morphism());
        let left = compose_morphisms(&compose_morphisms(&h, &g).unwrap(), &f).unwrap();
        let right = compose_morphisms(&h, &compose_morphisms(&g, &f).unwrap()).unwrap();
        prop_assert_eq!(left.components(), right.components());
        let id = AInftyMorphism::identity(a.clone());
        let (after_id, before_id) = (compose_morphisms(&id, &f).unwrap(), compose_morphisms(&f, &id).unwrap());
        prop_assert_eq!(after_id.components(), f.components());
        prop_assert_eq!(before_id.components(), f.components());
    }
}
