//! Batteries that run every checker of the library on one instance, on a whole
//! corpus, and under each single-sign mutation of the sign engine.

use std::sync::Arc;

use crate::ainfty::{check_homotopy, check_morphism, check_structure, AInfinity, AInftyHomotopy, AInftyMorphism};
use crate::coalgebra::{
    check_codifferential, check_homotopy_components, check_morphism_components, codifferential_square,
    components_match, homotopy_defect, morphism_defect, CoalgebraOperator,
};
use crate::corpus::CorpusInstance;
use crate::error::Result;
use crate::graded::{word_degree, Basis, GradedModule, Vector};
use crate::kernels::{composite_mismatch, convention_agreement, p_kernel_reduction_mismatch, transfer, QSignReading};
use crate::multimap::{Factor, MultiMap};
use crate::perturbation::{
    build_perturbation, check_annihilation_lemmas, compare_hpl_vs_kernels, hpl_transfer, shape_defects,
    ComparisonStatus,
};
use crate::report::Residuals;
use crate::retract::{harmonious_retract, ChainComplex, DeformationRetract};
use crate::scalar::Scalar;
use crate::sign::{with_mutant, Mutant};
use crate::suspension::{sign_identity_defects, suspend_homotopy, suspend_morphism, suspend_structure};

/// Largest arity at which the suspension sign identity is checked.
pub const SIGN_IDENTITY_ARITY: usize = 8;

/// How many single-entry corruptions are tried before giving up on breaking a relation.
const CORRUPTION_ATTEMPTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// All checks run on one instance, in a fixed order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceReport {
    pub label: String,
    pub checks: Vec<Check>,
    pub equivalence: Vec<EquivalenceRow>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Battery {
    report: InstanceReport,
    stop_early: bool,
}

impl Battery {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.report.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    fn residuals(&mut self, name: &str, r: &Residuals) {
        let detail = match r.first_offender() {
            None => "0".to_string(),
            Some((n, w)) => {
                format!("{} nonzero, first at n={n} on {}", r.total_nonzero(), crate::graded::format_word(&w))
            }
        };
        self.push(name, r.is_zero(), detail);
    }

    fn arities(&mut self, name: &str, bad: &[usize]) {
        let detail = if bad.is_empty() { "0".to_string() } else { format!("arities {bad:?}") };
        self.push(name, bad.is_empty(), detail);
    }

    fn done(&self) -> bool {
        self.stop_early && !self.report.passed()
    }
}

/// One relation checked three ways: the unsuspended definition, componentwise on the
/// suspension, and as an operator identity on the tensor coalgebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceRow {
    pub relation: Relation,
    pub corrupted: bool,
    pub definition: bool,
    pub components: bool,
    pub operator: bool,
    /// The homogeneity-one part of the operator defect equals the componentwise residuals.
    pub residuals_match: bool,
}

impl EquivalenceRow {
    pub fn consistent(&self) -> bool {
        self.definition == self.components && self.components == self.operator && self.residuals_match
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Structure,
    Morphism,
    Homotopy,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Structure, Relation::Morphism, Relation::Homotopy];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Structure => "structure",
            Relation::Morphism => "morphism",
            Relation::Homotopy => "homotopy",
        }
    }
}

/// One direction `A ⟹ B` of one equivalence. Rows where `A` holds exercise it directly and
/// rows where `B` fails exercise its contrapositive; a discrepancy is a row with `A` and not `B`,
/// or one where the unsuspended definition disagrees with the componentwise check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    pub relation: Relation,
    pub componentwise_to_operator: bool,
    pub premise_held: usize,
    pub conclusion_failed: usize,
    pub discrepancies: usize,
}

impl Direction {
    pub fn name(&self) -> String {
        let (a, b) =
            if self.componentwise_to_operator { ("components", "operator") } else { ("operator", "components") };
        format!("{}.{a}_implies_{b}", self.relation.as_str())
    }

    /// Both the passing side and the failing side were seen.
    pub fn fully_exercised(&self) -> bool {
        self.premise_held > 0 && self.conclusion_failed > 0
    }
}

/// The six directions tallied over a set of rows.
pub fn tally_directions(rows: &[EquivalenceRow]) -> Vec<Direction> {
    let mut out = Vec::new();
    for relation in Relation::ALL {
        for forward in [true, false] {
            let mut d = Direction {
                relation,
                componentwise_to_operator: forward,
                premise_held: 0,
                conclusion_failed: 0,
                discrepancies: 0,
            };
            for row in rows.iter().filter(|r| r.relation == relation) {
                let (premise, conclusion) =
                    if forward { (row.components, row.operator) } else { (row.operator, row.components) };
                d.premise_held += usize::from(premise);
                d.conclusion_failed += usize::from(!conclusion);
                if (premise && !conclusion) || row.definition != row.components || !row.residuals_match {
                    d.discrepancies += 1;
                }
            }
            out.push(d);
        }
    }
    out
}

fn structure_row(a: &AInfinity, n: usize, corrupted: bool) -> Result<EquivalenceRow> {
    let definition = check_structure(a, n)?;
    let delta = suspend_structure(a)?.codifferential();
    let components = check_codifferential(&delta, n)?;
    let op = codifferential_square(&delta)?.restricted(n);
    Ok(EquivalenceRow {
        relation: Relation::Structure,
        corrupted,
        definition: definition.is_zero(),
        components: components.is_zero(),
        operator: op.is_zero(),
        residuals_match: components_match(&op, &components),
    })
}

fn morphism_row(m: &AInftyMorphism, n: usize, corrupted: bool) -> Result<EquivalenceRow> {
    let definition = check_morphism(m, n)?;
    let dv = suspend_structure(m.source())?.codifferential();
    let dw = suspend_structure(m.target())?.codifferential();
    let fam = suspend_morphism(m)?;
    let components = check_morphism_components(&fam, &dv, &dw, n)?;
    let op = morphism_defect(&fam, &dv, &dw)?.restricted(n);
    Ok(EquivalenceRow {
        relation: Relation::Morphism,
        corrupted,
        definition: definition.is_zero(),
        components: components.is_zero(),
        operator: op.is_zero(),
        residuals_match: components_match(&op, &components),
    })
}

fn homotopy_row(h: &AInftyHomotopy, n: usize, corrupted: bool) -> Result<EquivalenceRow> {
    let definition = check_homotopy(h, n)?;
    let dv = suspend_structure(h.from().source())?.codifferential();
    let dw = suspend_structure(h.from().target())?.codifferential();
    let fam = suspend_homotopy(h)?;
    let components = check_homotopy_components(&fam, &dv, &dw, n)?;
    let op = homotopy_defect(&fam, &dv, &dw)?.restricted(n);
    Ok(EquivalenceRow {
        relation: Relation::Homotopy,
        corrupted,
        definition: definition.is_zero(),
        components: components.is_zero(),
        operator: op.is_zero(),
        residuals_match: components_match(&op, &components),
    })
}

/// Maps of arity `k ≤ 3` into `target` equal to `base` plus one unit entry, of the given degree offset.
fn bumped(
    base: Option<&MultiMap>,
    source: &GradedModule,
    target: &GradedModule,
    degree: impl Fn(usize) -> i32,
    max_arity: usize,
) -> Vec<MultiMap> {
    let mut out = Vec::new();
    for k in 1..=max_arity.min(3) {
        let deg = degree(k);
        for w in source.words(k) {
            for b in target.basis_in_degree(word_degree(&w) + deg) {
                let mut m = match base {
                    Some(m) if m.arity() == k => m.clone(),
                    _ => MultiMap::zero(source.clone(), target.clone(), k, deg),
                };
                m.add_entry(w.clone(), &Vector::single(b, Scalar::one())).expect("shape matches by construction");
                out.push(m);
                if out.len() >= CORRUPTION_ATTEMPTS * 4 {
                    return out;
                }
            }
        }
    }
    out
}

fn replace_component(components: &std::collections::BTreeMap<usize, MultiMap>, m: MultiMap) -> Vec<MultiMap> {
    let mut c = components.clone();
    c.insert(m.arity(), m);
    c.into_values().collect()
}

/// The first single-entry change to a structure map that breaks the structure relation.
pub fn corrupt_structure(a: &AInfinity, n: usize) -> Result<Option<AInfinity>> {
    let v = a.carrier();
    let mut tried = 0;
    for k in 1..=n.min(3) {
        let base = if k == 1 { Some(a.differential()) } else { a.op(k) };
        for m in bumped(base, v, v, |k| k as i32 - 2, k).into_iter().filter(|m| m.arity() == k) {
            let candidate = if k == 1 {
                AInfinity::new(v.clone(), m, a.products().values().cloned(), a.truncation())?
            } else {
                AInfinity::new(v.clone(), a.differential().clone(), replace_component(a.products(), m), a.truncation())?
            };
            if !check_structure(&candidate, n)?.is_zero() {
                return Ok(Some(candidate));
            }
            tried += 1;
            if tried >= CORRUPTION_ATTEMPTS {
                return Ok(None);
            }
        }
    }
    Ok(None)
}

/// The first single-entry change to a morphism component that breaks the morphism relation.
pub fn corrupt_morphism(m: &AInftyMorphism, n: usize) -> Result<Option<AInftyMorphism>> {
    let mut tried = 0;
    for k in 1..=n.min(3) {
        let base = m.component(k);
        let cands = bumped(base, m.source().carrier(), m.target().carrier(), |k| k as i32 - 1, k);
        for c in cands.into_iter().filter(|c| c.arity() == k) {
            let candidate =
                AInftyMorphism::new(m.source().clone(), m.target().clone(), replace_component(m.components(), c))?;
            if !check_morphism(&candidate, n)?.is_zero() {
                return Ok(Some(candidate));
            }
            tried += 1;
            if tried >= CORRUPTION_ATTEMPTS {
                return Ok(None);
            }
        }
    }
    Ok(None)
}

/// The first single-entry change to a homotopy component that breaks the homotopy relation.
pub fn corrupt_homotopy(h: &AInftyHomotopy, n: usize) -> Result<Option<AInftyHomotopy>> {
    let (v, w) = (h.from().source().carrier().clone(), h.from().target().carrier().clone());
    let mut tried = 0;
    for k in 1..=n.min(3) {
        for c in bumped(h.component(k), &v, &w, |k| k as i32, k).into_iter().filter(|c| c.arity() == k) {
            let candidate =
                AInftyHomotopy::new(h.from().clone(), h.to().clone(), replace_component(h.components(), c))?;
            if !check_homotopy(&candidate, n)?.is_zero() {
                return Ok(Some(candidate));
            }
            tried += 1;
            if tried >= CORRUPTION_ATTEMPTS {
                return Ok(None);
            }
        }
    }
    Ok(None)
}

/// Every equivalence row for one transfer: the structures, morphisms and homotopy it
/// produced, plus one corrupted copy of each kind whenever a breaking corruption exists.
pub fn equivalence_rows(a: &AInfinity, r: &DeformationRetract, n: usize) -> Result<Vec<EquivalenceRow>> {
    let pkg = transfer(r, a, n)?;
    let mut rows = vec![
        structure_row(&pkg.source, n, false)?,
        structure_row(&pkg.nu, n, false)?,
        morphism_row(&pkg.phi, n, false)?,
        morphism_row(&pkg.psi, n, false)?,
        homotopy_row(&pkg.homotopy, n, false)?,
    ];
    if let Some(bad) = corrupt_structure(&pkg.source, n)? {
        rows.push(structure_row(&bad, n, true)?);
    }
    if let Some(bad) = corrupt_morphism(&pkg.phi, n)? {
        rows.push(morphism_row(&bad, n, true)?);
    }
    if let Some(bad) = corrupt_homotopy(&pkg.homotopy, n)? {
        rows.push(homotopy_row(&bad, n, true)?);
    }
    Ok(rows)
}

/// One basis element in the lowest even and the lowest odd degree of `v`.
pub fn parity_probe(v: &GradedModule) -> GradedModule {
    let even = v.dims().keys().find(|d| d.rem_euclid(2) == 0);
    let odd = v.dims().keys().find(|d| d.rem_euclid(2) == 1);
    GradedModule::new(even.into_iter().chain(odd).map(|&d| (d, 1)))
}

/// Words of length `≤ n_max` on which the suspension sign identity fails.
pub fn sign_identity_failures(v: &GradedModule, n_max: usize) -> Result<Vec<(usize, Vec<Basis>)>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        out.extend(sign_identity_defects(v, n)?.into_iter().map(|w| (n, w)));
    }
    Ok(out)
}

/// A retract with `h = 0` onto the same module: `f` rescales basis element `i` by
/// `±(i + 2)`, `g = f^{−1}`, and the small differential is `f∂g`.
pub fn rescaling_retract(c: &ChainComplex) -> Result<DeformationRetract> {
    let v = c.module().clone();
    let mut f = MultiMap::zero(v.clone(), v.clone(), 1, 0);
    let mut g = MultiMap::zero(v.clone(), v.clone(), 1, 0);
    for (i, b) in v.basis().into_iter().enumerate() {
        let mag = Scalar::from_int(i as i64 + 2);
        let c = if i % 2 == 0 { mag } else { -mag };
        g.add_entry(vec![b], &Vector::single(b, c.inverse().expect("nonzero")))?;
        f.add_entry(vec![b], &Vector::single(b, c))?;
    }
    let small = ChainComplex::new(v.clone(), f.after(&c.differential().after(&g)?)?)?;
    DeformationRetract::new(c.clone(), small, f, g, MultiMap::zero(v.clone(), v, 1, 1))
}

fn nonzero_arities_from(components: &std::collections::BTreeMap<usize, MultiMap>, from: usize) -> Vec<usize> {
    components.iter().filter(|(k, m)| **k >= from && !m.is_zero()).map(|(k, _)| *k).collect()
}

/// Arities where an `h = 0` transfer departs from `ν_n = f μ_n g^{⊗n}` and `φ_{≥2} = ψ_{≥2} = H_{≥2} = 0`,
/// or where the kernels depart from `p_n = μ_n`, `q_{≥2} = 0`.
pub fn h_zero_defects(a: &AInfinity, n: usize) -> Result<Vec<(&'static str, usize)>> {
    let r = rescaling_retract(&a.complex())?;
    let pkg = transfer(&r, a, n)?;
    let mut out = Vec::new();
    for k in 2..=n {
        let zero = MultiMap::zero(a.carrier().clone(), a.carrier().clone(), k, k as i32 - 2);
        let mu = a.op(k).unwrap_or(&zero);
        let expected = r.f().after(&mu.compose(&vec![Factor::Map(r.g()); k])?)?;
        let nu = pkg.nu.op(k).unwrap_or(&zero);
        if !nu.compare(&expected)? {
            out.push(("nu", k));
        }
        let p = pkg.kernels.p.get(&k).unwrap_or(&zero);
        if !p.compare(mu)? {
            out.push(("p", k));
        }
    }
    let q_bad = pkg.kernels.q.iter().filter(|(k, m)| **k >= 2 && !m.is_zero()).map(|(k, _)| *k);
    out.extend(q_bad.map(|k| ("q", k)));
    out.extend(nonzero_arities_from(pkg.phi.components(), 2).into_iter().map(|k| ("phi", k)));
    out.extend(nonzero_arities_from(pkg.psi.components(), 2).into_iter().map(|k| ("psi", k)));
    out.extend(nonzero_arities_from(pkg.homotopy.components(), 1).into_iter().map(|k| ("homotopy", k)));
    Ok(out)
}

/// Objects on which the HPL output for `a` with its products removed differs from the input data.
pub fn trivial_perturbation_defects(a: &AInfinity) -> Result<Vec<&'static str>> {
    let bare = AInfinity::from_complex(a.carrier().clone(), a.differential().clone(), a.truncation())?;
    let r = harmonious_retract(&bare.complex())?;
    let data = build_perturbation(&suspend_structure(&bare)?, &r)?;
    let out = hpl_transfer(&data)?;
    let pairs: [(&'static str, &CoalgebraOperator, &CoalgebraOperator); 4] = [
        ("codifferential", &out.codifferential, &data.delta_w),
        ("psi", &out.psi, &data.g),
        ("phi", &out.phi, &data.f),
        ("homotopy", &out.homotopy, &data.h),
    ];
    let mut bad: Vec<&'static str> = pairs.iter().filter(|(_, x, y)| x != y).map(|(name, _, _)| *name).collect();
    if !out.nu.is_zero() {
        bad.push("nu");
    }
    Ok(bad)
}

fn run_battery(
    label: &str,
    a: &AInfinity,
    r: &DeformationRetract,
    n: usize,
    stop_early: bool,
) -> Result<InstanceReport> {
    let mut b = Battery { report: InstanceReport { label: label.into(), ..Default::default() }, stop_early };

    b.residuals("structure", &check_structure(a, n)?);
    let sc = r.side_conditions();
    b.push("side_conditions", sc.all(), format!("{sc:?}"));
    let probe = parity_probe(a.carrier());
    let signs = sign_identity_failures(&probe, SIGN_IDENTITY_ARITY)?;
    b.push("sign_identity", signs.is_empty(), format!("{} failing words up to n={SIGN_IDENTITY_ARITY}", signs.len()));
    if b.done() {
        return Ok(b.report);
    }

    let pkg = transfer(r, a, n)?;
    let names = ["transfer.nu", "transfer.phi", "transfer.psi", "transfer.composite", "transfer.homotopy"];
    let kernel_names = ["kernels.p_identity", "kernels.p_identity_on_g", "kernels.q_identity"];
    for (name, res) in names.iter().chain(&kernel_names).zip(pkg.reports.all()) {
        b.residuals(name, res);
    }
    let agreement = convention_agreement(&pkg, QSignReading::Inclusive)?;
    let mut bad = agreement.p.clone();
    bad.extend(&agreement.q);
    bad.extend(&agreement.composite);
    b.arities("kernels.convention_agreement", &bad);
    b.arities("kernels.composite_cache", &composite_mismatch(&pkg)?);
    b.arities("kernels.p_reduction", &p_kernel_reduction_mismatch(&pkg)?);
    if b.done() {
        return Ok(b.report);
    }

    let rows = equivalence_rows(a, r, n)?;
    for relation in Relation::ALL {
        let mine: Vec<&EquivalenceRow> = rows.iter().filter(|x| x.relation == relation).collect();
        let bad = mine.iter().filter(|x| !x.consistent()).count();
        let name = format!("equivalence.{}", relation.as_str());
        b.push(&name, bad == 0, format!("{} rows, {bad} inconsistent", mine.len()));
    }
    b.report.equivalence = rows;
    if b.done() {
        return Ok(b.report);
    }

    let data = build_perturbation(&suspend_structure(a)?, r)?;
    let nil_bad: Vec<usize> = (1..=n).filter(|k| data.nilpotency.get(k).is_none_or(|j| j > k)).collect();
    b.arities("hpl.nilpotency", &nil_bad);
    let out = hpl_transfer(&data)?;
    for (name, op) in out.identities.all() {
        b.push(&format!("hpl.{name}"), op.is_zero(), format!("{} nonzero", op.nonzero_count()));
    }
    b.arities("hpl.series", &out.series_disagreements());
    let cmp = compare_hpl_vs_kernels(&out, &pkg, n)?;
    b.push("hpl.comparison", cmp.status == ComparisonStatus::Exact, cmp.status.as_str());
    let shape = shape_defects(&out)?;
    b.push("hpl.shape", shape.total() == 0, format!("{} nonzero", shape.total()));
    if b.done() {
        return Ok(b.report);
    }

    let lemmas = check_annihilation_lemmas(&pkg, n)?;
    for l in lemmas.all() {
        let detail = match l.first_offender() {
            None => "0".to_string(),
            Some(c) => format!("{} nonzero, first at n={} position {:?}", l.total_nonzero(), c.arity, c.position),
        };
        b.push(&format!("lemmas.{}", l.name), l.is_zero(), detail);
    }
    if b.done() {
        return Ok(b.report);
    }

    let hz = h_zero_defects(a, n)?;
    b.push("degeneration.h_zero", hz.is_empty(), format!("{hz:?}"));
    let tp = trivial_perturbation_defects(a)?;
    b.push("degeneration.trivial_perturbation", tp.is_empty(), format!("{tp:?}"));
    Ok(b.report)
}

/// Every checker on `a` and its retract `r` up to arity `n`.
pub fn selftest_instance(label: &str, a: &AInfinity, r: &DeformationRetract, n: usize) -> Result<InstanceReport> {
    run_battery(label, a, r, n, false)
}

/// The name of the first check that fails on `a`, stopping there; an error counts as a failure.
pub fn first_failure(a: &AInfinity, n: usize) -> Option<String> {
    let run = || -> Result<InstanceReport> {
        let r = harmonious_retract(&a.complex())?;
        run_battery("", a, &r, n, true)
    };
    match run() {
        Ok(report) => report.failures().next().map(|c| c.name.clone()),
        Err(e) => Some(format!("error: {e}")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutantOutcome {
    pub mutant: Mutant,
    /// The instance label and check that first noticed the mutation.
    pub killed_by: Option<(String, String)>,
}

/// Runs the battery under each mutant until some instance fails.
pub fn mutation_suite(instances: &[(String, Arc<AInfinity>)], n: usize) -> Vec<MutantOutcome> {
    Mutant::ALL
        .iter()
        .map(|&mutant| {
            let killed_by = instances
                .iter()
                .find_map(|(label, a)| with_mutant(mutant, || first_failure(a, n)).map(|check| (label.clone(), check)));
            MutantOutcome { mutant, killed_by }
        })
        .collect()
}

/// The selftest over a corpus: per-instance reports, equivalence directions and mutants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestReport {
    pub seed: u64,
    pub corpus_size: usize,
    pub arity: usize,
    pub instances: Vec<InstanceReport>,
    pub directions: Vec<Direction>,
    pub mutants: Vec<MutantOutcome>,
}

impl SelftestReport {
    pub fn instances_passed(&self) -> usize {
        self.instances.iter().filter(|r| r.passed()).count()
    }

    pub fn mutants_killed(&self) -> usize {
        self.mutants.iter().filter(|m| m.killed_by.is_some()).count()
    }

    pub fn passed(&self) -> bool {
        self.instances_passed() == self.instances.len()
            && self.directions.iter().all(|d| d.discrepancies == 0)
            && self.mutants_killed() == self.mutants.len()
    }
}

pub fn instance_label(inst: &CorpusInstance) -> String {
    format!("corpus[{}]", inst.index)
}

pub fn selftest(corpus_size: usize, seed: u64, arity: usize) -> Result<SelftestReport> {
    let corpus = crate::corpus::corpus(corpus_size, seed, arity)?;
    let mut instances = Vec::new();
    let mut rows = Vec::new();
    for inst in &corpus {
        let report = selftest_instance(&instance_label(inst), &inst.algebra, &inst.retract, arity)?;
        rows.extend(report.equivalence.iter().cloned());
        instances.push(report);
    }
    let labelled: Vec<(String, Arc<AInfinity>)> =
        corpus.iter().map(|i| (instance_label(i), Arc::new(i.algebra.clone()))).collect();
    let mutants = if corpus.is_empty() { Vec::new() } else { mutation_suite(&labelled, arity) };
    Ok(SelftestReport { seed, corpus_size, arity, instances, directions: tally_directions(&rows), mutants })
}
