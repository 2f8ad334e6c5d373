//! The perturbation lemma on the truncated suspended tensor coalgebra: the
//! nilpotent geometric series, the four perturbed operators, their operator
//! identities, and the comparison with the kernel-built transfer.

use std::collections::BTreeMap;

use crate::ainfty::Relation;
use crate::coalgebra::{CoalgebraOperator, ComponentFamily};
use crate::error::{Error, Result};
use crate::graded::GradedModule;
use crate::kernels::{SuspendedRetract, SuspendedTransfer, TransferPackage};
use crate::multimap::{insert, Factor, MultiMap};
use crate::retract::{DeformationRetract, SideConditions};
use crate::sign::Sign;
use crate::suspension::{suspend_map, suspend_module, suspend_structure, suspended_from_deltas, SuspendedAInfinity};

/// Lifted retract data and the perturbation `δ_μ` on `T̄sV`, truncated at homogeneity `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationData {
    pub truncation: usize,
    /// Lift of `{δ₁}` on `T̄sV`.
    pub delta_v: CoalgebraOperator,
    /// Lift of `{δ₁^W}` on `T̄sW`.
    pub delta_w: CoalgebraOperator,
    /// Lift of the strict morphism `{f̂}`.
    pub f: CoalgebraOperator,
    /// Lift of the strict morphism `{ĝ}`.
    pub g: CoalgebraOperator,
    /// `Ĥ|_{(sV)^{⊗n}} = Σ_{i+j=n−1} (ĝf̂)^{⊗i} ⊗ ĥ ⊗ 1^{⊗j}`.
    pub h: CoalgebraOperator,
    /// Lift of `{0, δ₂, δ₃, …}`.
    pub perturbation: CoalgebraOperator,
    /// For each homogeneity `n`, the least `j` with `(δ_μĤ)^j` zero on `(sV)^{⊗n}`.
    pub nilpotency: BTreeMap<usize, usize>,
    pub side_conditions: SideConditions,
}

/// For each homogeneity `n ≤ N`, the least `j ≤ N` with `x^j` vanishing on words of length `n`.
/// Homogeneities where no such `j` exists are absent.
pub fn nilpotency_profile(x: &CoalgebraOperator) -> Result<BTreeMap<usize, usize>> {
    let n_max = x.truncation();
    let mut out = BTreeMap::new();
    let mut power = x.clone();
    for j in 1..=n_max {
        for n in 1..=n_max {
            if !out.contains_key(&n) && power.table().keys().all(|w| w.len() != n) {
                out.insert(n, j);
            }
        }
        if out.len() == n_max {
            break;
        }
        power = x.compose(&power)?;
    }
    Ok(out)
}

/// True when `op` kills `sV` and sends every word of length `n ≥ 2` to words of length `< n`.
pub fn lowers_homogeneity(op: &CoalgebraOperator) -> bool {
    op.table().iter().all(|(w, v)| w.len() > 1 && v.keys().all(|u| u.len() < w.len()))
}

/// `f̂ĝ = 1`, `f̂ĥ = 0`, `ĥĝ = 0`, `ĥĥ = 0`, evaluated on the suspended retract.
pub fn check_side_conditions(r: &DeformationRetract) -> Result<SideConditions> {
    let sr = SuspendedRetract::new(r)?;
    Ok(SideConditions {
        fg_identity: sr.f.after(&sr.g)?.compare(&MultiMap::identity(sr.g.source()))?,
        fh_zero: sr.f.after(&sr.h)?.is_zero(),
        hg_zero: sr.h.after(&sr.g)?.is_zero(),
        hh_zero: sr.h.after(&sr.h)?.is_zero(),
    })
}

/// Lifts the suspended retract and the higher part of `delta` to the tensor coalgebras.
pub fn build_perturbation(delta: &SuspendedAInfinity, r: &DeformationRetract) -> Result<PerturbationData> {
    let n = delta.truncation();
    let sv = delta.carrier().clone();
    if suspend_module(r.big().module()) != sv {
        return Err(Error::InvalidRetract("retract does not start at the suspended carrier".into()));
    }
    if !delta.deltas()[&1].compare(&suspend_map(r.big().differential())?)? {
        return Err(Error::InvalidRetract("retract differential differs from the linear part of the structure".into()));
    }
    let sr = SuspendedRetract::new(r)?;
    let sw = suspend_module(r.small().module());
    let delta_w = ComponentFamily::coderivation(sw.clone(), n, [suspend_map(r.small().differential())?])?.lift();
    let f = ComponentFamily::morphism(sv.clone(), sw.clone(), n, [sr.f.clone()])?.lift();
    let g = ComponentFamily::morphism(sw, sv.clone(), n, [sr.g.clone()])?.lift();
    let gf = ComponentFamily::morphism(sv.clone(), sv.clone(), n, [sr.gf.clone()])?;
    let h = ComponentFamily::homotopy(gf, ComponentFamily::identity(&sv, n), [sr.h.clone()])?.lift();
    let perturbation = delta.higher_part().lift();
    let nilpotency = nilpotency_profile(&perturbation.compose(&h)?)?;
    Ok(PerturbationData {
        truncation: n,
        delta_v: delta.linear_part().lift(),
        delta_w,
        f,
        g,
        h,
        perturbation,
        nilpotency,
        side_conditions: check_side_conditions(r)?,
    })
}

/// Defect operators of the identities the perturbed data satisfies. All vanish for valid input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HplIdentities {
    /// `ĜF̂ − 1 − δ_VĤ − Ĥδ_V`.
    pub base_homotopy: CoalgebraOperator,
    /// `(1 − δ_μĤ)(1 + S) − 1 = S − δ_μĤ − δ_μĤS` for the finite series `S`.
    pub inverse: CoalgebraOperator,
    /// `(δ_W + δ_ν)²`.
    pub square: CoalgebraOperator,
    /// `(δ_W + δ_ν)φ̂ − φ̂(δ_V + δ_μ)`.
    pub phi_intertwining: CoalgebraOperator,
    /// `(δ_V + δ_μ)ψ̂ − ψ̂(δ_W + δ_ν)`.
    pub psi_intertwining: CoalgebraOperator,
    /// `ψ̂φ̂ − 1 − (δ_V + δ_μ)Ĥ_out − Ĥ_out(δ_V + δ_μ)`.
    pub homotopy: CoalgebraOperator,
}

impl HplIdentities {
    pub fn all(&self) -> [(&'static str, &CoalgebraOperator); 6] {
        [
            ("base_homotopy", &self.base_homotopy),
            ("inverse", &self.inverse),
            ("square", &self.square),
            ("phi_intertwining", &self.phi_intertwining),
            ("psi_intertwining", &self.psi_intertwining),
            ("homotopy", &self.homotopy),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.all().iter().all(|(_, op)| op.is_zero())
    }
}

/// The perturbed operators and their identity checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HplOutput {
    pub truncation: usize,
    /// `δ_ν = F̂AĜ` with `A = (1 − δ_μĤ)^{−1}δ_μ`.
    pub nu: CoalgebraOperator,
    /// `δ_W + δ_ν`.
    pub codifferential: CoalgebraOperator,
    /// `ψ̂ = Ĝ + ĤAĜ`.
    pub psi: CoalgebraOperator,
    /// `φ̂ = F̂ + F̂AĤ`.
    pub phi: CoalgebraOperator,
    /// `Ĥ_out = Ĥ + ĤAĤ`.
    pub homotopy: CoalgebraOperator,
    /// `ψ̂φ̂`.
    pub composite: CoalgebraOperator,
    /// `S = Σ_{i=1}^{N−1} (δ_μĤ)^i`.
    pub series: CoalgebraOperator,
    /// `Σ_{i=1}^{j} (δ_μĤ)^i` for `j = 0, …, N−1`.
    pub partial_sums: Vec<CoalgebraOperator>,
    pub nilpotency: BTreeMap<usize, usize>,
    pub side_conditions: SideConditions,
    pub identities: HplIdentities,
    /// Component families read off the operators, present only under the side conditions.
    pub extracted: Option<SuspendedTransfer>,
}

impl HplOutput {
    pub fn extraction_status(&self) -> &'static str {
        if self.extracted.is_some() {
            "canonical"
        } else {
            "non-canonical"
        }
    }

    /// Homogeneities `n` where `1 + S` and `1 + Σ_{i=1}^{n−1}(δ_μĤ)^i` differ on words of length `≤ n`.
    pub fn series_disagreements(&self) -> Vec<usize> {
        (1..=self.truncation).filter(|&n| self.series.restricted(n) != self.partial_sums[n - 1].restricted(n)).collect()
    }
}

/// Computes the perturbed operators by the finite series and checks every operator identity.
pub fn hpl_transfer(data: &PerturbationData) -> Result<HplOutput> {
    let n = data.truncation;
    let sv = data.delta_v.source().clone();
    let x = data.perturbation.compose(&data.h)?;
    let nilpotency = nilpotency_profile(&x)?;
    if let Some(bad) = (1..=n).find(|k| nilpotency.get(k).is_none_or(|j| j > k)) {
        return Err(Error::Nilpotency(bad));
    }

    let mut partial_sums = vec![CoalgebraOperator::zero(sv.clone(), sv.clone(), 0, n)];
    let mut power = x.clone();
    for _ in 1..n {
        let next = partial_sums.last().expect("nonempty").add(&power)?;
        partial_sums.push(next);
        power = x.compose(&power)?;
    }
    let mut series = CoalgebraOperator::zero(sv.clone(), sv.clone(), 0, n);
    for _ in 1..n {
        series = x.add(&x.compose(&series)?)?;
    }

    let a = data.perturbation.add(&series.compose(&data.perturbation)?)?;
    let ag = a.compose(&data.g)?;
    let ah = a.compose(&data.h)?;
    let nu = data.f.compose(&ag)?;
    let codifferential = data.delta_w.add(&nu)?;
    let psi = data.g.add(&data.h.compose(&ag)?)?;
    let phi = data.f.add(&data.f.compose(&ah)?)?;
    let homotopy = data.h.add(&data.h.compose(&ah)?)?;
    let composite = psi.compose(&phi)?;

    let id_v = CoalgebraOperator::identity(&sv, n);
    let total_v = data.delta_v.add(&data.perturbation)?;
    let base_homotopy = data
        .g
        .compose(&data.f)?
        .sub(&id_v)?
        .sub(&data.delta_v.compose(&data.h)?)?
        .sub(&data.h.compose(&data.delta_v)?)?;
    let inverse = series.sub(&x)?.sub(&x.compose(&series)?)?;
    let square = codifferential.compose(&codifferential)?;
    let phi_intertwining = codifferential.compose(&phi)?.sub(&phi.compose(&total_v)?)?;
    let psi_intertwining = total_v.compose(&psi)?.sub(&psi.compose(&codifferential)?)?;
    let homotopy_defect = composite.sub(&id_v)?.sub(&total_v.compose(&homotopy)?)?.sub(&homotopy.compose(&total_v)?)?;
    let identities =
        HplIdentities { base_homotopy, inverse, square, phi_intertwining, psi_intertwining, homotopy: homotopy_defect };

    let extracted = if data.side_conditions.all() {
        Some(extract(&codifferential, &phi, &psi, &homotopy, &composite)?)
    } else {
        None
    };
    Ok(HplOutput {
        truncation: n,
        nu,
        codifferential,
        psi,
        phi,
        homotopy,
        composite,
        series,
        partial_sums,
        nilpotency,
        side_conditions: data.side_conditions,
        identities,
        extracted,
    })
}

fn homotopy_family(homotopy: &CoalgebraOperator, composite: &CoalgebraOperator) -> Result<ComponentFamily> {
    let (sv, n) = (homotopy.source().clone(), homotopy.truncation());
    let left = ComponentFamily::morphism(sv.clone(), sv.clone(), n, composite.components().into_values())?;
    ComponentFamily::homotopy(left, ComponentFamily::identity(&sv, n), homotopy.components().into_values())
}

fn extract(
    codifferential: &CoalgebraOperator,
    phi: &CoalgebraOperator,
    psi: &CoalgebraOperator,
    homotopy: &CoalgebraOperator,
    composite: &CoalgebraOperator,
) -> Result<SuspendedTransfer> {
    let n = codifferential.truncation();
    let sw = codifferential.source().clone();
    Ok(SuspendedTransfer {
        structure: suspended_from_deltas(sw, codifferential.components().into_values(), n)?,
        phi: ComponentFamily::morphism(phi.source().clone(), phi.target().clone(), n, phi.components().into_values())?,
        psi: ComponentFamily::morphism(psi.source().clone(), psi.target().clone(), n, psi.components().into_values())?,
        homotopy: homotopy_family(homotopy, composite)?,
    })
}

/// Nonzero entries of `X − lift(components(X))` for each perturbed operator `X`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShapeDefects {
    pub codifferential: usize,
    pub phi: usize,
    pub psi: usize,
    pub homotopy: usize,
}

impl ShapeDefects {
    pub fn total(&self) -> usize {
        self.codifferential + self.phi + self.psi + self.homotopy
    }
}

/// Measures how far the perturbed operators are from being determined by their components.
pub fn shape_defects(out: &HplOutput) -> Result<ShapeDefects> {
    let n = out.truncation;
    let defect =
        |op: &CoalgebraOperator, fam: ComponentFamily| -> Result<usize> { Ok(op.sub(&fam.lift())?.nonzero_count()) };
    let sw = out.codifferential.source().clone();
    let morphism = |op: &CoalgebraOperator| {
        ComponentFamily::morphism(op.source().clone(), op.target().clone(), n, op.components().into_values())
    };
    Ok(ShapeDefects {
        codifferential: defect(
            &out.codifferential,
            ComponentFamily::coderivation(sw, n, out.codifferential.components().into_values())?,
        )?,
        phi: defect(&out.phi, morphism(&out.phi)?)?,
        psi: defect(&out.psi, morphism(&out.psi)?)?,
        homotopy: defect(&out.homotopy, homotopy_family(&out.homotopy, &out.composite)?)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComparisonStatus {
    Exact,
    Mismatch,
    SideConditionsNotMet,
}

impl ComparisonStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ComparisonStatus::Exact => "exact",
            ComparisonStatus::Mismatch => "mismatch",
            ComparisonStatus::SideConditionsNotMet => "skipped: side conditions not met",
        }
    }
}

/// Homogeneities at which the perturbed operators differ from the lifts of the kernel-built families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub status: ComparisonStatus,
    pub n_max: usize,
    pub nu: Vec<usize>,
    pub psi: Vec<usize>,
    pub phi: Vec<usize>,
    pub homotopy: Vec<usize>,
}

impl Comparison {
    pub fn objects(&self) -> [(&'static str, &[usize]); 4] {
        [("nu", &self.nu), ("psi", &self.psi), ("phi", &self.phi), ("homotopy", &self.homotopy)]
    }

    /// `"exact"`, `"mismatch"` or the skip status for one object.
    pub fn verdict(&self, mismatches: &[usize]) -> &'static str {
        match self.status {
            ComparisonStatus::SideConditionsNotMet => self.status.as_str(),
            _ if mismatches.is_empty() => "exact",
            _ => "mismatch",
        }
    }
}

fn homogeneity_mismatches(a: &CoalgebraOperator, b: &CoalgebraOperator, n_max: usize) -> Vec<usize> {
    (1..=n_max)
        .filter(|&n| {
            let pick = |op: &CoalgebraOperator| {
                op.table().iter().filter(|(w, _)| w.len() == n).map(|(w, v)| (w.clone(), v.clone())).collect::<Vec<_>>()
            };
            pick(a) != pick(b)
        })
        .collect()
}

/// Compares the perturbed operators block by block with the lifts of the kernel-built families,
/// provided the side conditions hold for both.
pub fn compare_hpl_vs_kernels(hpl: &HplOutput, pkg: &TransferPackage, n_max: usize) -> Result<Comparison> {
    if n_max > hpl.truncation || n_max > pkg.truncation {
        return Err(Error::Truncation(format!(
            "comparison up to {n_max} beyond truncations {} and {}",
            hpl.truncation, pkg.truncation
        )));
    }
    let mut out = Comparison {
        status: ComparisonStatus::SideConditionsNotMet,
        n_max,
        nu: Vec::new(),
        psi: Vec::new(),
        phi: Vec::new(),
        homotopy: Vec::new(),
    };
    if !hpl.side_conditions.all() || !pkg.retract.side_conditions().all() {
        return Ok(out);
    }
    let k = &pkg.suspended;
    out.nu = homogeneity_mismatches(&hpl.nu, &k.structure.higher_part().lift(), n_max);
    out.psi = homogeneity_mismatches(&hpl.psi, &k.psi.lift(), n_max);
    out.phi = homogeneity_mismatches(&hpl.phi, &k.phi.lift(), n_max);
    out.homotopy = homogeneity_mismatches(&hpl.homotopy, &k.homotopy.lift(), n_max);
    out.status = if out.objects().iter().all(|(_, m)| m.is_empty()) {
        ComparisonStatus::Exact
    } else {
        ComparisonStatus::Mismatch
    };
    Ok(out)
}

/// One evaluated instance of an annihilation identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCase {
    pub arity: usize,
    /// The slot of `ĥ` for identities quantified over it.
    pub position: Option<usize>,
    pub residual: MultiMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub name: &'static str,
    pub cases: Vec<LemmaCase>,
}

impl LemmaReport {
    fn new(name: &'static str) -> Self {
        LemmaReport { name, cases: Vec::new() }
    }

    fn push(&mut self, arity: usize, position: Option<usize>, residual: MultiMap) {
        self.cases.push(LemmaCase { arity, position, residual });
    }

    pub fn is_zero(&self) -> bool {
        self.cases.iter().all(|c| c.residual.is_zero())
    }

    pub fn total_nonzero(&self) -> usize {
        self.cases.iter().map(|c| c.residual.nonzero_count()).sum()
    }

    pub fn first_offender(&self) -> Option<&LemmaCase> {
        self.cases.iter().find(|c| !c.residual.is_zero())
    }
}

/// The identities relating the suspended kernels to `ĝ`, `ĥ` and the structure maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilationReport {
    /// `q̂_n ∘ ĝ^{⊗n}` for `n ≥ 2`.
    pub q_after_g: LemmaReport,
    /// `q̂_{i+1+j} ∘ ((ĝf̂)^{⊗i} ⊗ ĥ ⊗ 1^{⊗j})` for `i + j ≥ 1`.
    pub q_after_h: LemmaReport,
    /// `p̂_nĝ^{⊗n} − δ_nĝ^{⊗n} − Σ_i q̂_{n−i+1}(Σ_u 1^{⊗u} ⊗ δ_i ⊗ 1)ĝ^{⊗n}`.
    pub p_on_g: LemmaReport,
    /// `[[ψφ]]_n − ĥp̂_n(ĝf̂)^{⊗n} − ĝf̂δ_nĤ|_n − Σ_i [[ψφ]]_{n−i+1}(Σ_u 1^{⊗u} ⊗ δ_i ⊗ 1)Ĥ|_n`.
    pub composite_expansion: LemmaReport,
    /// `q̂_n − δ_nĤ|_n − Σ_i q̂_{n−i+1}(Σ_u 1^{⊗u} ⊗ δ_i ⊗ 1)Ĥ|_n`.
    pub q_expansion: LemmaReport,
}

impl AnnihilationReport {
    pub fn all(&self) -> [&LemmaReport; 5] {
        [&self.q_after_g, &self.q_after_h, &self.p_on_g, &self.composite_expansion, &self.q_expansion]
    }

    pub fn is_zero(&self) -> bool {
        self.all().iter().all(|r| r.is_zero())
    }
}

/// `Σ_{u=0}^{m−1} x ∘ (1^{⊗u} ⊗ d ⊗ 1^{⊗m−1−u})` for `x` of arity `m`.
fn insert_everywhere(x: &MultiMap, d: &MultiMap) -> Result<MultiMap> {
    let mut acc: Option<MultiMap> = None;
    for u in 1..=x.arity() {
        let term = insert(x, u, d)?;
        acc = Some(match acc {
            Some(a) => a.add(&term)?,
            None => term,
        });
    }
    Ok(acc.expect("arity is positive"))
}

/// `lead + Σ_{i=2}^{n−1} x_{n−i+1}(Σ_u 1^{⊗u} ⊗ δ_i ⊗ 1)` as a map of arity `n`.
fn delta_expansion(
    lead: Option<MultiMap>,
    x: &BTreeMap<usize, MultiMap>,
    delta: &SuspendedAInfinity,
    n: usize,
    degree: i32,
) -> Result<MultiMap> {
    let sv = delta.carrier();
    let mut rel = Relation::new(sv, sv, n, degree);
    if let Some(l) = lead {
        rel.add(Sign::Plus, Ok(l))?;
    }
    for i in 2..n {
        if let Some(di) = delta.delta(i) {
            rel.add(Sign::Plus, insert_everywhere(&x[&(n - i + 1)], di))?;
        }
    }
    Ok(rel.finish())
}

/// `y ∘ Ĥ|_{(sV)^{⊗n}}` with `Ĥ|_{(sV)^{⊗n}} = Σ_{a+b=n−1} (ĝf̂)^{⊗a} ⊗ ĥ ⊗ 1^{⊗b}`.
fn after_h_restricted(y: &MultiMap, sr: &SuspendedRetract) -> Result<MultiMap> {
    let n = y.arity();
    let mut rel = Relation::new(y.source(), y.target(), n, y.degree() + 1);
    for a in 0..n {
        rel.add(Sign::Plus, y.compose(&h_slot(sr, n, a)))?;
    }
    Ok(rel.finish())
}

fn h_slot(sr: &SuspendedRetract, n: usize, a: usize) -> Vec<Factor<'_>> {
    let mut f: Vec<Factor<'_>> = vec![Factor::Map(&sr.gf); a];
    f.push(Factor::Map(&sr.h));
    f.extend(std::iter::repeat_n(Factor::Id, n - 1 - a));
    f
}

/// Evaluates the annihilation identities of the suspended kernels for `2 ≤ n ≤ n_max`.
/// They are guaranteed to vanish when the retract satisfies the side conditions.
pub fn check_annihilation_lemmas(pkg: &TransferPackage, n_max: usize) -> Result<AnnihilationReport> {
    if n_max > pkg.truncation {
        return Err(Error::Truncation(format!("arity {n_max} beyond truncation {}", pkg.truncation)));
    }
    let delta = suspend_structure(&pkg.source)?;
    let sr = SuspendedRetract::new(&pkg.retract)?;
    let k = &pkg.suspended_kernels;
    let sv: GradedModule = delta.carrier().clone();
    let mut report = AnnihilationReport {
        q_after_g: LemmaReport::new("q after g"),
        q_after_h: LemmaReport::new("q after h"),
        p_on_g: LemmaReport::new("p on g"),
        composite_expansion: LemmaReport::new("composite expansion"),
        q_expansion: LemmaReport::new("q expansion"),
    };
    for n in 2..=n_max {
        let g_power = vec![Factor::Map(&sr.g); n];
        let qn = &k.q[&n];
        report.q_after_g.push(n, None, qn.compose(&g_power)?);
        for a in 0..n {
            report.q_after_h.push(n, Some(a + 1), qn.compose(&h_slot(&sr, n, a))?);
        }

        let mut p_side = k.p[&n].clone();
        p_side.add_signed(&delta_expansion(delta.delta(n).cloned(), &k.q, &delta, n, -1)?, Sign::Minus)?;
        report.p_on_g.push(n, None, p_side.compose(&g_power)?);

        let gf_lead = delta.delta(n).map(|d| sr.gf.after(d)).transpose()?;
        let expansion = after_h_restricted(&delta_expansion(gf_lead, &k.composite, &delta, n, -1)?, &sr)?;
        let hp_gf = sr.h.after(&k.p[&n])?.compose(&vec![Factor::Map(&sr.gf); n])?;
        let mut rel = Relation::new(&sv, &sv, n, 0);
        rel.add(Sign::Plus, Ok(k.composite[&n].clone()))?;
        rel.add(Sign::Minus, Ok(hp_gf))?;
        rel.add(Sign::Minus, Ok(expansion))?;
        report.composite_expansion.push(n, None, rel.finish());

        let expansion = after_h_restricted(&delta_expansion(delta.delta(n).cloned(), &k.q, &delta, n, -1)?, &sr)?;
        report.q_expansion.push(n, None, qn.sub(&expansion)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::transfer;
    use crate::retract::{harmonious_retract, instance_forms};

    #[test]
    fn forms_hpl_identities_and_comparison() {
        let a = instance_forms(4).unwrap();
        let r = harmonious_retract(&a.complex()).unwrap();
        let data = build_perturbation(&suspend_structure(&a).unwrap(), &r).unwrap();
        assert!(lowers_homogeneity(&data.perturbation));
        let out = hpl_transfer(&data).unwrap();
        assert!(out.identities.is_zero());
        assert!(out.series_disagreements().is_empty());
        let pkg = transfer(&r, &a, 4).unwrap();
        let cmp = compare_hpl_vs_kernels(&out, &pkg, 4).unwrap();
        assert_eq!(cmp.status, ComparisonStatus::Exact);
        assert!(check_annihilation_lemmas(&pkg, 4).unwrap().is_zero());
        assert_eq!(shape_defects(&out).unwrap().total(), 0);
    }
}
