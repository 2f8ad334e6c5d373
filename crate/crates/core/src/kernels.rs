//! Recursive p- and q-kernels, the transferred structure, morphisms and
//! homotopy built from them, and the identities the kernels satisfy.
//!
//! The suspended recursion is authoritative. The unsuspended ϑ-signed
//! recursion is an independent route used to validate the sign bookkeeping.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainfty::{
    check_homotopy, check_morphism, check_structure, compose_morphisms, AInfinity, AInftyHomotopy, AInftyMorphism,
    Relation,
};
use crate::coalgebra::ComponentFamily;
use crate::error::{Error, Result};
use crate::graded::GradedModule;
use crate::index_sets::{enum_a, enum_b, enum_c};
use crate::multimap::{insert, Factor, MultiMap};
use crate::report::Residuals;
pub use crate::retract::{DeformationRetract, SideConditions};
use crate::sign::{theta, Sign};
use crate::suspension::{
    desuspend_map, suspend_map, suspend_module, suspend_structure, suspended_from_deltas, SuspendedAInfinity,
};

/// How the exponent `n + r_i + ϑ(…)` of the q-kernel sign reads its ϑ argument list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QSignReading {
    /// `ϑ(r₁, …, r_i)`.
    Inclusive,
    /// `ϑ(r₁, …, r_{i−1})`.
    Exclusive,
}

/// Unsuspended kernels on `V`: `p_n` (degree `n−2`), `q_n` (degree `n−1`, `q₁ = 1`)
/// and the composite `(ψφ)_m` (degree `m−1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelFamily {
    pub p: BTreeMap<usize, MultiMap>,
    pub q: BTreeMap<usize, MultiMap>,
    pub composite: BTreeMap<usize, MultiMap>,
}

/// Suspended kernels on `sV`: `p̂_n` (degree −1), `q̂_n` and `[[ψφ]]_m` (degree 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspendedKernels {
    pub p: BTreeMap<usize, MultiMap>,
    pub q: BTreeMap<usize, MultiMap>,
    pub composite: BTreeMap<usize, MultiMap>,
}

/// Suspended retract data `f̂`, `ĝ`, `ĥ` and the composite `ĝf̂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspendedRetract {
    pub f: MultiMap,
    pub g: MultiMap,
    pub h: MultiMap,
    pub gf: MultiMap,
}

impl SuspendedRetract {
    pub fn new(r: &DeformationRetract) -> Result<Self> {
        let f = suspend_map(r.f())?;
        let g = suspend_map(r.g())?;
        let h = suspend_map(r.h())?;
        let gf = g.after(&f)?;
        Ok(SuspendedRetract { f, g, h, gf })
    }
}

fn sum(
    source: &GradedModule,
    target: &GradedModule,
    arity: usize,
    degree: i32,
    terms: Vec<(Sign, Result<MultiMap>)>,
) -> Result<MultiMap> {
    let mut rel = Relation::new(source, target, arity, degree);
    for (s, t) in terms {
        rel.add(s, t)?;
    }
    Ok(rel.finish())
}

fn power<'a>(m: &'a MultiMap, n: usize) -> Vec<Factor<'a>> {
    vec![Factor::Map(m); n]
}

/// `p̂_n = Σ_{B(n)} δ_k(ĥp̂_{r₁} ⊗ … ⊗ ĥp̂_{r_k})` with `ĥp̂₁ = 1`, and the q-side recursion
/// `q̂_n = Σ_{C(n)} δ_k([[ψφ]]_{r₁} ⊗ … ⊗ [[ψφ]]_{r_{i−1}} ⊗ ĥq̂_{r_i} ⊗ 1^{⊗k−i})`,
/// `[[ψφ]]_m = ĝf̂q̂_m + Σ_{B(m)} ĥp̂_k(ĝf̂q̂_{r₁} ⊗ … ⊗ ĝf̂q̂_{r_k})`.
pub fn suspended_kernels(delta: &SuspendedAInfinity, r: &SuspendedRetract, n_max: usize) -> Result<SuspendedKernels> {
    let sv = delta.carrier();
    let mut p: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut hp: BTreeMap<usize, MultiMap> = BTreeMap::new();
    for n in 2..=n_max {
        let mut terms = Vec::new();
        for rs in enum_b(n) {
            let Some(dk) = delta.delta(rs.len()) else { continue };
            let parts: Vec<Factor<'_>> =
                rs.iter().map(|&x| if x == 1 { Factor::Id } else { Factor::Map(&hp[&x]) }).collect();
            terms.push((Sign::Plus, dk.compose(&parts)));
        }
        let pn = sum(sv, sv, n, -1, terms)?;
        hp.insert(n, r.h.after(&pn)?);
        p.insert(n, pn);
    }

    let mut q: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut hq: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut gfq: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut composite: BTreeMap<usize, MultiMap> = BTreeMap::new();
    q.insert(1, MultiMap::identity(sv));
    hq.insert(1, r.h.clone());
    gfq.insert(1, r.gf.clone());
    composite.insert(1, r.gf.clone());
    for n in 2..=n_max {
        let mut terms = Vec::new();
        for t in enum_c(n) {
            let Some(dk) = delta.delta(t.k) else { continue };
            let mut parts: Vec<Factor<'_>> = t.r[..t.i - 1].iter().map(|x| Factor::Map(&composite[x])).collect();
            parts.push(Factor::Map(&hq[&t.r[t.i - 1]]));
            parts.extend(std::iter::repeat_n(Factor::Id, t.k - t.i));
            terms.push((Sign::Plus, dk.compose(&parts)));
        }
        let qn = sum(sv, sv, n, 0, terms)?;
        hq.insert(n, r.h.after(&qn)?);
        gfq.insert(n, r.gf.after(&qn)?);
        q.insert(n, qn);
        let mut terms = vec![(Sign::Plus, Ok(gfq[&n].clone()))];
        for rs in enum_b(n) {
            let parts: Vec<Factor<'_>> = rs.iter().map(|x| Factor::Map(&gfq[x])).collect();
            terms.push((Sign::Plus, hp[&rs.len()].compose(&parts)));
        }
        composite.insert(n, sum(sv, sv, n, 0, terms)?);
    }
    Ok(SuspendedKernels { p, q, composite })
}

/// The ϑ-signed recursion on `V`:
/// `p_n = Σ_{B(n)} (−1)^{ϑ(r)} μ_k(hp_{r₁} ⊗ … ⊗ hp_{r_k})`,
/// `(ψφ)_m = gf q_m + Σ_{B(m)} (−1)^{ϑ(r)} hp_k(gf q_{r₁} ⊗ … ⊗ gf q_{r_k})`,
/// `q_n = Σ_{C(n)} (−1)^{n + r_i + ϑ(…)} μ_k((ψφ)_{r₁} ⊗ … ⊗ hq_{r_i} ⊗ 1^{⊗k−i})`.
pub fn unsuspended_kernels(
    a: &AInfinity,
    r: &DeformationRetract,
    n_max: usize,
    reading: QSignReading,
) -> Result<KernelFamily> {
    let v = a.carrier();
    let (f, g, h) = (r.f(), r.g(), r.h());
    let gf = g.after(f)?;
    let mut p: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut hp: BTreeMap<usize, MultiMap> = BTreeMap::new();
    for n in 2..=n_max {
        let mut terms = Vec::new();
        for rs in enum_b(n) {
            let Some(mk) = a.op(rs.len()) else { continue };
            let parts: Vec<Factor<'_>> =
                rs.iter().map(|&x| if x == 1 { Factor::Id } else { Factor::Map(&hp[&x]) }).collect();
            terms.push((Sign::pow(theta(&rs)), mk.compose(&parts)));
        }
        let pn = sum(v, v, n, n as i32 - 2, terms)?;
        hp.insert(n, h.after(&pn)?);
        p.insert(n, pn);
    }

    let mut q: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut hq: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut gfq: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut composite: BTreeMap<usize, MultiMap> = BTreeMap::new();
    q.insert(1, MultiMap::identity(v));
    hq.insert(1, h.clone());
    gfq.insert(1, gf.clone());
    composite.insert(1, gf.clone());
    for n in 2..=n_max {
        let mut terms = Vec::new();
        for t in enum_c(n) {
            let Some(mk) = a.op(t.k) else { continue };
            let theta_args = match reading {
                QSignReading::Inclusive => &t.r[..],
                QSignReading::Exclusive => &t.r[..t.i - 1],
            };
            let sign = Sign::pow((n + t.r[t.i - 1]) as i64 + theta(theta_args));
            let mut parts: Vec<Factor<'_>> = t.r[..t.i - 1].iter().map(|x| Factor::Map(&composite[x])).collect();
            parts.push(Factor::Map(&hq[&t.r[t.i - 1]]));
            parts.extend(std::iter::repeat_n(Factor::Id, t.k - t.i));
            terms.push((sign, mk.compose(&parts)));
        }
        let qn = sum(v, v, n, n as i32 - 1, terms)?;
        hq.insert(n, h.after(&qn)?);
        gfq.insert(n, gf.after(&qn)?);
        q.insert(n, qn);
        let mut terms = vec![(Sign::Plus, Ok(gfq[&n].clone()))];
        for rs in enum_b(n) {
            let parts: Vec<Factor<'_>> = rs.iter().map(|x| Factor::Map(&gfq[x])).collect();
            terms.push((Sign::pow(theta(&rs)), hp[&rs.len()].compose(&parts)));
        }
        composite.insert(n, sum(v, v, n, n as i32 - 1, terms)?);
    }
    Ok(KernelFamily { p, q, composite })
}

/// Residuals of `∂p_n − Σ_u (−1)^n p_n(…∂…) − Σ_{A(n)} (−1)^{i(ℓ+1)+n} p_k(…gf∘p_ℓ…)` for `2 ≤ n ≤ n_max`.
pub fn check_p_kernels(k: &KernelFamily, r: &DeformationRetract, a: &AInfinity, n_max: usize) -> Result<Residuals> {
    let v = a.carrier();
    let d = a.differential();
    let gf = r.g().after(r.f())?;
    let mut out = Residuals::new("p-kernel identity");
    for n in 2..=n_max.min(k.p.len() + 1) {
        let pn = &k.p[&n];
        let mut terms = vec![(Sign::Plus, d.after(pn))];
        for u in 1..=n {
            terms.push((Sign::Minus * Sign::pow(n as i64), insert(pn, u, d)));
        }
        for t in enum_a(n) {
            let inner = gf.after(&k.p[&t.l])?;
            terms.push((Sign::Minus * Sign::pow((t.i * (t.l + 1) + n) as i64), insert(&k.p[&t.k], t.i, &inner)));
        }
        out.push(n, sum(v, v, n, n as i32 - 3, terms)?);
    }
    Ok(out)
}

/// The p-kernel residuals precomposed with `g^{⊗n}`.
pub fn check_p_kernels_on_g(
    k: &KernelFamily,
    r: &DeformationRetract,
    a: &AInfinity,
    n_max: usize,
) -> Result<Residuals> {
    let full = check_p_kernels(k, r, a, n_max)?;
    let mut out = Residuals::new("p-kernel identity on the image of g");
    for (n, res) in full.per_arity {
        out.push(n, res.compose(&power(r.g(), n))?);
    }
    Ok(out)
}

/// Residuals of `∂q_n + Σ_u (−1)^n q_n(…∂…) + Σ_{B(n)} (−1)^ϑ p_k(gf q_{r₁} ⊗ …)
/// + Σ_{A(n)} (−1)^{i(ℓ+1)+n} q_k(1^{⊗i−1} ⊗ μ_ℓ ⊗ 1^{⊗k−i}) − q₁μ_n` for `2 ≤ n ≤ n_max`.
pub fn check_q_kernels(k: &KernelFamily, r: &DeformationRetract, a: &AInfinity, n_max: usize) -> Result<Residuals> {
    let v = a.carrier();
    let d = a.differential();
    let gf = r.g().after(r.f())?;
    let gfq: BTreeMap<usize, MultiMap> =
        k.q.iter().map(|(n, q)| gf.after(q).map(|x| (*n, x))).collect::<Result<_>>()?;
    let mut out = Residuals::new("q-kernel identity");
    for n in 2..=n_max.min(k.q.len()) {
        let qn = &k.q[&n];
        let mut terms = vec![(Sign::Plus, d.after(qn))];
        for u in 1..=n {
            terms.push((Sign::pow(n as i64), insert(qn, u, d)));
        }
        for rs in enum_b(n) {
            let parts: Vec<Factor<'_>> = rs.iter().map(|x| Factor::Map(&gfq[x])).collect();
            terms.push((Sign::pow(theta(&rs)), k.p[&rs.len()].compose(&parts)));
        }
        for t in enum_a(n) {
            if let Some(ml) = a.op(t.l) {
                terms.push((Sign::pow((t.i * (t.l + 1) + n) as i64), insert(&k.q[&t.k], t.i, ml)));
            }
        }
        if let Some(mn) = a.op(n) {
            terms.push((Sign::Minus, k.q[&1].after(mn)));
        }
        out.push(n, sum(v, v, n, n as i32 - 2, terms)?);
    }
    Ok(out)
}

/// Residuals of `δ₁p̂_n + Σ_u p̂_n(…δ₁…) + Σ_{A(n)} p̂_k(…ĝf̂p̂_ℓ…)`.
pub fn check_p_kernels_suspended(
    k: &SuspendedKernels,
    delta: &SuspendedAInfinity,
    r: &SuspendedRetract,
    n_max: usize,
) -> Result<Residuals> {
    let sv = delta.carrier();
    let d1 = &delta.deltas()[&1];
    let mut out = Residuals::new("suspended p-kernel identity");
    for n in 2..=n_max.min(k.p.len() + 1) {
        let pn = &k.p[&n];
        let mut terms = vec![(Sign::Plus, d1.after(pn))];
        for u in 1..=n {
            terms.push((Sign::Plus, insert(pn, u, d1)));
        }
        for t in enum_a(n) {
            terms.push((Sign::Plus, insert(&k.p[&t.k], t.i, &r.gf.after(&k.p[&t.l])?)));
        }
        out.push(n, sum(sv, sv, n, -2, terms)?);
    }
    Ok(out)
}

/// Residuals of `δ₁q̂_n + Σ_{B(n)} p̂_k(ĝf̂q̂_{r₁} ⊗ …) − Σ_u q̂_n(…δ₁…) − Σ_{A(n)} q̂_k(…δ_ℓ…) − δ_n`.
pub fn check_q_kernels_suspended(
    k: &SuspendedKernels,
    delta: &SuspendedAInfinity,
    r: &SuspendedRetract,
    n_max: usize,
) -> Result<Residuals> {
    let sv = delta.carrier();
    let d1 = &delta.deltas()[&1];
    let gfq: BTreeMap<usize, MultiMap> =
        k.q.iter().map(|(n, q)| r.gf.after(q).map(|x| (*n, x))).collect::<Result<_>>()?;
    let mut out = Residuals::new("suspended q-kernel identity");
    for n in 2..=n_max.min(k.q.len()) {
        let qn = &k.q[&n];
        let mut terms = vec![(Sign::Plus, d1.after(qn))];
        for rs in enum_b(n) {
            let parts: Vec<Factor<'_>> = rs.iter().map(|x| Factor::Map(&gfq[x])).collect();
            terms.push((Sign::Plus, k.p[&rs.len()].compose(&parts)));
        }
        for u in 1..=n {
            terms.push((Sign::Minus, insert(qn, u, d1)));
        }
        for t in enum_a(n) {
            if let Some(dl) = delta.delta(t.l) {
                terms.push((Sign::Minus, insert(&k.q[&t.k], t.i, dl)));
            }
        }
        if let Some(dn) = delta.delta(n) {
            terms.push((Sign::Minus, Ok(dn.clone())));
        }
        out.push(n, sum(sv, sv, n, -1, terms)?);
    }
    Ok(out)
}

/// Transferred data in the suspended convention, as component families on `T̄sW`, `T̄sV`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspendedTransfer {
    pub structure: SuspendedAInfinity,
    pub phi: ComponentFamily,
    pub psi: ComponentFamily,
    pub homotopy: ComponentFamily,
}

/// Residual reports attached to a transfer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferReports {
    pub structure: Residuals,
    pub phi: Residuals,
    pub psi: Residuals,
    pub composite: Residuals,
    pub homotopy: Residuals,
    pub p_kernels: Residuals,
    pub p_kernels_on_g: Residuals,
    pub q_kernels: Residuals,
}

impl TransferReports {
    pub fn all(&self) -> [&Residuals; 8] {
        [
            &self.structure,
            &self.phi,
            &self.psi,
            &self.composite,
            &self.homotopy,
            &self.p_kernels,
            &self.p_kernels_on_g,
            &self.q_kernels,
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.all().iter().all(|r| r.is_zero())
    }
}

/// `ν_n = f p_n g^{⊗n}`, `φ_n = f q_n`, `ψ_n = h p_n g^{⊗n}`, `H_n = h q_n`, with arity-one
/// pieces `∂_W, f, g, h`, together with the kernels and every residual report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferPackage {
    pub nu: Arc<AInfinity>,
    pub phi: Arc<AInftyMorphism>,
    pub psi: Arc<AInftyMorphism>,
    pub homotopy: AInftyHomotopy,
    pub kernels: KernelFamily,
    pub suspended_kernels: SuspendedKernels,
    pub suspended: SuspendedTransfer,
    pub retract: DeformationRetract,
    pub source: Arc<AInfinity>,
    pub truncation: usize,
    pub reports: TransferReports,
}

fn validate_input(r: &DeformationRetract, a: &AInfinity, n: usize) -> Result<()> {
    if n < 1 || n > a.truncation() {
        return Err(Error::Truncation(format!("arity {n} outside 1..={}", a.truncation())));
    }
    if r.big().module() != a.carrier() || r.big().differential() != a.differential() {
        return Err(Error::InvalidRetract("retract does not start at the complex underlying the structure".into()));
    }
    if let Some((k, _)) = check_structure(a, n)?.first_offender() {
        return Err(Error::NotAInfinity(k));
    }
    Ok(())
}

fn desuspend_values(m: &BTreeMap<usize, MultiMap>) -> Result<BTreeMap<usize, MultiMap>> {
    m.iter().map(|(n, x)| desuspend_map(x).map(|y| (*n, y))).collect()
}

/// Transfers `a` along `r` up to arity `n` through the suspended kernels.
pub fn transfer(r: &DeformationRetract, a: &AInfinity, n: usize) -> Result<TransferPackage> {
    validate_input(r, a, n)?;
    let a = Arc::new(a.with_truncation(n)?);
    let delta = suspend_structure(&a)?;
    let sr = SuspendedRetract::new(r)?;
    let sk = suspended_kernels(&delta, &sr, n)?;
    let (sv, sw) = (suspend_module(r.big().module()), suspend_module(r.small().module()));

    let mut nu_hat = vec![suspend_map(r.small().differential())?];
    let mut phi_hat = vec![sr.f.clone()];
    let mut psi_hat = vec![sr.g.clone()];
    let mut h_hat = vec![sr.h.clone()];
    for k in 2..=n {
        let pg = sk.p[&k].compose(&power(&sr.g, k))?;
        nu_hat.push(sr.f.after(&pg)?);
        psi_hat.push(sr.h.after(&pg)?);
        phi_hat.push(sr.f.after(&sk.q[&k])?);
        h_hat.push(sr.h.after(&sk.q[&k])?);
    }
    let structure = suspended_from_deltas(sw.clone(), nu_hat, n)?;
    let phi_fam = ComponentFamily::morphism(sv.clone(), sw.clone(), n, phi_hat)?;
    let psi_fam = ComponentFamily::morphism(sw, sv.clone(), n, psi_hat)?;
    let left = ComponentFamily::morphism(sv.clone(), sv.clone(), n, sk.composite.values().cloned())?;
    let homotopy_fam = ComponentFamily::homotopy(left, ComponentFamily::identity(&sv, n), h_hat)?;

    let nu_products = structure.deltas().range(2..).map(|(_, d)| desuspend_map(d)).collect::<Result<Vec<_>>>()?;
    let nu = Arc::new(AInfinity::new(r.small().module().clone(), r.small().differential().clone(), nu_products, n)?);
    let desus =
        |fam: &ComponentFamily| -> Result<Vec<MultiMap>> { fam.components().values().map(desuspend_map).collect() };
    let phi = Arc::new(AInftyMorphism::new(a.clone(), nu.clone(), desus(&phi_fam)?)?);
    let psi = Arc::new(AInftyMorphism::new(nu.clone(), a.clone(), desus(&psi_fam)?)?);
    let composite = Arc::new(compose_morphisms(&psi, &phi)?);
    let identity = Arc::new(AInftyMorphism::identity(a.clone()));
    let homotopy = AInftyHomotopy::new(composite.clone(), identity, desus(&homotopy_fam)?)?;

    let kernels = KernelFamily {
        p: desuspend_values(&sk.p)?,
        q: desuspend_values(&sk.q)?,
        composite: desuspend_values(&sk.composite)?,
    };
    let reports = TransferReports {
        structure: check_structure(&nu, n)?,
        phi: check_morphism(&phi, n)?,
        psi: check_morphism(&psi, n)?,
        composite: check_morphism(&composite, n)?,
        homotopy: check_homotopy(&homotopy, n)?,
        p_kernels: check_p_kernels(&kernels, r, &a, n)?,
        p_kernels_on_g: check_p_kernels_on_g(&kernels, r, &a, n)?,
        q_kernels: check_q_kernels(&kernels, r, &a, n)?,
    };
    Ok(TransferPackage {
        nu,
        phi,
        psi,
        homotopy,
        kernels,
        suspended_kernels: sk,
        suspended: SuspendedTransfer { structure, phi: phi_fam, psi: psi_fam, homotopy: homotopy_fam },
        retract: r.clone(),
        source: a,
        truncation: n,
        reports,
    })
}

/// Arities at which two kernel families disagree, per kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KernelMismatch {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub composite: Vec<usize>,
}

impl KernelMismatch {
    pub fn is_empty(&self) -> bool {
        self.p.is_empty() && self.q.is_empty() && self.composite.is_empty()
    }
}

fn mismatches(a: &BTreeMap<usize, MultiMap>, b: &BTreeMap<usize, MultiMap>) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (n, x) in a {
        match b.get(n) {
            Some(y) if x.compare(y)? => {}
            _ => out.push(*n),
        }
    }
    out.extend(b.keys().filter(|n| !a.contains_key(n)));
    Ok(out)
}

/// Compares the suspension of the ϑ-signed kernels with the suspended kernels, arity by arity.
pub fn convention_agreement(pkg: &TransferPackage, reading: QSignReading) -> Result<KernelMismatch> {
    let k = unsuspended_kernels(&pkg.source, &pkg.retract, pkg.truncation, reading)?;
    let sus = |m: &BTreeMap<usize, MultiMap>| -> Result<BTreeMap<usize, MultiMap>> {
        m.iter().map(|(n, x)| suspend_map(x).map(|y| (*n, y))).collect()
    };
    Ok(KernelMismatch {
        p: mismatches(&sus(&k.p)?, &pkg.suspended_kernels.p)?,
        q: mismatches(&sus(&k.q)?, &pkg.suspended_kernels.q)?,
        composite: mismatches(&sus(&k.composite)?, &pkg.suspended_kernels.composite)?,
    })
}

/// Arities where `compose_morphisms(ψ, φ)` differs from the cached composite of the kernels.
pub fn composite_mismatch(pkg: &TransferPackage) -> Result<Vec<usize>> {
    let composite = compose_morphisms(&pkg.psi, &pkg.phi)?;
    let zero = |n: usize| MultiMap::zero(pkg.source.carrier().clone(), pkg.source.carrier().clone(), n, n as i32 - 1);
    let mut out = Vec::new();
    for n in 1..=pkg.truncation {
        let a = composite.component(n).cloned().unwrap_or_else(|| zero(n));
        let b = pkg.kernels.composite.get(&n).cloned().unwrap_or_else(|| zero(n));
        if !a.compare(&b)? {
            out.push(n);
        }
    }
    Ok(out)
}

/// Arities where the structure residual of `ν` differs from `f ∘ (p-kernel residual) ∘ g^{⊗n}`.
pub fn p_kernel_reduction_mismatch(pkg: &TransferPackage) -> Result<Vec<usize>> {
    let p_kernels = check_p_kernels(&pkg.kernels, &pkg.retract, &pkg.source, pkg.truncation)?;
    let mut out = Vec::new();
    for (n, res) in &p_kernels.per_arity {
        let reduced = pkg.retract.f().after(&res.compose(&power(pkg.retract.g(), *n))?)?;
        if !reduced.compare(&pkg.reports.structure.per_arity[n])? {
            out.push(*n);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retract::{harmonious_retract, instance_forms};

    #[test]
    fn forms_transfer_has_only_binary_product() {
        let a = instance_forms(5).unwrap();
        let r = harmonious_retract(&a.complex()).unwrap();
        let pkg = transfer(&r, &a, 5).unwrap();
        assert!(pkg.reports.is_zero());
        assert!(pkg.nu.op(2).is_some());
        assert!((3..=5).all(|n| pkg.nu.op(n).is_none()));
    }
}
