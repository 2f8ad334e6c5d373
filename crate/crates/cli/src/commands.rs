//! The `check`, `transfer` and `selftest` commands, independent of argument parsing.

use std::sync::Arc;

use stasheff::ainfty::{check_homotopy, check_morphism, check_structure, compose_morphisms};
use stasheff::kernels::{transfer as kernel_transfer, TransferPackage};
use stasheff::perturbation::{build_perturbation, compare_hpl_vs_kernels, hpl_transfer, HplOutput};
use stasheff::retract::{harmonious_retract, DeformationRetract, SideConditions};
use stasheff::suspension::{desuspend_homotopy, desuspend_morphism, desuspend_structure, suspend_structure};
use stasheff::verify::{selftest as run_selftest, SelftestReport};
use stasheff::{AInfinity, AInftyHomotopy, AInftyMorphism, Residuals};

use crate::document::{
    component_blocks, document_for, structure_block, validate, Document, InputError, Model, TransferBlock, SMALL_MODULE,
};
use crate::report::{counts, Report};

/// The result of a command: its report, an optional output document, and whether it succeeded.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub document: Option<Document>,
    pub success: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }

    fn finish(mut report: Report, document: Option<Document>, success: bool) -> Self {
        report.field("status", if success { "ok" } else { "failed" });
        Outcome { report, document, success }
    }

    fn error(mut report: Report, e: stasheff::Error) -> Self {
        report.line(format!("error: {e}"));
        report.field("status", "error");
        Outcome { report, document: None, success: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Kernels,
    Hpl,
    Both,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Kernels => "kernels",
            Method::Hpl => "hpl",
            Method::Both => "both",
        }
    }

    fn uses_kernels(self) -> bool {
        self != Method::Hpl
    }

    fn uses_hpl(self) -> bool {
        self != Method::Kernels
    }
}

/// Where the retract comes from: the document's own block, or the harmonious retract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RetractSource {
    Document,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransferOptions {
    pub method: Method,
    /// Defaults to the document's truncation.
    pub arity: Option<usize>,
    /// Defaults to the document's retract when it has one, and to `Auto` otherwise.
    pub retract: Option<RetractSource>,
}

fn side_conditions_value(s: &SideConditions) -> String {
    let failed: Vec<&str> =
        [("fg_identity", s.fg_identity), ("fh_zero", s.fh_zero), ("hg_zero", s.hg_zero), ("hh_zero", s.hh_zero)]
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| *name)
            .collect();
    if failed.is_empty() {
        "held".into()
    } else {
        format!("failed:{}", failed.join(","))
    }
}

/// Transferred objects in unsuspended form.
struct Objects {
    nu: Arc<AInfinity>,
    phi: Arc<AInftyMorphism>,
    psi: Arc<AInftyMorphism>,
    homotopy: AInftyHomotopy,
}

impl Objects {
    fn from_package(pkg: &TransferPackage) -> Self {
        Objects { nu: pkg.nu.clone(), phi: pkg.phi.clone(), psi: pkg.psi.clone(), homotopy: pkg.homotopy.clone() }
    }

    fn from_hpl(out: &HplOutput, source: Arc<AInfinity>) -> stasheff::Result<Option<Self>> {
        let Some(ext) = &out.extracted else { return Ok(None) };
        let nu = Arc::new(desuspend_structure(&ext.structure)?);
        let phi = Arc::new(desuspend_morphism(&ext.phi, source.clone(), nu.clone())?);
        let psi = Arc::new(desuspend_morphism(&ext.psi, nu.clone(), source.clone())?);
        let composite = Arc::new(compose_morphisms(&psi, &phi)?);
        let identity = Arc::new(AInftyMorphism::identity(source));
        let homotopy = desuspend_homotopy(&ext.homotopy, composite, identity)?;
        Ok(Some(Objects { nu, phi, psi, homotopy }))
    }

    fn residuals(&self, n: usize) -> stasheff::Result<Vec<(&'static str, Residuals)>> {
        Ok(vec![
            ("structure", check_structure(&self.nu, n)?),
            ("phi", check_morphism(&self.phi, n)?),
            ("psi", check_morphism(&self.psi, n)?),
            ("homotopy", check_homotopy(&self.homotopy, n)?),
        ])
    }

    fn block(&self, method: Method, n: usize, comparison: Option<String>) -> TransferBlock {
        TransferBlock {
            method: method.as_str().into(),
            arity: n,
            structure: structure_block(&self.nu, SMALL_MODULE),
            phi: component_blocks(self.phi.components()),
            psi: component_blocks(self.psi.components()),
            homotopy: component_blocks(self.homotopy.components()),
            comparison,
        }
    }
}

/// Records residual counts under `prefix` and returns whether they all vanish.
fn record(report: &mut Report, prefix: &str, residuals: &[(&str, Residuals)]) -> bool {
    let mut ok = true;
    for (name, r) in residuals {
        report.residuals(&format!("{prefix}.{name}"), r);
        ok &= r.is_zero();
    }
    ok
}

/// Validates the algebra, the retract and any transfer block of a document.
pub fn check(doc: &Document) -> Result<Outcome, InputError> {
    let model = validate(doc)?;
    let mut report = Report::new("check");
    report.field("field", model.field);
    report.field("truncation", model.truncation);
    match check_model(&model, &mut report) {
        Ok(ok) => Ok(Outcome::finish(report, None, ok)),
        Err(e) => Ok(Outcome::error(report, e)),
    }
}

fn check_model(model: &Model, report: &mut Report) -> stasheff::Result<bool> {
    let structure = check_structure(&model.algebra, model.truncation)?;
    let mut ok = record(report, "residuals", &[("structure", structure)]);
    match &model.retract {
        None => report.field("retract", "absent"),
        Some(maps) => match maps.build(&model.algebra) {
            Ok(r) => {
                report.field("retract", "valid");
                report.field("side_conditions", side_conditions_value(&r.side_conditions()));
            }
            Err(e) => {
                ok = false;
                report.field("retract", "invalid");
                report.line(format!("retract: {e}"));
            }
        },
    }
    if let Some(t) = &model.transfer {
        report.field("transfer.arity", t.arity);
        let objects =
            Objects { nu: t.nu.clone(), phi: t.phi.clone(), psi: t.psi.clone(), homotopy: t.homotopy.clone() };
        ok &= record(report, "transfer", &objects.residuals(t.arity)?);
        if let Some(c) = &t.comparison {
            report.field("transfer.comparison", c);
        }
    }
    Ok(ok)
}

/// Transfers the document's structure to the homology of its underlying complex.
pub fn transfer(doc: &Document, options: TransferOptions) -> Result<Outcome, InputError> {
    let model = validate(doc)?;
    let n = options.arity.unwrap_or(model.truncation);
    if n < 1 || n > model.truncation {
        return Err(InputError {
            location: "--arity".into(),
            message: format!("must lie in 1..={}", model.truncation),
        });
    }
    let source = match options.retract {
        Some(s) => s,
        None if model.retract.is_some() => RetractSource::Document,
        None => RetractSource::Auto,
    };
    if source == RetractSource::Document && model.retract.is_none() {
        return Err(InputError { location: "retract".into(), message: "the document has no retract block".into() });
    }
    let mut report = Report::new("transfer");
    report.field("method", options.method.as_str());
    report.field("arity", n);
    report.field("field", model.field);
    report.field("retract", if source == RetractSource::Auto { "auto" } else { "document" });
    let retract = match source {
        RetractSource::Auto => harmonious_retract(&model.algebra.complex()),
        RetractSource::Document => model.retract.as_ref().expect("checked above").build(&model.algebra),
    };
    let retract = match retract {
        Ok(r) => r,
        Err(e) => return Ok(Outcome::error(report, e)),
    };
    match run_transfer(&model, &retract, options.method, n, &mut report) {
        Ok((ok, document)) => Ok(Outcome::finish(report, document, ok)),
        Err(e) => Ok(Outcome::error(report, e)),
    }
}

fn run_transfer(
    model: &Model,
    r: &DeformationRetract,
    method: Method,
    n: usize,
    report: &mut Report,
) -> stasheff::Result<(bool, Option<Document>)> {
    report.field("side_conditions", side_conditions_value(&r.side_conditions()));
    let a = Arc::new(model.algebra.with_truncation(n)?);
    let mut ok = true;
    let pkg = if method.uses_kernels() { Some(kernel_transfer(r, &a, n)?) } else { None };
    if let Some(pkg) = &pkg {
        for (name, res) in [
            ("structure", &pkg.reports.structure),
            ("phi", &pkg.reports.phi),
            ("psi", &pkg.reports.psi),
            ("composite", &pkg.reports.composite),
            ("homotopy", &pkg.reports.homotopy),
            ("p_kernels", &pkg.reports.p_kernels),
            ("p_kernels_on_g", &pkg.reports.p_kernels_on_g),
            ("q_kernels", &pkg.reports.q_kernels),
        ] {
            report.residuals(&format!("kernels.{name}"), res);
            ok &= res.is_zero();
        }
    }
    let hpl = if method.uses_hpl() {
        let data = build_perturbation(&suspend_structure(&a)?, r)?;
        Some(hpl_transfer(&data)?)
    } else {
        None
    };
    let mut hpl_objects = None;
    if let Some(out) = &hpl {
        report.field("hpl.nilpotency", counts(&out.nilpotency));
        for (name, op) in out.identities.all() {
            report.field(format!("hpl.identity.{name}"), op.nonzero_count());
            ok &= op.is_zero();
        }
        report.field("hpl.extraction", out.extraction_status());
        hpl_objects = Objects::from_hpl(out, a.clone())?;
        if let Some(obj) = &hpl_objects {
            ok &= record(report, "hpl", &obj.residuals(n)?);
        }
    }
    let mut comparison = None;
    if let (Some(pkg), Some(out)) = (&pkg, &hpl) {
        let c = compare_hpl_vs_kernels(out, pkg, n)?;
        report.field("comparison", c.status.as_str());
        for (name, mismatches) in c.objects() {
            report.field(format!("comparison.{name}"), c.verdict(mismatches));
            if !mismatches.is_empty() {
                ok = false;
                report.line(format!("comparison.{name}: mismatch at homogeneities {mismatches:?}"));
            }
        }
        comparison = Some(c.status.as_str().to_string());
    }
    let objects = pkg.as_ref().map(Objects::from_package).or(hpl_objects);
    let document = objects.map(|obj| {
        for (k, m) in obj.nu.products() {
            report.field(format!("nu.{k}.nonzero"), m.nonzero_count());
            report.entries(&format!("nu_{k}"), m);
        }
        let mut doc = document_for(model.field, &model.algebra, Some(r));
        doc.transfer = Some(obj.block(method, n, comparison));
        doc
    });
    Ok((ok, document))
}

/// Runs the corpus selftest and renders its report.
pub fn selftest(corpus_size: usize, seed: u64, arity: usize) -> Result<Outcome, InputError> {
    if arity < 2 {
        return Err(InputError { location: "--arity".into(), message: "must be at least 2".into() });
    }
    let mut report = Report::new("selftest");
    report.field("corpus_size", corpus_size);
    report.field("seed", seed);
    report.field("arity", arity);
    match run_selftest(corpus_size, seed, arity) {
        Ok(st) => {
            let ok = st.passed();
            render_selftest(&st, &mut report);
            Ok(Outcome::finish(report, None, ok))
        }
        Err(e) => Ok(Outcome::error(report, e)),
    }
}

fn render_selftest(st: &SelftestReport, report: &mut Report) {
    report.field("instances_passed", format!("{}/{}", st.instances_passed(), st.instances.len()));
    let mut names: Vec<&str> = Vec::new();
    for inst in &st.instances {
        for c in &inst.checks {
            if !names.contains(&c.name.as_str()) {
                names.push(&c.name);
            }
        }
    }
    for name in names {
        let (mut passed, mut total) = (0, 0);
        for c in st.instances.iter().flat_map(|i| &i.checks).filter(|c| c.name == name) {
            total += 1;
            passed += usize::from(c.passed);
        }
        report.field(format!("check.{}", name.replace(' ', "_")), format!("{passed}/{total}"));
    }
    for d in &st.directions {
        let name = d.name();
        report.field(format!("direction.{name}.premise_held"), d.premise_held);
        report.field(format!("direction.{name}.conclusion_failed"), d.conclusion_failed);
        report.field(format!("direction.{name}.discrepancies"), d.discrepancies);
    }
    for m in &st.mutants {
        let value = match &m.killed_by {
            Some((label, check)) => format!("killed:{label}:{check}"),
            None => "survived".into(),
        };
        report.field(format!("mutant.{:?}", m.mutant), value);
    }
    report.field("mutants_killed", format!("{}/{}", st.mutants_killed(), st.mutants.len()));
    for inst in &st.instances {
        for c in inst.failures() {
            report.line(format!("{} {} failed: {}", inst.label, c.name, c.detail));
        }
    }
    if !st.passed() {
        report.line(format!(
            "reproduce: stasheff selftest --corpus-size {} --seed {} --arity {}",
            st.corpus_size, st.seed, st.arity
        ));
    }
}
