//! The JSON interchange format and its validation into library objects.
//!
//! Scalars are exact strings such as `"3/7"`, basis elements are `[degree, index]`
//! pairs, and a map is a list of entries `{ "inputs": [..], "output": [[basis, scalar], ..] }`.
//! Every location in an error message is a path into the document.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use stasheff::ainfty::{compose_morphisms, AInfinity, AInftyHomotopy, AInftyMorphism};
use stasheff::retract::{ChainComplex, DeformationRetract};
use stasheff::{Basis, Field, GradedModule, MultiMap, Scalar, Vector};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub format_version: u32,
    pub field: String,
    pub truncation: usize,
    /// Named graded modules as `[degree, dimension]` pairs.
    pub modules: BTreeMap<String, Vec<(i32, usize)>>,
    pub structure: StructureBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retract: Option<RetractBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureBlock {
    pub module: String,
    pub differential: Vec<Entry>,
    /// Products keyed by arity, starting at 2.
    #[serde(default)]
    pub products: BTreeMap<usize, Vec<Entry>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetractBlock {
    pub small: String,
    pub small_differential: Vec<Entry>,
    pub f: Vec<Entry>,
    pub g: Vec<Entry>,
    pub h: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferBlock {
    pub method: String,
    pub arity: usize,
    /// The transferred structure on the small module.
    pub structure: StructureBlock,
    pub phi: BTreeMap<usize, Vec<Entry>>,
    pub psi: BTreeMap<usize, Vec<Entry>>,
    pub homotopy: BTreeMap<usize, Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub inputs: Vec<(i32, usize)>,
    pub output: Vec<((i32, usize), String)>,
}

/// A rejected document, with the path of the offending part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for InputError {}

fn err(location: impl Into<String>, message: impl fmt::Display) -> InputError {
    InputError { location: location.into(), message: message.to_string() }
}

/// Parses the JSON text; syntax errors report line and column.
pub fn parse_document(text: &str) -> Result<Document, InputError> {
    serde_json::from_str(text).map_err(|e| {
        let location = format!("line {} column {}", e.line(), e.column());
        let message = e.to_string();
        let message = message.strip_suffix(&format!(" at {location}")).unwrap_or(&message).to_string();
        err(location, message)
    })
}

impl Document {
    /// Indented JSON in which any nested value that fits on one line is kept on one line.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("documents always serialize");
        let mut out = String::new();
        layout(&value, 0, &mut out);
        out.push('\n');
        out
    }
}

const LINE_WIDTH: usize = 100;

fn layout(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let compact = v.to_string();
    let pad = |n: usize| "  ".repeat(n);
    if indent > 0 && indent * 2 + compact.len() <= LINE_WIDTH {
        out.push_str(&compact);
        return;
    }
    match v {
        Value::Array(items) if !items.is_empty() => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                layout(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(fields) if !fields.is_empty() => {
            out.push_str("{\n");
            for (i, (k, item)) in fields.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                layout(item, indent + 1, out);
                out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        _ => out.push_str(&compact),
    }
}

/// The validated contents of a document.
#[derive(Clone, Debug)]
pub struct Model {
    pub field: Field,
    pub truncation: usize,
    pub algebra: Arc<AInfinity>,
    pub retract: Option<RetractMaps>,
    pub transfer: Option<TransferModel>,
}

/// Retract data as given, before the retract identities are checked.
#[derive(Clone, Debug)]
pub struct RetractMaps {
    pub small: GradedModule,
    pub small_differential: MultiMap,
    pub f: MultiMap,
    pub g: MultiMap,
    pub h: MultiMap,
}

impl RetractMaps {
    pub fn build(&self, big: &AInfinity) -> stasheff::Result<DeformationRetract> {
        let big = ChainComplex::new(big.carrier().clone(), big.differential().clone())?;
        let small = ChainComplex::new(self.small.clone(), self.small_differential.clone())?;
        DeformationRetract::new(big, small, self.f.clone(), self.g.clone(), self.h.clone())
    }
}

#[derive(Clone, Debug)]
pub struct TransferModel {
    pub arity: usize,
    pub nu: Arc<AInfinity>,
    pub phi: Arc<AInftyMorphism>,
    pub psi: Arc<AInftyMorphism>,
    pub homotopy: AInftyHomotopy,
    pub comparison: Option<String>,
}

pub fn parse_field(tag: &str) -> Result<Field, InputError> {
    if tag == "rational" {
        return Ok(Field::Rational);
    }
    let p = tag
        .strip_prefix("mod-")
        .and_then(|p| p.parse::<u64>().ok())
        .ok_or_else(|| err("field", format!("expected \"rational\" or \"mod-p\", found {tag:?}")))?;
    Field::prime(p).map_err(|e| err("field", e))
}

fn field_tag(field: Field) -> String {
    field.to_string()
}

fn module(doc: &Document, name: &str, location: &str) -> Result<GradedModule, InputError> {
    let dims = doc.modules.get(name).ok_or_else(|| err(location, format!("unknown module {name:?}")))?;
    let mut seen = BTreeSet::new();
    for (i, (d, _)) in dims.iter().enumerate() {
        if !seen.insert(d) {
            return Err(err(format!("modules.{name}[{i}]"), format!("degree {d} listed twice")));
        }
    }
    Ok(GradedModule::new(dims.iter().copied()))
}

struct MapShape<'a> {
    source: &'a GradedModule,
    target: &'a GradedModule,
    arity: usize,
    degree: i32,
}

fn basis_ref(m: &GradedModule, r: (i32, usize), location: &str) -> Result<Basis, InputError> {
    let b = Basis::new(r.0, r.1);
    if !m.contains(b) {
        return Err(err(location, format!("basis element {b} does not exist")));
    }
    Ok(b)
}

fn build_map(field: Field, entries: &[Entry], shape: MapShape<'_>, location: &str) -> Result<MultiMap, InputError> {
    let mut m = MultiMap::zero(shape.source.clone(), shape.target.clone(), shape.arity, shape.degree);
    let mut seen = BTreeSet::new();
    for (i, e) in entries.iter().enumerate() {
        let here = format!("{location}[{i}]");
        if e.inputs.len() != shape.arity {
            return Err(err(
                format!("{here}.inputs"),
                format!("expected {} inputs, found {}", shape.arity, e.inputs.len()),
            ));
        }
        let inputs = e
            .inputs
            .iter()
            .enumerate()
            .map(|(j, r)| basis_ref(shape.source, *r, &format!("{here}.inputs[{j}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if !seen.insert(inputs.clone()) {
            return Err(err(format!("{here}.inputs"), "duplicate entry for these inputs"));
        }
        let mut out = Vector::new();
        for (j, (r, c)) in e.output.iter().enumerate() {
            let b = basis_ref(shape.target, *r, &format!("{here}.output[{j}]"))?;
            let c = field.parse(c).map_err(|e| err(format!("{here}.output[{j}]"), e))?;
            out.add_term(b, c);
        }
        m.add_entry(inputs, &out).map_err(|e| err(&here, e))?;
    }
    Ok(m)
}

fn build_structure(
    doc: &Document,
    field: Field,
    block: &StructureBlock,
    truncation: usize,
    location: &str,
) -> Result<AInfinity, InputError> {
    let v = module(doc, &block.module, &format!("{location}.module"))?;
    let shape = MapShape { source: &v, target: &v, arity: 1, degree: -1 };
    let d = build_map(field, &block.differential, shape, &format!("{location}.differential"))?;
    let mut products = Vec::new();
    for (&n, entries) in &block.products {
        let here = format!("{location}.products.{n}");
        if n < 2 || n > truncation {
            return Err(err(here, format!("arity must lie in 2..={truncation}")));
        }
        let shape = MapShape { source: &v, target: &v, arity: n, degree: n as i32 - 2 };
        products.push(build_map(field, entries, shape, &here)?);
    }
    AInfinity::new(v, d, products, truncation).map_err(|e| err(location, e))
}

fn build_components(
    field: Field,
    blocks: &BTreeMap<usize, Vec<Entry>>,
    source: &GradedModule,
    target: &GradedModule,
    degree_offset: i32,
    arity: usize,
    location: &str,
) -> Result<Vec<MultiMap>, InputError> {
    blocks
        .iter()
        .map(|(&n, entries)| {
            let here = format!("{location}.{n}");
            if n < 1 || n > arity {
                return Err(err(&here, format!("arity must lie in 1..={arity}")));
            }
            let shape = MapShape { source, target, arity: n, degree: n as i32 + degree_offset };
            build_map(field, entries, shape, &here)
        })
        .collect()
}

/// Validates every reference, scalar and homogeneity constraint of the document.
pub fn validate(doc: &Document) -> Result<Model, InputError> {
    if doc.format_version != FORMAT_VERSION {
        return Err(err(
            "format_version",
            format!("unsupported version {}, expected {FORMAT_VERSION}", doc.format_version),
        ));
    }
    let field = parse_field(&doc.field)?;
    if doc.truncation < 1 {
        return Err(err("truncation", "must be at least 1"));
    }
    let algebra = Arc::new(build_structure(doc, field, &doc.structure, doc.truncation, "structure")?);
    let v = algebra.carrier().clone();
    let retract = match &doc.retract {
        None => None,
        Some(r) => {
            let w = module(doc, &r.small, "retract.small")?;
            let map = |entries: &[Entry], source: &GradedModule, target: &GradedModule, degree: i32, name: &str| {
                build_map(field, entries, MapShape { source, target, arity: 1, degree }, &format!("retract.{name}"))
            };
            Some(RetractMaps {
                small_differential: map(&r.small_differential, &w, &w, -1, "small_differential")?,
                f: map(&r.f, &v, &w, 0, "f")?,
                g: map(&r.g, &w, &v, 0, "g")?,
                h: map(&r.h, &v, &v, 1, "h")?,
                small: w,
            })
        }
    };
    let transfer = match &doc.transfer {
        None => None,
        Some(t) => {
            if t.arity < 1 || t.arity > doc.truncation {
                return Err(err("transfer.arity", format!("must lie in 1..={}", doc.truncation)));
            }
            let nu = Arc::new(build_structure(doc, field, &t.structure, t.arity, "transfer.structure")?);
            let w = nu.carrier().clone();
            let source = Arc::new(algebra.with_truncation(t.arity).map_err(|e| err("transfer.arity", e))?);
            let phi = build_components(field, &t.phi, &v, &w, -1, t.arity, "transfer.phi")?;
            let psi = build_components(field, &t.psi, &w, &v, -1, t.arity, "transfer.psi")?;
            let hom = build_components(field, &t.homotopy, &v, &v, 0, t.arity, "transfer.homotopy")?;
            let phi =
                Arc::new(AInftyMorphism::new(source.clone(), nu.clone(), phi).map_err(|e| err("transfer.phi", e))?);
            let psi =
                Arc::new(AInftyMorphism::new(nu.clone(), source.clone(), psi).map_err(|e| err("transfer.psi", e))?);
            let composite = Arc::new(compose_morphisms(&psi, &phi).map_err(|e| err("transfer", e))?);
            let identity = Arc::new(AInftyMorphism::identity(source));
            let homotopy = AInftyHomotopy::new(composite, identity, hom).map_err(|e| err("transfer.homotopy", e))?;
            Some(TransferModel { arity: t.arity, nu, phi, psi, homotopy, comparison: t.comparison.clone() })
        }
    };
    Ok(Model { field, truncation: doc.truncation, algebra, retract, transfer })
}

/// The entries of a map in table order, with exact scalar strings.
pub fn entries(m: &MultiMap) -> Vec<Entry> {
    m.table()
        .iter()
        .map(|(w, v)| Entry {
            inputs: w.iter().map(|b| (b.degree, b.index)).collect(),
            output: v.iter().map(|(b, c)| ((b.degree, b.index), c.to_string())).collect(),
        })
        .collect()
}

fn dims(m: &GradedModule) -> Vec<(i32, usize)> {
    m.dims().iter().map(|(d, n)| (*d, *n)).collect()
}

pub fn structure_block(a: &AInfinity, module: &str) -> StructureBlock {
    StructureBlock {
        module: module.into(),
        differential: entries(a.differential()),
        products: a.products().iter().map(|(n, m)| (*n, entries(m))).collect(),
    }
}

pub fn component_blocks<'a>(
    components: impl IntoIterator<Item = (&'a usize, &'a MultiMap)>,
) -> BTreeMap<usize, Vec<Entry>> {
    components.into_iter().filter(|(_, m)| !m.is_zero()).map(|(n, m)| (*n, entries(m))).collect()
}

pub const BIG_MODULE: &str = "V";
pub const SMALL_MODULE: &str = "W";

/// A document holding `a` and, when given, a retract of it.
pub fn document_for(field: Field, a: &AInfinity, retract: Option<&DeformationRetract>) -> Document {
    let mut modules = BTreeMap::from([(BIG_MODULE.to_string(), dims(a.carrier()))]);
    let retract = retract.map(|r| {
        modules.insert(SMALL_MODULE.to_string(), dims(r.small().module()));
        RetractBlock {
            small: SMALL_MODULE.into(),
            small_differential: entries(r.small().differential()),
            f: entries(r.f()),
            g: entries(r.g()),
            h: entries(r.h()),
        }
    });
    Document {
        format_version: FORMAT_VERSION,
        field: field_tag(field),
        truncation: a.truncation(),
        modules,
        structure: structure_block(a, BIG_MODULE),
        retract,
        transfer: None,
    }
}

/// Exact scalar literal parsing in the given field, the second decoder entry point.
pub fn parse_scalar(field: Field, text: &str) -> Result<Scalar, InputError> {
    field.parse(text).map_err(|e| err("scalar", e))
}
