use std::path::PathBuf;
use std::process::Command;

use stasheff::retract::instance_massey;
use stasheff::verify::rescaling_retract;
use stasheff::Field;
use stasheff_cli::commands::{self, Method, RetractSource, TransferOptions};
use stasheff_cli::document::{document_for, parse_document, parse_field, parse_scalar, validate, Document, Entry};
use stasheff_cli::report::{counts_are_zero, parse_fields};

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(format!("{name}.json"))
}

fn load(name: &str) -> Document {
    parse_document(&std::fs::read_to_string(instance(name)).unwrap()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stasheff")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    (out.status.code().unwrap(), stdout, stderr)
}

fn both(arity: Option<usize>) -> TransferOptions {
    TransferOptions { method: Method::Both, arity, retract: None }
}

#[test]
fn shipped_documents_roundtrip_through_serialization() {
    for name in ["massey", "forms"] {
        let text = std::fs::read_to_string(instance(name)).unwrap();
        let doc = parse_document(&text).unwrap();
        assert_eq!(doc.to_json(), text, "{name} is stored in canonical layout");
        assert_eq!(parse_document(&doc.to_json()).unwrap(), doc);
        validate(&doc).unwrap();
    }
}

#[test]
fn transfer_output_roundtrips_and_checks_clean() {
    let outcome = commands::transfer(&load("massey"), both(Some(4))).unwrap();
    assert!(outcome.success);
    let doc = outcome.document.unwrap();
    let again = parse_document(&doc.to_json()).unwrap();
    assert_eq!(again, doc);
    let model = validate(&again).unwrap();
    let t = model.transfer.unwrap();
    assert_eq!(t.arity, 4);
    assert_eq!(t.comparison.as_deref(), Some("exact"));
    assert_eq!(t.nu.op(3).unwrap().nonzero_count(), 2);
    let check = commands::check(&again).unwrap();
    assert!(check.success, "{}", check.report);
    assert_eq!(check.report.get("transfer.comparison"), Some("exact"));
}

#[test]
fn massey_binary_transfer_exits_zero_with_triple_product() {
    let out = scratch("massey_out.json", "");
    let (code, stdout, _) =
        run(&["transfer", instance("massey").to_str().unwrap(), "--arity", "5", "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    let fields = parse_fields(&stdout);
    assert_eq!(fields["status"], "ok");
    assert_eq!(fields["nu.3.nonzero"], "2");
    assert!(stdout.contains("nu_3 [[1, 0], [1, 1], [1, 2]] = -1*[4, 0] + -1*[4, 1]"), "{stdout}");
    let written = parse_document(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(written.transfer.unwrap().method, "both");
}

#[test]
fn forms_document_checks_and_transfers_cleanly() {
    let path = instance("forms");
    let (code, stdout, _) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(parse_fields(&stdout)["retract"], "absent");
    let (code, stdout, _) = run(&["transfer", path.to_str().unwrap(), "--method", "kernels"]);
    assert_eq!(code, 0, "{stdout}");
    let fields = parse_fields(&stdout);
    assert!(fields.keys().all(|k| !k.starts_with("hpl.") && !k.starts_with("comparison")));
}

#[test]
fn corrupted_sign_fails_at_arity_two() {
    let text = std::fs::read_to_string(instance("forms")).unwrap();
    let flipped = r#"{"inputs":[[0,1],[-1,0]],"output":[[[-1,1],"-1"]]}"#;
    let corrupted = text.replace(r#"{"inputs":[[0,1],[-1,0]],"output":[[[-1,1],"1"]]}"#, flipped);
    assert_ne!(corrupted, text);
    let path = scratch("forms_corrupted.json", &corrupted);
    let (code, stdout, _) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 1, "{stdout}");
    let fields = parse_fields(&stdout);
    assert_eq!(fields["status"], "failed");
    assert!(fields["residuals.structure"].starts_with("1:0,2:"));
    assert!(!counts_are_zero(&fields["residuals.structure"]));
    assert!(stdout.contains("first nonzero residual at arity 2"), "{stdout}");
    let (code, stdout, _) = run(&["transfer", path.to_str().unwrap()]);
    assert_eq!(code, 1, "{stdout}");
    assert_eq!(parse_fields(&stdout)["status"], "error");
}

#[test]
fn empty_products_check_only_the_square_of_the_differential() {
    let mut doc = load("massey");
    doc.structure.products.clear();
    doc.truncation = 1;
    let outcome = commands::check(&doc).unwrap();
    assert!(outcome.success);
    assert_eq!(outcome.report.get("residuals.structure"), Some("1:0"));

    let mut broken = load("massey");
    broken.structure.products.clear();
    let extra = Entry { inputs: vec![(4, 0)], output: vec![((3, 0), "1".into())] };
    broken.structure.differential.push(extra);
    let outcome = commands::check(&broken).unwrap();
    assert!(!outcome.success);
    assert_eq!(outcome.report.get("residuals.structure"), Some("1:1,2:0,3:0,4:0,5:0"));
}

#[test]
fn kernels_along_a_retract_with_zero_homotopy_have_no_higher_components() {
    let a = instance_massey(4).unwrap();
    let r = rescaling_retract(&a.complex()).unwrap();
    let doc = document_for(Field::Rational, &a, Some(&r));
    let options = TransferOptions { method: Method::Kernels, arity: None, retract: Some(RetractSource::Document) };
    let outcome = commands::transfer(&doc, options).unwrap();
    assert!(outcome.success, "{}", outcome.report);
    let t = outcome.document.unwrap().transfer.unwrap();
    assert_eq!(t.phi.keys().copied().collect::<Vec<_>>(), vec![1]);
    assert_eq!(t.psi.keys().copied().collect::<Vec<_>>(), vec![1]);
    assert!(t.homotopy.is_empty());
    assert_eq!(t.structure.products.keys().copied().collect::<Vec<_>>(), vec![2]);
}

#[test]
fn broken_side_conditions_skip_the_comparison_and_still_succeed() {
    let a = instance_massey(4).unwrap();
    let r = stasheff::retract::harmonious_retract(&a.complex()).unwrap();
    let broken = stasheff::corpus::side_condition_breaker(&r).unwrap().unwrap();
    let doc = document_for(Field::Rational, &a, Some(&broken));
    let outcome = commands::transfer(&doc, both(None)).unwrap();
    assert!(outcome.success, "{}", outcome.report);
    assert!(outcome.report.get("side_conditions").unwrap().starts_with("failed:"));
    assert_eq!(outcome.report.get("comparison"), Some("skipped: side conditions not met"));
    assert_eq!(outcome.report.get("comparison.nu"), Some("skipped: side conditions not met"));
}

#[test]
fn input_errors_exit_two_with_a_location() {
    let cases = [
        ("truncated.json", "{\"format_version\": 1,\n", "line 2 column 0"),
        ("unknown_field.json", r#"{"format_version":1,"colour":"red"}"#, "unknown field"),
    ];
    for (name, text, needle) in cases {
        let path = scratch(name, text);
        let (code, stdout, stderr) = run(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 2, "{name}");
        assert!(stdout.is_empty());
        assert!(stderr.contains(needle), "{name}: {stderr}");
    }
    let (code, _, stderr) = run(&["check", "/nonexistent/doc.json"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("/nonexistent/doc.json"));
}

#[test]
fn semantic_errors_name_the_offending_path() {
    let mut doc = load("massey");
    doc.structure.products.get_mut(&2).unwrap()[1].inputs[1] = (3, 7);
    let e = validate(&doc).unwrap_err();
    assert_eq!(e.location, "structure.products.2[1].inputs[1]");

    let mut doc = load("massey");
    let first = doc.structure.products[&2][0].clone();
    doc.structure.products.get_mut(&2).unwrap().push(first);
    assert_eq!(validate(&doc).unwrap_err().location, "structure.products.2[4].inputs");

    let mut doc = load("massey");
    doc.structure.differential[0].output[0].1 = "1/0".into();
    assert_eq!(validate(&doc).unwrap_err().location, "structure.differential[0].output[0]");

    let mut doc = load("massey");
    doc.structure.products.get_mut(&2).unwrap()[0].output[0].0 = (3, 0);
    assert_eq!(validate(&doc).unwrap_err().location, "structure.products.2[0]");

    let mut doc = load("massey");
    doc.field = "mod-8".into();
    assert_eq!(validate(&doc).unwrap_err().location, "field");

    let mut doc = load("massey");
    doc.structure.products.insert(6, Vec::new());
    assert_eq!(validate(&doc).unwrap_err().location, "structure.products.6");

    let mut doc = load("massey");
    doc.format_version = 2;
    assert_eq!(validate(&doc).unwrap_err().location, "format_version");

    let e = commands::transfer(&load("massey"), both(Some(6))).unwrap_err();
    assert_eq!(e.location, "--arity");
    let options = TransferOptions { method: Method::Hpl, arity: None, retract: Some(RetractSource::Document) };
    assert_eq!(commands::transfer(&load("massey"), options).unwrap_err().location, "retract");
}

#[test]
fn scalars_parse_exactly_in_each_field() {
    assert_eq!(parse_scalar(Field::Rational, "6/4").unwrap().to_string(), "3/2");
    assert_eq!(parse_scalar(Field::Prime(7), "1/2").unwrap().to_string(), "4");
    assert!(parse_scalar(Field::Rational, "0.5").is_err());
    assert!(parse_scalar(Field::Prime(7), "1/7").is_err());
    assert_eq!(parse_field("mod-7").unwrap(), Field::Prime(7));
    assert!(parse_field("mod-1").is_err());
    assert!(parse_field("real").is_err());
}

#[test]
fn prime_field_transfer_matches_rational_shape() {
    let mut doc = load("forms");
    doc.field = "mod-7".into();
    let outcome = commands::transfer(&doc, both(None)).unwrap();
    assert!(outcome.success, "{}", outcome.report);
    assert_eq!(outcome.report.get("field"), Some("mod-7"));
    assert_eq!(outcome.report.get("comparison"), Some("exact"));
}

#[test]
fn reports_are_deterministic() {
    let path = instance("massey");
    let first = run(&["transfer", path.to_str().unwrap(), "--arity", "4"]);
    let second = run(&["transfer", path.to_str().unwrap(), "--arity", "4"]);
    assert_eq!(first, second);
    let a = run(&["selftest", "--corpus-size", "3", "--seed", "9", "--arity", "3"]);
    let b = run(&["selftest", "--corpus-size", "3", "--seed", "9", "--arity", "3"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0, "{}", a.1);
}

#[test]
fn selftest_rejects_degenerate_arity() {
    let (code, _, stderr) = run(&["selftest", "--arity", "1"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--arity"));
}

#[test]
fn input_without_products_transfers_to_its_homology_unchanged() {
    let mut doc = load("forms");
    doc.structure.products.clear();
    let outcome = commands::transfer(&doc, both(None)).unwrap();
    assert!(outcome.success, "{}", outcome.report);
    let out = outcome.document.unwrap();
    assert_eq!(out.structure, doc.structure);
    let t = out.transfer.unwrap();
    assert!(t.structure.products.is_empty());
    assert!(t.structure.differential.is_empty());
    assert_eq!(t.phi.keys().copied().collect::<Vec<_>>(), vec![1]);
    assert_eq!(t.psi.keys().copied().collect::<Vec<_>>(), vec![1]);
    assert_eq!(t.homotopy.keys().copied().collect::<Vec<_>>(), vec![1]);
    assert_eq!(t.comparison.as_deref(), Some("exact"));
}

#[test]
fn empty_selftest_reports_nothing_and_succeeds() {
    let (code, stdout, _) = run(&["selftest", "--corpus-size", "0"]);
    assert_eq!(code, 0, "{stdout}");
    let fields = parse_fields(&stdout);
    assert_eq!(fields["instances_passed"], "0/0");
    assert_eq!(fields["mutants_killed"], "0/0");
    assert!(fields.keys().all(|k| !k.starts_with("check.")));
    assert!(stdout.ends_with("status=ok\n\n"));
}

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.clone(), std::fs::read(p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn fuzz_seed_documents_roundtrip_and_validate() {
    let seeds = seeds("parse_document");
    assert!(seeds.len() >= 2);
    for (path, bytes) in seeds {
        let doc = parse_document(std::str::from_utf8(&bytes).unwrap()).unwrap();
        assert_eq!(parse_document(&doc.to_json()).unwrap(), doc, "{}", path.display());
        validate(&doc).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn fuzz_seed_scalars_reprint_to_themselves() {
    let seeds = seeds("parse_scalar");
    assert!(!seeds.is_empty());
    let mut parsed = 0;
    for (_, bytes) in seeds {
        let text = std::str::from_utf8(&bytes).unwrap();
        for field in [Field::Rational, Field::Prime(7), Field::Prime(4_294_967_291)] {
            if let Ok(x) = parse_scalar(field, text) {
                parsed += 1;
                assert_eq!(parse_scalar(field, &x.to_string()).unwrap(), x, "{text:?} in {field}");
            }
        }
    }
    assert!(parsed > 0);
}
