#![no_main]

use libfuzzer_sys::fuzz_target;
use stasheff_cli::document::{parse_document, validate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    let again = parse_document(&doc.to_json()).expect("serialized documents parse");
    assert_eq!(again, doc);
    let _ = validate(&doc);
});
