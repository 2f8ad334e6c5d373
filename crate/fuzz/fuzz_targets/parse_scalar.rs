#![no_main]

use libfuzzer_sys::fuzz_target;
use stasheff::Field;
use stasheff_cli::document::parse_scalar;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for field in [Field::Rational, Field::Prime(7), Field::Prime(4_294_967_291)] {
        if let Ok(x) = parse_scalar(field, text) {
            let printed = x.to_string();
            assert_eq!(parse_scalar(field, &printed).expect("printed scalars parse"), x);
        }
    }
});
