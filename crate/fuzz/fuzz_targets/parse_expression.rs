#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use solvquot::action::ActionSpec;
use solvquot::dsl::{parse_poly, parse_spec};
use solvquot::gallery;

fn spec() -> &'static ActionSpec {
    static SPEC: OnceLock<ActionSpec> = OnceLock::new();
    SPEC.get_or_init(|| parse_spec(gallery::AFFINE).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let table = spec().table();
    if let Ok(p) = parse_poly(table, text) {
        assert_eq!(parse_poly(table, &p.to_string()).expect("printed polynomial parses"), p);
    }
});
