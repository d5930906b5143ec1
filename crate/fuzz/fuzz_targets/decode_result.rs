#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use solvquot::action::ActionSpec;
use solvquot::dsl::parse_spec;
use solvquot::gallery;
use solvquot::json::decode_result;
use solvquot::verify::verify_output;

fn spec() -> &'static ActionSpec {
    static SPEC: OnceLock<ActionSpec> = OnceLock::new();
    SPEC.get_or_init(|| parse_spec(gallery::WEITZENBOECK).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = decode_result(spec(), text) {
        let _ = verify_output(&q);
    }
});
