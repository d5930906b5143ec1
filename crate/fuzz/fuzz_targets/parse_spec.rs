#![no_main]

use libfuzzer_sys::fuzz_target;
use solvquot::dsl::{parse_spec, print_spec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_spec(text) {
        // anything accepted must print to a spec that parses back to itself
        let printed = print_spec(&spec);
        let again = parse_spec(&printed).expect("printed spec parses");
        assert_eq!(print_spec(&again), printed);
    }
});
