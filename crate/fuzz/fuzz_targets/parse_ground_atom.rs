#![no_main]

use emcs_core::syntax::parse_ground_atom;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = parse_ground_atom(text) {
        assert_eq!(parse_ground_atom(&a.to_string()).expect("printed atom parses"), a);
    }
});
