#![no_main]

use emcs_core::syntax::{parse_system, serialize_system};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sys) = parse_system(text) {
        let _ = emcs_core::validate(&sys);
        // Whatever parses must print to text that parses to the same system.
        let printed = serialize_system(&sys);
        let back = parse_system(&printed).expect("printed system parses");
        assert_eq!(back, sys);
    }
});
