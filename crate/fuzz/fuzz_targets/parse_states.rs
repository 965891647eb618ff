#![no_main]

use std::sync::OnceLock;

use emcs_core::syntax::parse_system;
use emcs_core::syntax::records::{parse_single_state, parse_states, state_record};
use emcs_core::Emcs;
use libfuzzer_sys::fuzz_target;

fn system() -> &'static Emcs {
    static SYSTEM: OnceLock<Emcs> = OnceLock::new();
    SYSTEM.get_or_init(|| {
        parse_system(
            "constants a1, a2;
             context C1 : identity { bridge { add(p) <- (2:q). } }
             context C2 : normal-lp { kb { q <- not r. } }",
        )
        .unwrap()
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let sys = system();
    let _ = parse_single_state(text, sys);
    if let Ok(se) = parse_states(text, sys) {
        let lines: Vec<_> = se
            .states()
            .iter()
            .enumerate()
            .map(|(j, s)| state_record(sys, j + 1, s))
            .collect();
        assert_eq!(parse_states(&lines.join("\n"), sys).expect("printed records parse"), se);
    }
});
