#![no_main]

use std::sync::OnceLock;

use emcs_core::syntax::parse_system;
use emcs_core::syntax::records::{observation_line, parse_observation_line, parse_observations};
use emcs_core::Emcs;
use libfuzzer_sys::fuzz_target;

fn system() -> &'static Emcs {
    static SYSTEM: OnceLock<Emcs> = OnceLock::new();
    SYSTEM.get_or_init(|| {
        parse_system(
            "constants a1, a2;
             context O : observation { vocab Arrive/1, Alarm/0; }
             context T : datalog { bridge { add(Seen(x)) <- (O:Arrive(x)). } }",
        )
        .unwrap()
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let sys = system();
    if let Ok(seq) = parse_observations(text, sys) {
        for o in seq.instants() {
            let line = observation_line(sys, o);
            assert_eq!(&parse_observation_line(&line, 1, sys).expect("printed line parses"), o);
        }
    }
});
