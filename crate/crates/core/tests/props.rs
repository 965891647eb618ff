//! Solver properties checked against exhaustive enumeration on generated
//! systems.

use emcs_core::oracle::generate::Generator;
use emcs_core::oracle::Oracle;

#[test]
fn generated_systems_satisfy_the_grounded_properties() {
    let oracle = Oracle::default();
    let mut failures = Vec::new();
    let mut with_grounded = 0;
    for seed in 0..150 {
        let text = Generator::new(seed).system_text();
        let sys = emcs_core::syntax::parse_system(&text).unwrap();
        let report = oracle.verify_props(&sys).unwrap();
        with_grounded += usize::from(!report.grounded.is_empty());
        if !report.pass() {
            failures.push(format!(
                "seed {seed}:\n{text}\n{}",
                serde_json::to_string_pretty(&report).unwrap()
            ));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
    assert!(
        with_grounded > 50,
        "only {with_grounded} instances have grounded equilibria"
    );
}
