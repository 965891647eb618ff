use std::path::{Path, PathBuf};
use std::process::Command;

use emcs_cli::{run_cli, EXIT_INPUT, EXIT_OK, EXIT_SEMANTIC};
use emcs_core::syntax::parse_system;
use emcs_core::syntax::records::parse_states;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["emcs"];
    full.extend_from_slice(args);
    let code = run_cli(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const MOL: &str = "context C1 : identity { bridge { add(p) <- not (1:p). } }\n";
const M2: &str = "context C1 : identity { bridge { add(p) <- (2:q). } }
context C2 : identity { bridge { add(q) <- not (1:r). } }\n";

#[test]
fn validate_reports_warnings_and_errors() {
    let (code, out, _) = cli(&["validate", &fixture("cargo.emcs")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("warning") && out.contains("Random/1"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.emcs",
        "context C : identity { vocab p/0; bridge { add(q) <- (1:p). } }",
    );
    let (code, out, _) = cli(&["validate", &bad]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.contains("error"), "{out}");

    let broken = write(dir.path(), "broken.emcs", "context C : identity {\n  kb { p( }\n}");
    let (code, _, err) = cli(&["validate", &broken]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains(":2:"), "{err}");
}

#[test]
fn run_prints_one_record_per_instant_and_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let (code, out, _) = cli(&[
        "run",
        &fixture("cargo.emcs"),
        &fixture("cargo.obs"),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let sys = parse_system(&std::fs::read_to_string(fixture("cargo.emcs")).unwrap()).unwrap();
    let states = parse_states(&out, &sys).unwrap();
    assert_eq!(states.size(), 3);
    let traced = parse_states(&std::fs::read_to_string(&trace).unwrap(), &sys).unwrap();
    assert_eq!(traced, states);
    assert!(std::fs::read_to_string(&trace).unwrap().contains("app_next"));

    let (code, grounded, _) = cli(&[
        "run",
        &fixture("cargo.emcs"),
        &fixture("cargo.obs"),
        "--semantics",
        "grounded",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(grounded, out);

    let (code, one, _) = cli(&["run", &fixture("cargo.emcs"), &fixture("cargo.obs"), "--size", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(one.lines().count(), 1);
}

#[test]
fn run_distinguishes_semantic_from_input_failures() {
    let dir = tempfile::tempdir().unwrap();
    let mol = write(dir.path(), "mol.emcs", MOL);
    let obs = write(dir.path(), "obs.jsonl", "{}\n");
    let (code, out, err) = cli(&["run", &mol, &obs]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("\"C1\":[]"));

    let (code, _, err) = cli(&["run", &mol, &obs, "--semantics", "grounded"]);
    assert_eq!(code, EXIT_SEMANTIC);
    assert!(err.contains("no grounded equilibrium"), "{err}");

    let bad_obs = write(dir.path(), "bad.jsonl", "{}\n{\"C9\": []}\n");
    let (code, out, err) = cli(&["run", &mol, &bad_obs]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(out.lines().count(), 1, "the valid instant is still reported");

    let (code, _, _) = cli(&["run", &mol, &obs, "--semantics", "stable"]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = cli(&["run", &mol, "/nonexistent/obs"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn check_accepts_computed_states_and_rejects_others() {
    let dir = tempfile::tempdir().unwrap();
    let (_, out, _) = cli(&["run", &fixture("cargo.emcs"), &fixture("cargo.obs")]);
    let good = write(dir.path(), "good.jsonl", &out);
    let (code, msg, _) = cli(&["check", &fixture("cargo.emcs"), &fixture("cargo.obs"), &good]);
    assert_eq!(code, EXIT_OK);
    assert!(msg.contains("size 3"));

    let tampered = out.replacen("\"FullInspection(s1)\",", "", 1);
    assert_ne!(tampered, out);
    let bad = write(dir.path(), "bad.jsonl", &tampered);
    let (code, _, err) = cli(&["check", &fixture("cargo.emcs"), &fixture("cargo.obs"), &bad]);
    assert_eq!(code, EXIT_SEMANTIC);
    assert!(err.contains("instant 1"), "{err}");
}

#[test]
fn reduct_prints_a_definite_system() {
    let dir = tempfile::tempdir().unwrap();
    let m2 = write(dir.path(), "m2.emcs", M2);
    let empty = write(dir.path(), "s.json", "{\"C1\": [], \"C2\": []}");
    let (code, out, _) = cli(&["reduct", &m2, &empty]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("add(q).") && !out.contains("not"), "{out}");

    let blocked = write(dir.path(), "r.json", "{\"instant\": 1, \"state\": {\"C1\": [\"r\"]}}");
    let (code, out, _) = cli(&["reduct", &m2, &blocked]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.contains("add(q)"), "{out}");
}

#[test]
fn oracle_reports_properties_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let m2 = write(dir.path(), "m2.emcs", M2);
    let (code, out, _) = cli(&["oracle", &m2]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["grounded"], serde_json::json!([[["p"], ["q"]]]));
    assert_eq!(v["minimality"]["pass"], true);

    let (code, _, err) = cli(&["oracle", &fixture("cargo.emcs")]);
    assert_eq!(code, EXIT_SEMANTIC);
    assert!(err.contains("exceeds the bound"), "{err}");
}

#[test]
fn iteration_cap_comes_from_flag_or_environment() {
    let dir = tempfile::tempdir().unwrap();
    let m2 = write(dir.path(), "m2.emcs", M2);
    let obs = write(dir.path(), "obs.jsonl", "{}\n");
    let (code, _, err) = cli(&["run", &m2, &obs, "--iter-cap", "1"]);
    assert_eq!(code, EXIT_SEMANTIC);
    assert!(err.contains("iterations"), "{err}");

    let status = Command::new(env!("CARGO_BIN_EXE_emcs"))
        .args(["run", &m2, &obs])
        .env("EMCS_ITER_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_SEMANTIC));
    let status = Command::new(env!("CARGO_BIN_EXE_emcs"))
        .args(["run", &m2, &obs])
        .env_remove("EMCS_ITER_CAP")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Usage"));
    let (code, _, err) = cli(&["frobnicate"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(!err.is_empty());
}
