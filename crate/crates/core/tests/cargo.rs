//! The cargo inspection fixture, run end to end.

use emcs_core::equilibria::check_acyclic;
use emcs_core::evolution::{
    check_evolving_equilibrium, evolving_grounded_equilibrium, evolving_wfs, EvolvingBeliefState,
};
use emcs_core::syntax::parse_system;
use emcs_core::syntax::records::parse_observations;
use emcs_core::{validate, warnings, Emcs, GroundAtom};

const SYSTEM: &str = include_str!("../fixtures/cargo.emcs");
const OBS: &str = include_str!("../fixtures/cargo.obs");

fn atom(s: &str) -> GroundAtom {
    s.parse().unwrap()
}

fn load() -> (Emcs, emcs_core::evolution::ObservationSequence) {
    let sys = parse_system(SYSTEM).unwrap();
    let obs = parse_observations(OBS, &sys).unwrap();
    (sys, obs)
}

fn run() -> (Emcs, EvolvingBeliefState) {
    let (sys, obs) = load();
    let (se, _) = evolving_wfs(&sys, &obs, 3).unwrap();
    (sys, se)
}

#[test]
fn fixture_validates_with_one_inferred_predicate() {
    let (sys, _) = load();
    assert!(validate(&sys).is_empty(), "{:?}", validate(&sys));
    let w = warnings(&sys);
    assert_eq!(w.len(), 1, "{w:?}");
    assert!(w[0].message.contains("Random/1"), "{}", w[0]);
}

#[test]
fn fixture_is_acyclic() {
    let (sys, _) = load();
    assert!(check_acyclic(&sys));
}

#[test]
fn instant_one_fully_inspects_the_misdeclared_shipment() {
    let (_, se) = run();
    let c4 = &se.states()[0][3];
    assert!(c4.contains(&atom("FullInspection(s1)")));
}

#[test]
fn instant_two_clears_the_compliant_shipment() {
    let (_, se) = run();
    let s = &se.states()[1];
    for p in ["FullInspection", "PartialInspection", "RandomInspection"] {
        assert!(!s[3].contains(&atom(&format!("{p}(s2)"))), "{p}(s2)");
    }
    assert!(s[3].contains(&atom("CompliantShpmt(s2)")));
    assert!(s[2].contains(&atom("LowRiskEUCommodity(c2)")));
}

#[test]
fn instant_three_sees_the_earlier_misfiling() {
    let (_, se) = run();
    let c4 = &se.states()[2][3];
    assert!(c4.contains(&atom("PartialInspection(s3)")));
    assert!(c4.contains(&atom("SuspectedBadGuy(i3)")));
    assert!(!se.states()[1][3].contains(&atom("SuspectedBadGuy(i3)")));
}

#[test]
fn wfs_result_is_an_evolving_equilibrium_and_grounded() {
    let (sys, obs) = load();
    let (se, _) = evolving_wfs(&sys, &obs, 3).unwrap();
    assert!(check_evolving_equilibrium(&sys, &obs, &se).unwrap());
    assert_eq!(evolving_grounded_equilibrium(&sys, &obs, 3).unwrap(), se);
}
