//! Line-delimited JSON records.
//!
//! Observation stream, one instant per line, keyed by observation-context
//! name (a missing key means no observations):
//!
//! ```text
//! {"C1": ["ShpmtCommod(s1,c1)"], "C2": []}
//! ```
//!
//! State record, one per instant, keyed by context name:
//!
//! ```text
//! {"instant": 1, "state": {"C1": [...], "C2": [...]}}
//! ```
//!
//! Trace records extend state records with `kbs`, `app_now` and `app_next`;
//! readers ignore fields they do not know.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use super::parser::parse_ground_atom;
use crate::error::{Error, Result};
use crate::evolution::{EvolvingBeliefState, InstantTrace, ObservationInstant, ObservationSequence};
use crate::kernel::atom::GroundAtom;
use crate::kernel::belief::{BeliefSet, BeliefState};
use crate::kernel::context::Emcs;

fn record_error(line: usize, message: impl Into<String>) -> Error {
    Error::Record {
        line,
        message: message.into(),
    }
}

fn atoms(line: usize, key: &str, value: &Value) -> Result<BTreeSet<GroundAtom>> {
    let items = value
        .as_array()
        .ok_or_else(|| record_error(line, format!("`{key}` must map to a list of atoms")))?;
    items
        .iter()
        .map(|v| {
            let s = v
                .as_str()
                .ok_or_else(|| record_error(line, format!("`{key}`: atoms must be strings")))?;
            parse_ground_atom(s).map_err(|e| record_error(line, format!("`{key}`: {s:?}: {e}")))
        })
        .collect()
}

fn object(line: usize, text: &str) -> Result<Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(record_error(line, "expected a JSON object")),
        Err(e) => Err(record_error(line, e.to_string())),
    }
}

/// One observation record. `line` is used in error messages only.
pub fn parse_observation_line(text: &str, line: usize, system: &Emcs) -> Result<ObservationInstant> {
    let ell = system.obs_count();
    let mut obs = vec![BTreeSet::new(); ell];
    for (key, value) in object(line, text)? {
        let i = match system.index_of(&key) {
            Some(i) if i < ell => i,
            Some(_) => return Err(record_error(line, format!("`{key}` is not an observation context"))),
            None => return Err(record_error(line, format!("unknown context `{key}`"))),
        };
        obs[i] = atoms(line, &key, &value)?;
    }
    Ok(ObservationInstant::new(obs))
}

/// Reads an observation stream; blank lines are skipped.
pub fn parse_observations(text: &str, system: &Emcs) -> Result<ObservationSequence> {
    observation_records(text, system)
        .collect::<Result<Vec<_>>>()
        .map(ObservationSequence::new)
}

/// Lazily parsed observation records, for feeding a stream driver.
pub fn observation_records<'a>(
    text: &'a str,
    system: &'a Emcs,
) -> impl Iterator<Item = Result<ObservationInstant>> + 'a {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(move |(k, l)| parse_observation_line(l, k + 1, system))
}

pub fn observation_line(system: &Emcs, instant: &ObservationInstant) -> String {
    let mut m = Map::new();
    for (i, o) in instant.observations().iter().enumerate() {
        m.insert(system.context(i).name().to_string(), strings(o.iter()));
    }
    Value::Object(m).to_string()
}

fn strings<'a>(atoms: impl Iterator<Item = &'a GroundAtom>) -> Value {
    Value::Array(atoms.map(|a| Value::String(a.to_string())).collect())
}

fn by_context<'a, T: 'a>(system: &Emcs, items: impl Iterator<Item = &'a T>, f: impl Fn(&'a T) -> Value) -> Value {
    let mut m = Map::new();
    for (c, item) in system.contexts().iter().zip(items) {
        m.insert(c.name().to_string(), f(item));
    }
    Value::Object(m)
}

pub fn state_value(system: &Emcs, s: &BeliefState) -> Value {
    by_context(system, s.components().iter(), |b: &BeliefSet| strings(b.iter()))
}

pub fn state_record(system: &Emcs, instant: usize, s: &BeliefState) -> String {
    json!({ "instant": instant, "state": state_value(system, s) }).to_string()
}

pub fn trace_record(system: &Emcs, t: &InstantTrace) -> String {
    let ops = |sets: &Vec<BTreeSet<_>>| {
        by_context(
            system,
            sets.iter(),
            |s: &BTreeSet<crate::kernel::rules::OperationalFormula>| {
                Value::Array(s.iter().map(|o| Value::String(o.to_string())).collect())
            },
        )
    };
    json!({
        "instant": t.instant,
        "state": state_value(system, &t.state),
        "kbs": by_context(system, t.kbs.iter(), |k: &BTreeSet<GroundAtom>| strings(k.iter())),
        "app_now": ops(&t.app_now),
        "app_next": ops(&t.app_next),
    })
    .to_string()
}

/// Reads a belief state given as an object keyed by context name.
pub fn parse_state_value(value: &Value, line: usize, system: &Emcs) -> Result<BeliefState> {
    let m = value
        .as_object()
        .ok_or_else(|| record_error(line, "`state` must be an object keyed by context name"))?;
    let mut s = BeliefState::empty(system.len());
    for (key, v) in m {
        let i = system
            .index_of(key)
            .ok_or_else(|| record_error(line, format!("unknown context `{key}`")))?;
        s.components_mut()[i] = atoms(line, key, v)?.into_iter().collect();
    }
    Ok(s)
}

/// Reads state or trace records. Instants must run 1, 2, … in order.
pub fn parse_states(text: &str, system: &Emcs) -> Result<EvolvingBeliefState> {
    let mut states = Vec::new();
    for (k, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let line = k + 1;
        let m = object(line, l)?;
        let instant = m
            .get("instant")
            .and_then(Value::as_u64)
            .ok_or_else(|| record_error(line, "missing numeric `instant`"))?;
        if instant != states.len() as u64 + 1 {
            return Err(record_error(
                line,
                format!("expected instant {}, found {instant}", states.len() + 1),
            ));
        }
        let state = m.get("state").ok_or_else(|| record_error(line, "missing `state`"))?;
        states.push(parse_state_value(state, line, system)?);
    }
    Ok(EvolvingBeliefState::new(states))
}

/// A single belief state: either a bare state object or one record.
pub fn parse_single_state(text: &str, system: &Emcs) -> Result<BeliefState> {
    let line = 1 + text.len() - text.trim_start().len();
    let line = 1 + text[..line - 1].matches('\n').count();
    let m = object(line, text.trim())?;
    match m.get("state") {
        Some(state) => parse_state_value(state, line, system),
        None => parse_state_value(&Value::Object(m), line, system),
    }
}
