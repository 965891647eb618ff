//! Evolution over an observation sequence.
//!
//! At instant `j` the observation contexts hold `o^j` and every reasoning
//! context holds `k^j`, where `k^1` is its initial knowledge base and
//! `k^{j+1} = mng(app^next(S^j), k^j)`. [`StreamDriver`] performs one
//! instant per call; the batch functions are thin loops over it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bridge::{split_now_next, StateIndex};
use crate::equilibria::{is_static_equilibrium, SolverConfig};
use crate::error::{Error, Result};
use crate::kernel::atom::GroundAtom;
use crate::kernel::belief::BeliefState;
use crate::kernel::context::Emcs;
use crate::kernel::kb::Kb;
use crate::kernel::rules::OperationalFormula;

/// Largest number of undetermined atoms the grounded-equilibrium search
/// will enumerate.
pub const GROUNDED_SEARCH_BOUND_LOG2: usize = 20;

/// `⟨o_1, …, o_ℓ⟩`: one fact set per observation context.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservationInstant(Vec<BTreeSet<GroundAtom>>);

impl ObservationInstant {
    pub fn new(observations: Vec<BTreeSet<GroundAtom>>) -> Self {
        ObservationInstant(observations)
    }

    /// No observations for any of `ell` contexts.
    pub fn empty(ell: usize) -> Self {
        ObservationInstant(vec![BTreeSet::new(); ell])
    }

    pub fn observations(&self) -> &[BTreeSet<GroundAtom>] {
        &self.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservationSequence(Vec<ObservationInstant>);

impl ObservationSequence {
    pub fn new(instants: Vec<ObservationInstant>) -> Self {
        ObservationSequence(instants)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn instants(&self) -> &[ObservationInstant] {
        &self.0
    }

    pub fn prefix(&self, s: usize) -> ObservationSequence {
        ObservationSequence(self.0[..s.min(self.0.len())].to_vec())
    }
}

/// `⟨S^1, …, S^s⟩`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct EvolvingBeliefState(Vec<BeliefState>);

impl EvolvingBeliefState {
    pub fn new(states: Vec<BeliefState>) -> Self {
        EvolvingBeliefState(states)
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn states(&self) -> &[BeliefState] {
        &self.0
    }

    pub fn prefix(&self, s: usize) -> EvolvingBeliefState {
        EvolvingBeliefState(self.0[..s.min(self.0.len())].to_vec())
    }
}

/// What was computed at one instant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstantTrace {
    /// 1-based.
    pub instant: usize,
    /// Fact part of each context's knowledge base in `M^j`.
    pub kbs: Vec<BTreeSet<GroundAtom>>,
    pub state: BeliefState,
    pub app_now: Vec<BTreeSet<OperationalFormula>>,
    pub app_next: Vec<BTreeSet<OperationalFormula>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvolutionTrace {
    pub instants: Vec<InstantTrace>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Semantics {
    #[default]
    Wfs,
    Grounded,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Wfs => "wfs",
            Semantics::Grounded => "grounded",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "wfs" => Ok(Semantics::Wfs),
            "grounded" => Ok(Semantics::Grounded),
            other => Err(format!("unknown semantics `{other}`; expected wfs or grounded")),
        }
    }
}

/// `M^j`: observation contexts receive `instant`, reasoning contexts the
/// supplied knowledge bases (entries for observation contexts are ignored).
pub fn instantiate(system: &Emcs, instant: &ObservationInstant, kbs: &[Kb]) -> Result<Emcs> {
    let ell = system.obs_count();
    if instant.observations().len() != ell {
        return Err(Error::Shape {
            expected: ell,
            found: instant.observations().len(),
        });
    }
    if kbs.len() != system.len() {
        return Err(Error::Shape {
            expected: system.len(),
            found: kbs.len(),
        });
    }
    let mut next = Vec::with_capacity(system.len());
    for (i, o) in instant.observations().iter().enumerate() {
        for atom in o {
            system.check_atom(i, atom)?;
        }
        next.push(Kb::from_facts(o.iter().cloned()));
    }
    next.extend(kbs[ell..].iter().cloned());
    Ok(system.with_kbs(next))
}

/// `k^{j+1}_i = mng_i(app_i^next(S), k^j_i)` for reasoning contexts;
/// observation-context entries are returned unchanged.
pub fn step_kbs(system: &Emcs, current: &[Kb], s: &BeliefState) -> Result<Vec<Kb>> {
    system.check_shape(s)?;
    let index = StateIndex::new(s);
    let ell = system.obs_count();
    current
        .iter()
        .enumerate()
        .map(|(i, kb)| {
            if i < ell {
                return Ok(kb.clone());
            }
            let c = system.context(i);
            let heads = crate::bridge::applicable(c.compiled_rules(), &index, &index, system.pool());
            let (_, next) = split_now_next(&heads);
            c.mng(i + 1, &next, kb)
        })
        .collect()
}

/// Whether `se` is an evolving equilibrium of `system` given `obs`.
pub fn check_evolving_equilibrium(system: &Emcs, obs: &ObservationSequence, se: &EvolvingBeliefState) -> Result<bool> {
    Ok(first_failing_instant(system, obs, se)?.is_none())
}

/// The first 1-based instant at which `S^j` is not a static equilibrium of
/// `M^j`, if any.
pub fn first_failing_instant(
    system: &Emcs,
    obs: &ObservationSequence,
    se: &EvolvingBeliefState,
) -> Result<Option<usize>> {
    if se.size() > obs.len() {
        return Err(Error::SizeExceedsObservations {
            size: se.size(),
            available: obs.len(),
        });
    }
    let mut kbs = system.kbs();
    for (j, (instant, s)) in obs.instants().iter().zip(se.states()).enumerate() {
        let m = instantiate(system, instant, &kbs)?;
        if s.len() != system.len() || !is_static_equilibrium(&m, s)? {
            return Ok(Some(j + 1));
        }
        kbs = step_kbs(&m, &kbs, s)?;
    }
    Ok(None)
}

/// The evolving well-founded semantics of size `s`.
pub fn evolving_wfs(
    system: &Emcs,
    obs: &ObservationSequence,
    s: usize,
) -> Result<(EvolvingBeliefState, EvolutionTrace)> {
    SolverConfig::default().evolve(system, obs, s, Semantics::Wfs)
}

/// Per-instant grounded equilibria, threaded like [`evolving_wfs`].
pub fn evolving_grounded_equilibrium(
    system: &Emcs,
    obs: &ObservationSequence,
    s: usize,
) -> Result<EvolvingBeliefState> {
    Ok(SolverConfig::default().evolve(system, obs, s, Semantics::Grounded)?.0)
}

impl SolverConfig {
    pub fn evolve(
        &self,
        system: &Emcs,
        obs: &ObservationSequence,
        s: usize,
        semantics: Semantics,
    ) -> Result<(EvolvingBeliefState, EvolutionTrace)> {
        if s > obs.len() {
            return Err(Error::SizeExceedsObservations {
                size: s,
                available: obs.len(),
            });
        }
        let mut driver = StreamDriver::new(system.clone(), semantics).with_config(*self);
        let mut states = Vec::with_capacity(s);
        let mut trace = EvolutionTrace::default();
        for instant in &obs.instants()[..s] {
            let t = driver.push(instant)?;
            states.push(t.state.clone());
            trace.instants.push(t);
        }
        Ok((EvolvingBeliefState(states), trace))
    }

    /// The belief state chosen at one instant under `semantics`.
    pub fn solve_instant(&self, m: &Emcs, semantics: Semantics, instant: usize) -> Result<BeliefState> {
        let w = self.wfs(m)?;
        if semantics == Semantics::Wfs || self.is_grounded_equilibrium(m, &w)? {
            return Ok(w);
        }
        // Every grounded equilibrium G satisfies W ⊆ G ⊆ γ(W).
        let upper = self.gamma(m, &w)?;
        let open: Vec<(usize, GroundAtom)> = upper
            .components()
            .iter()
            .enumerate()
            .flat_map(|(i, u)| {
                let wi = &w[i];
                u.iter().filter(move |a| !wi.contains(a)).map(move |a| (i, a.clone()))
            })
            .collect();
        if open.len() > GROUNDED_SEARCH_BOUND_LOG2 {
            return Err(Error::UniverseTooLarge {
                atoms: open.len(),
                bound_log2: GROUNDED_SEARCH_BOUND_LOG2,
            });
        }
        let found: Vec<BeliefState> = (0u64..1 << open.len())
            .into_par_iter()
            .map(|mask| {
                let mut g = w.clone();
                for (k, (i, a)) in open.iter().enumerate() {
                    if mask & (1 << k) != 0 {
                        g.components_mut()[*i].insert(a.clone());
                    }
                }
                Ok(self.is_grounded_equilibrium(m, &g)?.then_some(g))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        match found.len() {
            1 => Ok(found.into_iter().next().expect("one element")),
            0 => Err(Error::NoGroundedEquilibrium {
                instant,
                orbit: vec![w, upper],
            }),
            count => Err(Error::AmbiguousGroundedEquilibrium { instant, count }),
        }
    }
}

/// Processes observation instants one at a time, holding only the current
/// knowledge bases.
///
/// An instant is applied only if every step for it succeeds; after the
/// first error the driver refuses further input.
#[derive(Clone, Debug)]
pub struct StreamDriver {
    system: Emcs,
    semantics: Semantics,
    config: SolverConfig,
    kbs: Vec<Kb>,
    instant: usize,
    halted: bool,
}

impl StreamDriver {
    pub fn new(system: Emcs, semantics: Semantics) -> Self {
        let kbs = system.kbs();
        StreamDriver {
            system,
            semantics,
            config: SolverConfig::default(),
            kbs,
            instant: 0,
            halted: false,
        }
    }

    pub fn with_config(mut self, config: SolverConfig) -> Self {
        self.config = config;
        self
    }

    /// Number of instants processed so far.
    pub fn instants_processed(&self) -> usize {
        self.instant
    }

    pub fn is_halted(&self) -> bool {
        self.halted
    }

    /// Computes `S^j` for the next instant and advances the knowledge bases.
    pub fn push(&mut self, instant: &ObservationInstant) -> Result<InstantTrace> {
        if self.halted {
            return Err(Error::Instant {
                instant: self.instant + 1,
                message: "the stream stopped at an earlier error".into(),
            });
        }
        let j = self.instant + 1;
        match self.step(instant, j) {
            Ok((trace, kbs)) => {
                self.kbs = kbs;
                self.instant = j;
                Ok(trace)
            }
            Err(e) => {
                self.halted = true;
                Err(e)
            }
        }
    }

    fn step(&self, instant: &ObservationInstant, j: usize) -> Result<(InstantTrace, Vec<Kb>)> {
        let m = instantiate(&self.system, instant, &self.kbs).map_err(|e| match e {
            Error::Vocabulary { .. } | Error::Shape { .. } => Error::Instant {
                instant: j,
                message: e.to_string(),
            },
            other => other,
        })?;
        let state = self.config.solve_instant(&m, self.semantics, j)?;
        let index = StateIndex::new(&state);
        let (app_now, app_next): (Vec<_>, Vec<_>) = m
            .contexts()
            .iter()
            .map(|c| split_now_next(&crate::bridge::applicable(c.compiled_rules(), &index, &index, m.pool())))
            .unzip();
        let kbs = step_kbs(&m, &self.kbs, &state)?;
        let trace = InstantTrace {
            instant: j,
            kbs: m.contexts().iter().map(|c| c.kb().facts().clone()).collect(),
            state,
            app_now,
            app_next,
        };
        Ok((trace, kbs))
    }

    /// Feeds `source` through the driver, yielding `(j, S^j)` until the
    /// source ends or an instant fails. A failing instant yields its error
    /// and ends the stream.
    pub fn run<'a, I>(&'a mut self, source: I) -> impl Iterator<Item = Result<(usize, BeliefState)>> + 'a
    where
        I: IntoIterator<Item = Result<ObservationInstant>>,
        I::IntoIter: 'a,
    {
        let mut source = source.into_iter();
        std::iter::from_fn(move || {
            if self.halted {
                return None;
            }
            let item = match source.next()? {
                Ok(instant) => self.push(&instant).map(|t| (t.instant, t.state)),
                Err(e) => {
                    self.halted = true;
                    Err(e)
                }
            };
            Some(item)
        })
    }
}
