//! Brute-force semantics for small systems.
//!
//! Everything here works on eagerly grounded bridge rules and explicit
//! candidate enumeration, so it shares no evaluation code with the solvers
//! beyond the per-logic ACC functions. The checks in [`verify_props`] then
//! compare the two.

pub mod generate;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bridge::{ground, satisfies};
use crate::equilibria::{check_acyclic, SolverConfig};
use crate::error::{Error, Result};
use crate::kernel::atom::GroundAtom;
use crate::kernel::belief::{BeliefSet, BeliefState};
use crate::kernel::context::Emcs;
use crate::kernel::kb::Kb;
use crate::kernel::rules::BridgeRule;

pub const DEFAULT_BOUND_LOG2: usize = 20;

/// Candidate belief sets: every subset of `atoms[i]` for context `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeliefUniverse {
    atoms: Vec<Vec<GroundAtom>>,
}

impl BeliefUniverse {
    /// Per context, ACC of the knowledge base extended with every ground
    /// head its bridge rules could ever add, reduced against the empty set.
    /// Any equilibrium lies below this.
    pub fn reachable(system: &Emcs, bound_log2: usize) -> Result<Self> {
        let pool = system.pool();
        let mut atoms = Vec::with_capacity(system.len());
        for (i, c) in system.contexts().iter().enumerate() {
            let mut kb = c.kb().clone();
            for r in ground(c.bridge_rules(), pool) {
                if !r.head.next {
                    if let Some(a) = r.head.atom.as_ground() {
                        kb.insert(a);
                    }
                }
            }
            let kb = c.logic().reduce(&kb, &BeliefSet::new()).ok_or(Error::NotReducible {
                context: i + 1,
                kind: c.kind().as_str(),
            })?;
            let reachable = match c.logic().acc(&kb, pool) {
                Ok(s) => s.into_atoms().into_iter().collect(),
                // Adding every possible head can make an ontology
                // inconsistent; fall back to the whole vocabulary.
                Err(Error::Inconsistent { .. }) => all_atoms(system.vocabulary(i), pool),
                Err(e) => return Err(e),
            };
            atoms.push(reachable);
        }
        let universe = BeliefUniverse { atoms };
        if universe.bits() > bound_log2 {
            return Err(Error::UniverseTooLarge {
                atoms: universe.bits(),
                bound_log2,
            });
        }
        Ok(universe)
    }

    /// Number of atoms over all contexts; the universe has 2^bits members.
    pub fn bits(&self) -> usize {
        self.atoms.iter().map(Vec::len).sum()
    }

    pub fn atoms(&self) -> &[Vec<GroundAtom>] {
        &self.atoms
    }

    /// The candidate encoded by `mask`, bit `k` standing for the `k`-th atom
    /// in context order.
    pub fn state(&self, mask: u64) -> BeliefState {
        let mut offset = 0;
        self.atoms
            .iter()
            .map(|atoms| {
                let set = atoms
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> (offset + k) & 1 == 1)
                    .map(|(_, a)| a.clone())
                    .collect();
                offset += atoms.len();
                set
            })
            .collect()
    }

    pub fn size(&self) -> u64 {
        1u64 << self.bits()
    }
}

fn all_atoms(vocab: &crate::kernel::context::Vocabulary, pool: &crate::bridge::ConstantPool) -> Vec<GroundAtom> {
    let mut out = Vec::new();
    for (pred, &arity) in vocab {
        let mut args = vec![0usize; arity];
        'odometer: loop {
            if arity > 0 && pool.is_empty() {
                break;
            }
            out.push(GroundAtom::new(
                pred.clone(),
                args.iter().map(|&k| pool.symbols()[k].clone()).collect(),
            ));
            for digit in args.iter_mut() {
                *digit += 1;
                if *digit < pool.len() {
                    continue 'odometer;
                }
                *digit = 0;
            }
            break;
        }
    }
    out
}

/// A system with its bridge rules ground once, for repeated checks.
struct Ground<'a> {
    system: &'a Emcs,
    rules: Vec<Vec<BridgeRule>>,
}

impl<'a> Ground<'a> {
    fn new(system: &'a Emcs) -> Self {
        let rules = system
            .contexts()
            .iter()
            .map(|c| ground(c.bridge_rules(), system.pool()))
            .collect();
        Ground { system, rules }
    }

    /// The rules with negation evaluated against `s` and then dropped.
    fn reduct(&self, s: &BeliefState) -> Vec<Vec<BridgeRule>> {
        self.rules
            .iter()
            .map(|rules| {
                rules
                    .iter()
                    .filter(|r| r.body.iter().filter(|l| l.negated).all(|l| satisfies(s, l)))
                    .map(|r| BridgeRule::new(r.head.clone(), r.body.iter().filter(|l| !l.negated).cloned().collect()))
                    .collect()
            })
            .collect()
    }

    fn is_equilibrium(&self, rules: &[Vec<BridgeRule>], kbs: &[Kb], s: &BeliefState) -> Result<bool> {
        for (i, c) in self.system.contexts().iter().enumerate() {
            let mut kb = kbs[i].clone();
            for r in &rules[i] {
                if !r.head.next && r.body.iter().all(|l| satisfies(s, l)) {
                    kb.insert(r.head.atom.as_ground().expect("ground head"));
                }
            }
            if c.logic().acc(&kb, self.system.pool())? != s[i] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn all_equilibria(
    universe: &BeliefUniverse,
    g: &Ground,
    rules: &[Vec<BridgeRule>],
    kbs: &[Kb],
) -> Result<Vec<BeliefState>> {
    let found: Result<Vec<Option<BeliefState>>> = (0..universe.size())
        .into_par_iter()
        .map(|mask| {
            let s = universe.state(mask);
            Ok(g.is_equilibrium(rules, kbs, &s)?.then_some(s))
        })
        .collect();
    let mut out: Vec<_> = found?.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}

fn minimal(states: &[BeliefState]) -> Vec<BeliefState> {
    states
        .iter()
        .filter(|s| !states.iter().any(|t| BeliefState::lt(t, s)))
        .cloned()
        .collect()
}

#[derive(Clone, Debug)]
pub struct Oracle {
    pub bound_log2: usize,
    /// Number of random `S ⊆ S′` pairs drawn for the antimonotonicity check.
    pub samples: usize,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            bound_log2: DEFAULT_BOUND_LOG2,
            samples: 64,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

impl Oracle {
    pub fn universe(&self, system: &Emcs) -> Result<BeliefUniverse> {
        BeliefUniverse::reachable(system, self.bound_log2)
    }

    /// Every static equilibrium, sorted.
    pub fn enumerate_equilibria(&self, system: &Emcs) -> Result<Vec<BeliefState>> {
        let universe = self.universe(system)?;
        let g = Ground::new(system);
        all_equilibria(&universe, &g, &g.rules, &system.kbs())
    }

    pub fn minimal_equilibria(&self, system: &Emcs) -> Result<Vec<BeliefState>> {
        Ok(minimal(&self.enumerate_equilibria(system)?))
    }

    /// Equilibria `S` that are the least equilibrium of their own reduct.
    pub fn grounded_equilibria(&self, system: &Emcs) -> Result<Vec<BeliefState>> {
        let universe = self.universe(system)?;
        let g = Ground::new(system);
        let equilibria = all_equilibria(&universe, &g, &g.rules, &system.kbs())?;
        self.grounded_among(system, &universe, &g, &equilibria)
    }

    fn grounded_among(
        &self,
        system: &Emcs,
        universe: &BeliefUniverse,
        g: &Ground,
        equilibria: &[BeliefState],
    ) -> Result<Vec<BeliefState>> {
        let mut out = Vec::new();
        for s in equilibria {
            let kbs = system
                .contexts()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    c.logic().reduce(c.kb(), &s[i]).ok_or(Error::NotReducible {
                        context: i + 1,
                        kind: c.kind().as_str(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let rules = g.reduct(s);
            let reduct_equilibria = all_equilibria(universe, g, &rules, &kbs)?;
            if reduct_equilibria.contains(s) && reduct_equilibria.iter().all(|t| s.le(t)) {
                out.push(s.clone());
            }
        }
        Ok(out)
    }

    /// Checks the solvers against the enumeration: grounded equilibria are
    /// minimal, `γ` is antimonotone, and the well-founded state lies below
    /// every grounded equilibrium.
    pub fn verify_props(&self, system: &Emcs) -> Result<Report> {
        let solver = self.solver;
        let universe = self.universe(system)?;
        let g = Ground::new(system);
        let equilibria = all_equilibria(&universe, &g, &g.rules, &system.kbs())?;
        let grounded = self.grounded_among(system, &universe, &g, &equilibria)?;
        let wfs = solver.wfs(system)?;

        let mut minimality = Verdict::default();
        let mut engine_grounded = Vec::new();
        for s in &equilibria {
            if solver.is_grounded_equilibrium(system, s)? {
                minimality.checked += 1;
                engine_grounded.push(s.clone());
                if let Some(t) = equilibria.iter().find(|t| BeliefState::lt(t, s)) {
                    minimality.fail(format!("{s} is grounded but {t} is a smaller equilibrium"));
                }
            }
        }

        let mut antimonotone = Verdict::default();
        let mut square_monotone = Verdict::default();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let full = universe.size();
        for _ in 0..self.samples {
            let upper = rng.gen_range(0..full);
            let lower = upper & rng.gen_range(0..full);
            let (s, s2) = (universe.state(lower), universe.state(upper));
            let (gs, gs2) = (solver.gamma(system, &s)?, solver.gamma(system, &s2)?);
            antimonotone.checked += 1;
            if !gs2.le(&gs) {
                antimonotone.fail(format!("{s} ⊆ {s2} but gamma gives {gs} and {gs2}"));
            }
            let (ggs, ggs2) = (solver.gamma(system, &gs)?, solver.gamma(system, &gs2)?);
            square_monotone.checked += 1;
            if !ggs.le(&ggs2) {
                square_monotone.fail(format!("{s} ⊆ {s2} but gamma^2 gives {ggs} and {ggs2}"));
            }
        }

        let mut below = Verdict::default();
        for s in &grounded {
            below.checked += 1;
            if !wfs.le(s) {
                below.fail(format!("wfs {wfs} is not below grounded equilibrium {s}"));
            }
        }

        let mut agreement = Verdict {
            checked: 1,
            ..Verdict::default()
        };
        if engine_grounded != grounded {
            agreement.fail(format!(
                "solver grounded equilibria {engine_grounded:?}, enumeration {grounded:?}"
            ));
        }
        let acyclic = check_acyclic(system);
        if acyclic {
            agreement.checked += 1;
            if grounded != [wfs.clone()] {
                agreement.fail(format!(
                    "acyclic, but grounded equilibria {grounded:?} differ from wfs {wfs}"
                ));
            }
        }

        Ok(Report {
            universe_atoms: universe.bits(),
            equilibria,
            grounded,
            wfs,
            acyclic,
            minimality,
            antimonotone,
            square_monotone,
            below_grounded: below,
            agreement,
        })
    }
}

/// Outcome of one property check.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

impl Default for Verdict {
    fn default() -> Self {
        Verdict {
            pass: true,
            checked: 0,
            witness: None,
        }
    }
}

impl Verdict {
    fn fail(&mut self, witness: String) {
        if self.pass {
            self.pass = false;
            self.witness = Some(witness);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub universe_atoms: usize,
    pub equilibria: Vec<BeliefState>,
    pub grounded: Vec<BeliefState>,
    pub wfs: BeliefState,
    pub acyclic: bool,
    /// Every grounded equilibrium is a minimal equilibrium.
    pub minimality: Verdict,
    /// `S ⊆ S′` implies `γ(S′) ⊆ γ(S)` on the sampled pairs.
    pub antimonotone: Verdict,
    /// `γ²` is monotone on the same pairs.
    pub square_monotone: Verdict,
    /// The well-founded state is below every grounded equilibrium.
    pub below_grounded: Verdict,
    /// Solver and enumeration find the same grounded equilibria, and for
    /// acyclic systems exactly the well-founded one.
    pub agreement: Verdict,
}

impl Report {
    pub fn pass(&self) -> bool {
        [
            &self.minimality,
            &self.antimonotone,
            &self.square_monotone,
            &self.below_grounded,
            &self.agreement,
        ]
        .iter()
        .all(|v| v.pass)
    }
}

pub fn enumerate_equilibria(system: &Emcs) -> Result<Vec<BeliefState>> {
    Oracle::default().enumerate_equilibria(system)
}

pub fn minimal_equilibria(system: &Emcs) -> Result<Vec<BeliefState>> {
    Oracle::default().minimal_equilibria(system)
}

pub fn grounded_equilibria(system: &Emcs) -> Result<Vec<BeliefState>> {
    Oracle::default().grounded_equilibria(system)
}

pub fn verify_props(system: &Emcs) -> Result<Report> {
    Oracle::default().verify_props(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    fn state(sets: &[&[&str]]) -> BeliefState {
        sets.iter()
            .map(|s| s.iter().map(|a| a.parse::<GroundAtom>().unwrap()).collect())
            .collect()
    }

    const MSJ: &str = "context C1 : identity { bridge { add(p) <- (1:p). } }";
    const MOL: &str = "context C1 : identity { bridge { add(p) <- not (1:p). } }";
    const M2: &str = "context C1 : identity { bridge { add(p) <- (2:q). } }
                      context C2 : identity { bridge { add(q) <- not (1:r). } }";

    #[test]
    fn self_justification() {
        let sys = parse_system(MSJ).unwrap();
        assert_eq!(
            enumerate_equilibria(&sys).unwrap(),
            vec![state(&[&[]]), state(&[&["p"]])]
        );
        assert_eq!(minimal_equilibria(&sys).unwrap(), vec![state(&[&[]])]);
        assert_eq!(grounded_equilibria(&sys).unwrap(), vec![state(&[&[]])]);
        assert!(verify_props(&sys).unwrap().pass());
    }

    #[test]
    fn odd_loop() {
        let sys = parse_system(MOL).unwrap();
        assert!(enumerate_equilibria(&sys).unwrap().is_empty());
        let report = verify_props(&sys).unwrap();
        assert!(report.pass());
        assert_eq!(report.below_grounded.checked, 0);
        assert_eq!(report.wfs, state(&[&[]]));
    }

    #[test]
    fn m2_has_one_equilibrium() {
        let sys = parse_system(M2).unwrap();
        let one = vec![state(&[&["p"], &["q"]])];
        assert_eq!(BeliefUniverse::reachable(&sys, 20).unwrap().bits(), 2);
        assert_eq!(enumerate_equilibria(&sys).unwrap(), one);
        assert_eq!(grounded_equilibria(&sys).unwrap(), one);
        let report = verify_props(&sys).unwrap();
        assert!(report.pass() && report.acyclic);
    }

    #[test]
    fn universe_bound_is_enforced() {
        let sys = parse_system(M2).unwrap();
        let oracle = Oracle {
            bound_log2: 1,
            ..Oracle::default()
        };
        assert!(matches!(
            oracle.enumerate_equilibria(&sys),
            Err(Error::UniverseTooLarge {
                atoms: 2,
                bound_log2: 1
            })
        ));
    }
}
