//! Static semantics at a single instant.
//!
//! The grounded equilibrium of a definite system is the limit of
//! `kb^{α+1} = mng(app^now(E^α), kb^α)` with `E^α = ACC(kb^α)`. For normal,
//! reducible systems `γ(S)` is the grounded equilibrium of the S-reduct and
//! the well-founded semantics is the least fixpoint of `γ²`.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::Serialize;

use crate::bridge::{app, applicable, ground, split_now_next, StateIndex};
use crate::error::{Error, Result};
use crate::kernel::atom::{GroundAtom, Symbol};
use crate::kernel::belief::{BeliefSet, BeliefState};
use crate::kernel::context::Emcs;
use crate::kernel::kb::{Kb, Theory};
use crate::kernel::rules::{BridgeLiteral, BridgeRule, OperationalFormula};
use crate::logics::el::Axiom;
use crate::logics::gl_reduct;

/// Solver limits. `iteration_cap` overrides the default fixpoint bound of
/// ground heads plus belief vocabulary plus one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverConfig {
    pub iteration_cap: Option<usize>,
}

impl SolverConfig {
    pub fn with_iteration_cap(cap: usize) -> Self {
        SolverConfig {
            iteration_cap: Some(cap),
        }
    }

    fn cap(&self, system: &Emcs) -> usize {
        self.iteration_cap.unwrap_or_else(|| default_iteration_cap(system))
    }
}

/// `|ground heads| + |belief vocabulary| + 1` over the system's pool,
/// saturating on overflow.
pub fn default_iteration_cap(system: &Emcs) -> usize {
    let p = system.pool().len().max(1);
    let instances = |arity: usize| p.checked_pow(arity as u32).unwrap_or(usize::MAX);
    let mut total: usize = 1;
    for (i, c) in system.contexts().iter().enumerate() {
        for r in c.bridge_rules() {
            total = total.saturating_add(instances(r.head.atom.arity()));
        }
        for a in system.vocabulary(i).values() {
            total = total.saturating_add(instances(*a));
        }
    }
    total
}

/// One step of the monotone iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixpointStep {
    pub iteration: usize,
    /// Fact part of each `kb_i^α`.
    pub kbs: Vec<BTreeSet<GroundAtom>>,
    pub beliefs: BeliefState,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FixpointTrace {
    pub steps: Vec<FixpointStep>,
}

impl FixpointTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }
}

/// `S ⊨` equilibrium: `ACC_i(mng_i(app_i^now(S), kb_i)) = {S_i}` for all `i`.
pub fn is_static_equilibrium(system: &Emcs, s: &BeliefState) -> Result<bool> {
    system.check_shape(s)?;
    let index = StateIndex::new(s);
    for (i, c) in system.contexts().iter().enumerate() {
        let heads = applicable(c.compiled_rules(), &index, &index, system.pool());
        let (now, _) = split_now_next(&heads);
        let kb = c.mng(i + 1, &now, c.kb())?;
        if c.logic().acc(&kb, system.pool())? != s[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The S-reduct `M^S`: negated bridge literals are resolved against the
/// reducing state and every knowledge base is reduced by its logic.
///
/// Rules stay schematic. A ground instance is deleted when one of its
/// negated literals holds in `S`; otherwise its negated literals are
/// dropped. [`ReductSystem::to_emcs`] materialises that rule set.
#[derive(Clone, Debug)]
pub struct ReductSystem {
    system: Emcs,
    against: BeliefState,
}

impl ReductSystem {
    /// The system with reduced knowledge bases and the original rules.
    pub fn system(&self) -> &Emcs {
        &self.system
    }

    pub fn against(&self) -> &BeliefState {
        &self.against
    }

    /// An explicitly definite system: rules with negation are grounded and
    /// reduced, knowledge bases are replaced by their explicit reducts.
    pub fn to_emcs(&self) -> Emcs {
        let pool = self.system.pool();
        let against = &self.against;
        let contexts = self
            .system
            .contexts()
            .iter()
            .map(|c| {
                let mut rules: Vec<BridgeRule> = Vec::new();
                for r in c.bridge_rules() {
                    if !r.has_negation() {
                        rules.push(r.clone());
                        continue;
                    }
                    for g in ground(std::slice::from_ref(r), pool) {
                        let blocked = g.body.iter().any(|l| {
                            l.negated
                                && l.atom.as_ground().is_some_and(|a| {
                                    against.components().get(l.context).is_some_and(|s| s.contains(&a))
                                })
                        });
                        if !blocked {
                            let body: Vec<BridgeLiteral> = g.body.into_iter().filter(|l| !l.negated).collect();
                            let reduced = BridgeRule::new(g.head, body);
                            if !rules.contains(&reduced) {
                                rules.push(reduced);
                            }
                        }
                    }
                }
                let kb = match c.kb().theory() {
                    Theory::Reduced(red) => gl_reduct(c.kb(), red.against(), pool),
                    _ => c.kb().clone(),
                };
                c.replace_kb(kb).with_bridge_rules(rules)
            })
            .collect();
        Emcs::with_constants(contexts, self.system.declared_constants().clone())
    }
}

/// `M^S`. Fails for contexts whose logic has no reduction function.
pub fn s_reduct(system: &Emcs, s: &BeliefState) -> Result<ReductSystem> {
    system.check_shape(s)?;
    let mut kbs = Vec::with_capacity(system.len());
    for (i, c) in system.contexts().iter().enumerate() {
        match c.logic().reduce(c.kb(), &s[i]) {
            Some(kb) => kbs.push(kb),
            None => {
                return Err(Error::NotReducible {
                    context: i + 1,
                    kind: c.kind().as_str(),
                })
            }
        }
    }
    Ok(ReductSystem {
        system: system.with_kbs(kbs),
        against: s.clone(),
    })
}

/// Grounded equilibrium of a definite system, with the iteration trace.
pub fn grounded_equilibrium_definite(reduct: &ReductSystem) -> Result<(BeliefState, FixpointTrace)> {
    SolverConfig::default().grounded_equilibrium_definite(reduct)
}

/// Grounded equilibrium of a system without negated bridge literals whose
/// knowledge bases are already monotone.
pub fn grounded_equilibrium(system: &Emcs) -> Result<(BeliefState, FixpointTrace)> {
    SolverConfig::default().grounded_equilibrium(system)
}

/// `γ(S) = GE(M^S)`.
pub fn gamma(system: &Emcs, s: &BeliefState) -> Result<BeliefState> {
    SolverConfig::default().gamma(system, s)
}

/// Least fixpoint of `γ²`, iterated from the least belief state.
pub fn wfs(system: &Emcs) -> Result<BeliefState> {
    SolverConfig::default().wfs(system)
}

/// `γ(S) = S` and `S` is a static equilibrium.
pub fn is_grounded_equilibrium(system: &Emcs, s: &BeliefState) -> Result<bool> {
    SolverConfig::default().is_grounded_equilibrium(system, s)
}

impl SolverConfig {
    pub fn grounded_equilibrium_definite(&self, reduct: &ReductSystem) -> Result<(BeliefState, FixpointTrace)> {
        check_monotone_ops(&reduct.system)?;
        let against = StateIndex::new(&reduct.against);
        iterate(&reduct.system, &against, self.cap(&reduct.system), true)
    }

    pub fn grounded_equilibrium(&self, system: &Emcs) -> Result<(BeliefState, FixpointTrace)> {
        for (i, c) in system.contexts().iter().enumerate() {
            if c.bridge_rules().iter().any(BridgeRule::has_negation) {
                return Err(Error::NotDefinite(format!(
                    "context {} has a negated bridge literal",
                    i + 1
                )));
            }
            let definite = match c.kb().theory() {
                Theory::Program(p) => p.is_definite(),
                _ => true,
            };
            if !(c.logic().is_monotone() || definite) {
                return Err(Error::NotDefinite(format!(
                    "context {} has a non-monotone knowledge base",
                    i + 1
                )));
            }
        }
        check_monotone_ops(system)?;
        let empty = StateIndex::new(&BeliefState::empty(system.len()));
        iterate(system, &empty, self.cap(system), true)
    }

    pub fn gamma(&self, system: &Emcs, s: &BeliefState) -> Result<BeliefState> {
        let reduct = s_reduct(system, s)?;
        check_monotone_ops(system)?;
        let against = StateIndex::new(s);
        Ok(iterate(&reduct.system, &against, self.cap(system), false)?.0)
    }

    pub fn wfs(&self, system: &Emcs) -> Result<BeliefState> {
        Ok(self.wfs_iterates(system)?.pop().expect("at least the start state"))
    }

    /// `S*, γ²(S*), γ⁴(S*), …` up to and including the fixpoint.
    pub fn wfs_iterates(&self, system: &Emcs) -> Result<Vec<BeliefState>> {
        let mut t = least_state(system)?;
        check_monotone_ops(system)?;
        let cap = self.cap(system);
        let mut seq = vec![t.clone()];
        for _ in 0..cap {
            let next = self.gamma(system, &self.gamma(system, &t)?)?;
            if next == t {
                return Ok(seq);
            }
            seq.push(next.clone());
            t = next;
        }
        Err(Error::IterationCap {
            what: "well-founded iteration",
            cap,
        })
    }

    pub fn is_grounded_equilibrium(&self, system: &Emcs, s: &BeliefState) -> Result<bool> {
        Ok(self.gamma(system, s)? == *s && is_static_equilibrium(system, s)?)
    }
}

/// `S* = ⟨least elements⟩`; fails for logics without one.
pub fn least_state(system: &Emcs) -> Result<BeliefState> {
    system
        .contexts()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.logic().least_element().ok_or(Error::NotNormal {
                context: i + 1,
                kind: c.kind().as_str(),
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(BeliefState::new)
}

fn check_monotone_ops(system: &Emcs) -> Result<()> {
    for (i, c) in system.contexts().iter().enumerate() {
        if let Some(op) = c.op_base().iter().find(|op| op.as_str() != crate::kernel::context::ADD) {
            return Err(Error::NonMonotoneOperation {
                context: i + 1,
                op: op.clone(),
            });
        }
    }
    Ok(())
}

/// The monotone iteration. Negated bridge literals are checked against
/// `negative`; on a definite system they do not occur. ACC is re-evaluated
/// only for contexts whose knowledge base grew.
fn iterate(system: &Emcs, negative: &StateIndex, cap: usize, record: bool) -> Result<(BeliefState, FixpointTrace)> {
    let n = system.len();
    let pool = system.pool();
    let mut kbs: Vec<Kb> = system.kbs();
    let mut changed = vec![true; n];
    let mut beliefs: Vec<BeliefSet> = vec![BeliefSet::new(); n];
    let mut trace = FixpointTrace::default();

    for alpha in 0..cap {
        let fresh: Vec<(usize, BeliefSet)> = (0..n)
            .into_par_iter()
            .filter(|i| changed[*i])
            .map(|i| system.context(i).logic().acc(&kbs[i], pool).map(|b| (i, b)))
            .collect::<Result<_>>()?;
        for (i, b) in fresh {
            beliefs[i] = b;
        }
        let e = BeliefState::new(beliefs.clone());
        if record {
            trace.steps.push(FixpointStep {
                iteration: alpha,
                kbs: kbs.iter().map(|k| k.facts().clone()).collect(),
                beliefs: e.clone(),
            });
        }
        let positive = StateIndex::new(&e);
        let mut any = false;
        for (i, c) in system.contexts().iter().enumerate() {
            let heads = applicable(c.compiled_rules(), &positive, negative, pool);
            let (now, _) = split_now_next(&heads);
            let next = c.mng(i + 1, &now, &kbs[i])?;
            if !kbs[i].is_subset(&next) {
                return Err(Error::Shrinking { context: i + 1 });
            }
            changed[i] = next.facts().len() != kbs[i].facts().len();
            any |= changed[i];
            kbs[i] = next;
        }
        if !any {
            return Ok((e, trace));
        }
    }
    Err(Error::IterationCap {
        what: "grounded equilibrium iteration",
        cap,
    })
}

/// Heads of context `i`'s rules applicable in `s`, split into now and next.
pub fn app_now_next(
    system: &Emcs,
    i: usize,
    s: &BeliefState,
) -> (BTreeSet<OperationalFormula>, BTreeSet<OperationalFormula>) {
    split_now_next(&app(system, i, s))
}

/// Predicate-level acyclicity: no dependency cycle passes through a bridge
/// rule.
///
/// Nodes are `(context, predicate)`. Each bridge rule with a plain head
/// contributes an edge from every body predicate to the head predicate;
/// next-wrapped heads only affect the following instant and add no edge.
/// Inside a context every body predicate of a program rule points to its
/// head, and every name on the left of an axiom points to every name on its
/// right (both ways for `equiv`).
pub fn check_acyclic(system: &Emcs) -> bool {
    let mut graph: DiGraph<(), bool> = DiGraph::new();
    let mut nodes: BTreeMap<(usize, Symbol), NodeIndex> = BTreeMap::new();
    let mut node = |g: &mut DiGraph<(), bool>, i: usize, p: &Symbol| {
        *nodes.entry((i, p.clone())).or_insert_with(|| g.add_node(()))
    };
    let mut bridge_edges = Vec::new();

    for (i, c) in system.contexts().iter().enumerate() {
        let rules = match c.kb().theory() {
            Theory::Program(p) => Some(p.rules().to_vec()),
            Theory::Reduced(r) => Some(r.program().rules().to_vec()),
            _ => None,
        };
        for r in rules.iter().flatten() {
            let h = node(&mut graph, i, &r.head.predicate);
            for b in r.positive.iter().chain(&r.negative) {
                let u = node(&mut graph, i, &b.predicate);
                graph.add_edge(u, h, false);
            }
        }
        if let Theory::Ontology(o) = c.kb().theory() {
            for ax in o.axioms() {
                let (lhs, rhs, both) = match ax {
                    Axiom::Sub(a, b) => (a, b, false),
                    Axiom::Equiv(a, b) => (a, b, true),
                };
                for p in lhs.predicates() {
                    for q in rhs.predicates() {
                        let (u, v) = (node(&mut graph, i, &p), node(&mut graph, i, &q));
                        graph.add_edge(u, v, false);
                        if both {
                            graph.add_edge(v, u, false);
                        }
                    }
                }
            }
        }
        for r in c.bridge_rules() {
            if r.head.next {
                continue;
            }
            let h = node(&mut graph, i, &r.head.atom.predicate);
            for l in &r.body {
                let u = node(&mut graph, l.context, &l.atom.predicate);
                graph.add_edge(u, h, true);
                bridge_edges.push((u, h));
            }
        }
    }

    let mut component = vec![usize::MAX; graph.node_count()];
    for (k, scc) in tarjan_scc(&graph).into_iter().enumerate() {
        for v in scc {
            component[v.index()] = k;
        }
    }
    bridge_edges
        .iter()
        .all(|(u, v)| u != v && component[u.index()] != component[v.index()])
}

/// All logics deterministic and normal, all operations monotone, all
/// contexts reducible: the preconditions of [`wfs`].
pub fn check_wfs_preconditions(system: &Emcs) -> Result<()> {
    least_state(system)?;
    check_monotone_ops(system)?;
    let empty = BeliefSet::new();
    for (i, c) in system.contexts().iter().enumerate() {
        if c.logic().reduce(c.kb(), &empty).is_none() {
            return Err(Error::NotReducible {
                context: i + 1,
                kind: c.kind().as_str(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    pub(crate) fn m2() -> Emcs {
        parse_system(
            "context C1 : identity { bridge { add(p) <- (2:q). } }
             context C2 : identity { bridge { add(q) <- not (1:r). } }",
        )
        .unwrap()
    }

    fn msj() -> Emcs {
        parse_system("context C : identity { bridge { add(p) <- (1:p). } }").unwrap()
    }

    fn mol() -> Emcs {
        parse_system("context C : identity { bridge { add(p) <- not (1:p). } }").unwrap()
    }

    fn state(sets: &[&[&str]]) -> BeliefState {
        BeliefState::new(
            sets.iter()
                .map(|s| s.iter().map(|a| GroundAtom::prop(a)).collect())
                .collect(),
        )
    }

    #[test]
    fn static_equilibria_of_m2() {
        let m = m2();
        assert!(is_static_equilibrium(&m, &state(&[&["p"], &["q"]])).unwrap());
        assert!(!is_static_equilibrium(&m, &state(&[&[], &[]])).unwrap());
        assert!(is_static_equilibrium(&m, &state(&[&[]])).is_err());
    }

    #[test]
    fn no_bridge_rules() {
        let m = parse_system("context C : datalog { kb { a. b <- a. } }").unwrap();
        let s = state(&[&["a", "b"]]);
        assert!(is_static_equilibrium(&m, &s).unwrap());
        let (ge, trace) = grounded_equilibrium(&m).unwrap();
        assert_eq!(ge, s);
        assert_eq!(trace.iterations(), 1);
    }

    #[test]
    fn m2_reduct_fixpoint_takes_three_iterations() {
        let reduct = s_reduct(&m2(), &state(&[&[], &[]])).unwrap();
        let (ge, trace) = grounded_equilibrium_definite(&reduct).unwrap();
        assert_eq!(ge, state(&[&["p"], &["q"]]));
        assert_eq!(trace.iterations(), 3);
        assert!(is_static_equilibrium(&m2(), &ge).unwrap());
    }

    #[test]
    fn self_justification_is_rejected() {
        let (ge, _) = grounded_equilibrium(&msj()).unwrap();
        assert_eq!(ge, state(&[&[]]));
        assert!(is_grounded_equilibrium(&msj(), &state(&[&[]])).unwrap());
        assert!(!is_grounded_equilibrium(&msj(), &state(&[&["p"]])).unwrap());
        assert_eq!(wfs(&msj()).unwrap(), state(&[&[]]));
    }

    #[test]
    fn odd_loop() {
        let m = mol();
        assert_eq!(gamma(&m, &state(&[&[]])).unwrap(), state(&[&["p"]]));
        assert_eq!(gamma(&m, &state(&[&["p"]])).unwrap(), state(&[&[]]));
        assert_eq!(wfs(&m).unwrap(), state(&[&[]]));
        assert!(!is_grounded_equilibrium(&m, &state(&[&["p"]])).unwrap());
        assert!(grounded_equilibrium(&m).is_err());
    }

    #[test]
    fn m2_wfs() {
        assert_eq!(wfs(&m2()).unwrap(), state(&[&["p"], &["q"]]));
        assert!(is_grounded_equilibrium(&m2(), &state(&[&["p"], &["q"]])).unwrap());
    }

    #[test]
    fn reduct_rules() {
        let m = parse_system(
            "context C1 : identity { bridge { add(p) <- (1:a), not (2:b). } }
             context C2 : identity { }",
        )
        .unwrap();
        let deleted = s_reduct(&m, &state(&[&[], &["b"]])).unwrap().to_emcs();
        assert!(deleted.context(0).bridge_rules().is_empty());
        let kept = s_reduct(&m, &state(&[&[], &[]])).unwrap().to_emcs();
        assert_eq!(kept.context(0).bridge_rules()[0].to_string(), "add(p) <- (1:a).");
    }

    #[test]
    fn negation_free_gamma_is_constant() {
        let m = parse_system(
            "context C1 : identity { kb { a. } bridge { add(p) <- (1:a). } }
             context C2 : identity { bridge { add(q) <- (1:p). } }",
        )
        .unwrap();
        let g0 = gamma(&m, &state(&[&[], &[]])).unwrap();
        assert_eq!(gamma(&m, &state(&[&["a", "p"], &["q", "z"]])).unwrap(), g0);
    }

    #[test]
    fn acyclicity() {
        assert!(check_acyclic(&m2()));
        assert!(!check_acyclic(&msj()));
        assert!(!check_acyclic(&mol()));
        let via_kb = parse_system(
            "context C1 : datalog { kb { b <- a. } }
             context C2 : identity { bridge { add(c) <- (1:b). } }
             context C3 : identity { }",
        )
        .unwrap();
        assert!(check_acyclic(&via_kb));
        let cyclic = parse_system(
            "context C1 : datalog { kb { b <- a. } bridge { add(a) <- (2:c). } }
             context C2 : identity { bridge { add(c) <- (1:b). } }",
        )
        .unwrap();
        assert!(!check_acyclic(&cyclic));
    }

    #[test]
    fn iteration_cap_is_enforced() {
        let m =
            parse_system("context C1 : identity { kb { a. } bridge { add(b) <- (1:a). add(c) <- (1:b). } }").unwrap();
        let err = SolverConfig::with_iteration_cap(1)
            .grounded_equilibrium(&m)
            .unwrap_err();
        assert!(matches!(err, Error::IterationCap { .. }));
        assert!(SolverConfig::with_iteration_cap(3).grounded_equilibrium(&m).is_ok());
    }
}
