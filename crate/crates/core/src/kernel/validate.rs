//! Whole-system well-formedness checks.
//!
//! [`validate`] reports errors only; a system it accepts can be run.
//! [`warnings`] reports vocabulary the engine had to infer because a bridge
//! body queries a predicate the target context never declared.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use super::context::{Emcs, ADD};
use crate::kernel::atom::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    IndexOutOfRange,
    UndeclaredOperation,
    UnsupportedOperation,
    Vocabulary,
    Arity,
    ObservationOrder,
    UnsafeRule,
    KnowledgeBase,
    DuplicateName,
    InferredVocabulary,
}

/// One finding. `context` and `rule` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub context: Option<usize>,
    pub rule: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    fn error(kind: DiagnosticKind, context: usize, rule: Option<usize>, message: String) -> Self {
        Diagnostic {
            severity: Severity::Error,
            kind,
            context: Some(context + 1),
            rule: rule.map(|r| r + 1),
            message,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}")?;
        if let Some(c) = self.context {
            write!(f, ": context {c}")?;
        }
        if let Some(r) = self.rule {
            write!(f, ", rule {r}")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Every problem that makes the system unusable.
pub fn validate(system: &Emcs) -> Vec<Diagnostic> {
    diagnostics(system)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .collect()
}

/// Vocabulary accepted by inference rather than declaration.
pub fn warnings(system: &Emcs) -> Vec<Diagnostic> {
    diagnostics(system)
        .into_iter()
        .filter(|d| d.severity == Severity::Warning)
        .collect()
}

pub fn diagnostics(system: &Emcs) -> Vec<Diagnostic> {
    use DiagnosticKind::*;
    let n = system.len();
    let mut out = Vec::new();

    let mut names = HashSet::new();
    let mut seen_reasoning = false;
    for (i, c) in system.contexts().iter().enumerate() {
        if !names.insert(c.name().clone()) {
            out.push(Diagnostic::error(
                DuplicateName,
                i,
                None,
                format!("context name `{}` is used twice", c.name()),
            ));
        }
        if c.is_observation() && seen_reasoning {
            out.push(Diagnostic::error(
                ObservationOrder,
                i,
                None,
                format!(
                    "observation context `{}` follows a reasoning context; observation contexts must come first",
                    c.name()
                ),
            ));
        }
        seen_reasoning |= !c.is_observation();
        for op in c.op_base() {
            if op.as_str() != ADD {
                out.push(Diagnostic::error(
                    UnsupportedOperation,
                    i,
                    None,
                    format!("operation `{op}` has no management semantics; only `add` is supported"),
                ));
            }
        }
        for problem in c.logic().check_kb(c.kb()) {
            out.push(Diagnostic::error(KnowledgeBase, i, None, problem));
        }
    }

    // Arity of every predicate use, per context.
    let mut uses: Vec<BTreeMap<Symbol, BTreeSet<usize>>> = vec![BTreeMap::new(); n];
    for (i, c) in system.contexts().iter().enumerate() {
        for (p, a) in c.kb().signature() {
            uses[i].entry(p).or_default().insert(a);
        }
        if let Some(v) = c.declared_vocab() {
            for (p, a) in v {
                uses[i].entry(p.clone()).or_default().insert(*a);
            }
        }
    }

    for (i, c) in system.contexts().iter().enumerate() {
        for (k, rule) in c.bridge_rules().iter().enumerate() {
            let head = &rule.head;
            if !c.op_base().contains(&head.op) {
                out.push(Diagnostic::error(
                    UndeclaredOperation,
                    i,
                    Some(k),
                    format!("head operation `{}` is not declared for this context", head.op),
                ));
            }
            if !rule.is_safe() {
                out.push(Diagnostic::error(
                    UnsafeRule,
                    i,
                    Some(k),
                    format!("head variables of `{rule}` do not all occur in a positive body literal"),
                ));
            }
            if let Some(v) = c.declared_vocab() {
                let sig = c.kb().signature();
                if !v.contains_key(&head.atom.predicate) && !sig.contains_key(&head.atom.predicate) {
                    out.push(Diagnostic::error(
                        Vocabulary,
                        i,
                        Some(k),
                        format!("head predicate `{}` is not in the vocabulary", head.atom.predicate),
                    ));
                }
            }
            uses[i]
                .entry(head.atom.predicate.clone())
                .or_default()
                .insert(head.atom.arity());
            for lit in &rule.body {
                if lit.context >= n {
                    out.push(Diagnostic::error(
                        IndexOutOfRange,
                        i,
                        Some(k),
                        format!("literal `{lit}` refers to context {} of {n}", lit.context + 1),
                    ));
                    continue;
                }
                uses[lit.context]
                    .entry(lit.atom.predicate.clone())
                    .or_default()
                    .insert(lit.atom.arity());
                let target = system.context(lit.context);
                if let Some(v) = target.declared_vocab() {
                    if !v.contains_key(&lit.atom.predicate)
                        && !target.kb().signature().contains_key(&lit.atom.predicate)
                    {
                        out.push(Diagnostic {
                            severity: Severity::Warning,
                            kind: InferredVocabulary,
                            context: Some(i + 1),
                            rule: Some(k + 1),
                            message: format!(
                                "`{}/{}` is not declared by context {} (`{}`); accepted as inferred vocabulary",
                                lit.atom.predicate,
                                lit.atom.arity(),
                                lit.context + 1,
                                target.name()
                            ),
                        });
                    }
                }
            }
        }
    }

    for (i, preds) in uses.iter().enumerate() {
        for (p, arities) in preds {
            if arities.len() > 1 {
                let list: Vec<String> = arities.iter().map(|a| a.to_string()).collect();
                out.push(Diagnostic::error(
                    Arity,
                    i,
                    None,
                    format!("predicate `{p}` is used with arities {}", list.join(", ")),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::atom::{Atom, GroundAtom};
    use crate::kernel::context::EvolvingContext;
    use crate::kernel::kb::Kb;
    use crate::kernel::rules::{BridgeLiteral, BridgeRule, Head};
    use crate::logics::LogicKind;

    fn ctx(name: &str, rules: Vec<BridgeRule>) -> EvolvingContext {
        EvolvingContext::new(name, LogicKind::Identity, Kb::default()).with_bridge_rules(rules)
    }

    fn rule(head: &str, body: Vec<BridgeLiteral>) -> BridgeRule {
        BridgeRule::new(Head::add(Atom::new(head, vec![])), body)
    }

    #[test]
    fn well_formed_system() {
        let sys = Emcs::new(vec![
            ctx(
                "C1",
                vec![rule("p", vec![BridgeLiteral::pos(1, GroundAtom::prop("q"))])],
            ),
            ctx(
                "C2",
                vec![rule("q", vec![BridgeLiteral::neg(0, GroundAtom::prop("r"))])],
            ),
        ]);
        assert_eq!(validate(&sys), vec![]);
    }

    #[test]
    fn out_of_range_index() {
        let sys = Emcs::new(vec![
            ctx(
                "C1",
                vec![rule("p", vec![BridgeLiteral::pos(4, GroundAtom::prop("q"))])],
            ),
            ctx("C2", vec![]),
        ]);
        let d = validate(&sys);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::IndexOutOfRange);
        assert_eq!((d[0].context, d[0].rule), (Some(1), Some(1)));
    }

    #[test]
    fn observation_after_reasoning() {
        let sys = Emcs::new(vec![ctx("C1", vec![]), EvolvingContext::observation("O")]);
        let d = validate(&sys);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::ObservationOrder);
        assert_eq!(d[0].context, Some(2));
    }

    #[test]
    fn undeclared_head_operation_and_arity_clash() {
        let bad_op = BridgeRule::new(
            Head {
                op: Symbol::new("del"),
                atom: Atom::new("p", vec![]),
                next: false,
            },
            vec![],
        );
        let clash = rule("q", vec![BridgeLiteral::pos(0, GroundAtom::new("p", vec!["a".into()]))]);
        let sys = Emcs::new(vec![ctx("C1", vec![bad_op, clash])]);
        let kinds: Vec<_> = validate(&sys).iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::UndeclaredOperation));
        assert!(kinds.contains(&DiagnosticKind::Arity));
    }

    #[test]
    fn inferred_vocabulary_is_a_warning() {
        let obs = EvolvingContext::observation("O").with_vocab([(Symbol::new("o"), 0)].into_iter().collect());
        let sys = Emcs::new(vec![
            obs,
            ctx(
                "C",
                vec![rule("p", vec![BridgeLiteral::pos(0, GroundAtom::prop("extra"))])],
            ),
        ]);
        assert!(validate(&sys).is_empty());
        let w = warnings(&sys);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].kind, DiagnosticKind::InferredVocabulary);
        assert!(sys.vocabulary(0).contains_key(&Symbol::new("extra")));
    }
}
