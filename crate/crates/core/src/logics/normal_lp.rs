//! Normal logic programs accepted under the well-founded model.
//!
//! The accepted belief set is the set of true atoms of the well-founded
//! model; undefined atoms are reported as not true. The model is computed by
//! the alternating fixpoint: with `G(I)` the least model of the program
//! reduced against `I`, the true atoms are the least fixpoint of `G∘G`.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::datalog::{ground_program, least_model, to_belief_set, GroundRule, Program};
use crate::bridge::ConstantPool;
use crate::error::Result;
use crate::kernel::belief::BeliefSet;
use crate::kernel::kb::{Kb, Reduct, Theory};
use crate::matching::Database;

/// True atoms of the well-founded model of `kb`.
pub fn acc_normal_lp(kb: &Kb, pool: &ConstantPool) -> Result<BeliefSet> {
    let program = match kb.theory() {
        Theory::Program(p) => p,
        Theory::Reduced(r) => {
            return Ok(to_belief_set(&least_model(
                r.program().compiled(),
                kb.facts(),
                pool,
                Some(r.interpretation()),
            )))
        }
        _ => return Ok(kb.facts().iter().cloned().collect()),
    };
    let rules = program.compiled();
    if program.is_definite() {
        return Ok(to_belief_set(&least_model(rules, kb.facts(), pool, None)));
    }
    let mut truth = Database::new();
    loop {
        let possible = least_model(rules, kb.facts(), pool, Some(&truth));
        let next = least_model(rules, kb.facts(), pool, Some(&possible));
        // The sequence of true sets only grows, so equal size means equal.
        if next.len() == truth.len() {
            return Ok(to_belief_set(&next));
        }
        truth = next;
    }
}

/// The reduct used inside the engine: negation is resolved against `s`
/// without grounding the program.
pub fn reduce_lazily(kb: &Kb, s: &BeliefSet) -> Kb {
    match kb.theory() {
        Theory::Program(p) if !p.is_definite() => {
            kb.with_theory(Theory::Reduced(Arc::new(Reduct::new(p.clone(), s.clone()))))
        }
        _ => kb.clone(),
    }
}

/// Gelfond-Lifschitz reduct over the explicit grounding: rules with
/// `not a`, `a ∈ s`, are deleted and the remaining negated literals dropped.
/// Facts are untouched. The result is a definite, ground knowledge base.
pub fn gl_reduct(kb: &Kb, s: &BeliefSet, pool: &ConstantPool) -> Kb {
    let rules = match kb.theory() {
        Theory::Program(p) => ground_program(p, pool),
        Theory::Reduced(r) => ground_program(r.program(), pool),
        _ => return kb.clone(),
    };
    let reduced = gl_reduct_ground(&rules, s);
    Kb::with_program(
        kb.facts().clone(),
        Program::new(reduced.iter().map(GroundRule::to_rule).collect()),
    )
}

/// The reduct on ground rule sets.
pub fn gl_reduct_ground(rules: &BTreeSet<GroundRule>, s: &BeliefSet) -> BTreeSet<GroundRule> {
    rules
        .iter()
        .filter(|r| r.negative.iter().all(|a| !s.contains(a)))
        .map(|r| GroundRule {
            negative: BTreeSet::new(),
            ..r.clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::atom::{Atom, GroundAtom, Symbol, Term};
    use crate::logics::datalog::{acc_datalog, Rule};

    fn p(name: &str) -> Atom {
        Atom::new(name, vec![])
    }

    fn lp(rules: Vec<Rule>, facts: &[GroundAtom]) -> Kb {
        Kb::with_program(facts.iter().cloned().collect(), Program::new(rules))
    }

    #[test]
    fn negation_of_underivable_atom() {
        let kb = lp(vec![Rule::new(p("p"), vec![], vec![p("q")])], &[]);
        let s = acc_normal_lp(&kb, &ConstantPool::default()).unwrap();
        assert_eq!(s, [GroundAtom::prop("p")].into_iter().collect());
    }

    #[test]
    fn even_loop_is_undefined_and_reported_false() {
        let kb = lp(
            vec![
                Rule::new(p("p"), vec![], vec![p("q")]),
                Rule::new(p("q"), vec![], vec![p("p")]),
            ],
            &[],
        );
        assert!(acc_normal_lp(&kb, &ConstantPool::default()).unwrap().is_empty());
    }

    #[test]
    fn admissible_importer() {
        let x = Term::Var(Symbol::new("x"));
        let kb = lp(
            vec![Rule::new(
                Atom::new("AdmissibleImporter", vec![x.clone()]),
                vec![],
                vec![Atom::new("SuspectedBadGuy", vec![x])],
            )],
            &[GroundAtom::new("SuspectedBadGuy", vec!["i1".into()])],
        );
        let pool = ConstantPool::from_iter([Symbol::new("i1"), Symbol::new("i2")]);
        let s = acc_normal_lp(&kb, &pool).unwrap();
        assert!(s.contains(&GroundAtom::new("AdmissibleImporter", vec!["i2".into()])));
        assert!(!s.contains(&GroundAtom::new("AdmissibleImporter", vec!["i1".into()])));
    }

    #[test]
    fn reduct_examples() {
        let kb = lp(vec![Rule::new(p("p"), vec![], vec![p("q")])], &[]);
        let pool = ConstantPool::default();
        let r0 = gl_reduct(&kb, &BeliefSet::new(), &pool);
        let Theory::Program(prog) = r0.theory() else { panic!() };
        assert_eq!(prog.rules(), &[Rule::new(p("p"), vec![], vec![])]);
        let r1 = gl_reduct(&kb, &[GroundAtom::prop("q")].into_iter().collect(), &pool);
        let Theory::Program(prog) = r1.theory() else { panic!() };
        assert!(prog.rules().is_empty());
    }

    #[test]
    fn lazy_and_explicit_reducts_agree() {
        let kb = lp(
            vec![
                Rule::new(p("a"), vec![], vec![p("b")]),
                Rule::new(p("c"), vec![p("a")], vec![p("d")]),
                Rule::new(p("d"), vec![], vec![]),
            ],
            &[],
        );
        let pool = ConstantPool::default();
        for s in [BeliefSet::new(), [GroundAtom::prop("d")].into_iter().collect()] {
            let lazy = acc_normal_lp(&reduce_lazily(&kb, &s), &pool).unwrap();
            let explicit = acc_datalog(&gl_reduct(&kb, &s, &pool), &pool).unwrap();
            assert_eq!(lazy, explicit);
        }
    }
}
