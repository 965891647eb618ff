//! Rule programs and their bottom-up evaluation.
//!
//! Both the definite datalog logic and the normal logic-program logic store
//! their rules as a [`Program`]. Evaluation is semi-naive: after the first
//! round, a rule only fires on bindings that use at least one fact derived in
//! the previous round. Default-negated literals are checked against a fixed
//! interpretation, which is how the Gelfond-Lifschitz reduct is applied
//! without materialising it.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use crate::bridge::ConstantPool;
use crate::error::Result;
use crate::kernel::atom::{Atom, GroundAtom, Symbol};
use crate::kernel::belief::BeliefSet;
use crate::kernel::kb::{Kb, Theory};
use crate::matching::{free_slots, join, Database, Pattern, VarTable};

/// `head <- positive, not negative`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Atom,
    pub positive: Vec<Atom>,
    pub negative: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Atom, positive: Vec<Atom>, negative: Vec<Atom>) -> Self {
        Rule {
            head,
            positive,
            negative,
        }
    }

    pub fn is_definite(&self) -> bool {
        self.negative.is_empty()
    }

    /// Every variable occurs in a positive body atom.
    pub fn is_safe(&self) -> bool {
        let bound: BTreeSet<&Symbol> = self.positive.iter().flat_map(|a| a.variables()).collect();
        self.head
            .variables()
            .chain(self.negative.iter().flat_map(|a| a.variables()))
            .all(|v| bound.contains(v))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head)
            .chain(self.positive.iter())
            .chain(self.negative.iter())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        let body: Vec<String> = self
            .positive
            .iter()
            .map(|a| a.to_string())
            .chain(self.negative.iter().map(|a| format!("not {a}")))
            .collect();
        if !body.is_empty() {
            write!(f, " <- {}", body.join(", "))?;
        }
        f.write_str(".")
    }
}

/// A set of rules; facts live in the owning [`Kb`].
#[derive(Debug, Default)]
pub struct Program {
    rules: Vec<Rule>,
    compiled: OnceLock<Vec<CompiledRule>>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program {
            rules,
            compiled: OnceLock::new(),
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_definite(&self) -> bool {
        self.rules.iter().all(Rule::is_definite)
    }

    pub(crate) fn compiled(&self) -> &[CompiledRule] {
        self.compiled
            .get_or_init(|| self.rules.iter().map(CompiledRule::new).collect())
    }
}

impl Clone for Program {
    fn clone(&self) -> Self {
        Program::new(self.rules.clone())
    }
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}

impl Eq for Program {}

#[derive(Clone, Debug)]
pub(crate) struct CompiledRule {
    head: Pattern,
    positive: Vec<Pattern>,
    negative: Vec<Pattern>,
    nvars: usize,
    free: Vec<usize>,
}

impl CompiledRule {
    fn new(rule: &Rule) -> Self {
        let mut vars = VarTable::default();
        let positive: Vec<Pattern> = rule.positive.iter().map(|a| vars.compile(a)).collect();
        let negative = rule.negative.iter().map(|a| vars.compile(a)).collect();
        let head = vars.compile(&rule.head);
        let free = free_slots(vars.len(), &positive.iter().collect::<Vec<_>>());
        CompiledRule {
            head,
            positive,
            negative,
            nvars: vars.len(),
            free,
        }
    }
}

/// Least model of `rules` over `facts`. With `negation = Some(i)`, a literal
/// `not a` holds iff `a` is not in `i`; with `None` negated literals never
/// block (callers only pass definite programs then).
pub(crate) fn least_model<'a>(
    rules: &[CompiledRule],
    facts: impl IntoIterator<Item = &'a GroundAtom>,
    pool: &ConstantPool,
    negation: Option<&Database>,
) -> Database {
    let mut full = Database::from_atoms(facts);
    let domain = pool.symbols();

    let blocked = |rule: &CompiledRule, binding: &[crate::kernel::atom::Symbol]| -> bool {
        match negation {
            None => false,
            Some(interp) => rule.negative.iter().any(|p| interp.contains(&p.ground(binding))),
        }
    };

    // Round zero: every rule against the initial facts.
    let mut delta = Database::new();
    for rule in rules {
        let positives: Vec<_> = rule
            .positive
            .iter()
            .map(|p| (full.relation(&p.predicate, p.arity()), p))
            .collect();
        join(&positives, rule.nvars, &rule.free, domain, &mut |b| {
            if !blocked(rule, b) {
                let tuple = rule.head.ground_tuple(b);
                let head = &rule.head.predicate;
                if !full.relation(head, tuple.len()).is_some_and(|r| r.contains(&tuple)) {
                    delta.insert_tuple(head, tuple);
                }
            }
            true
        });
    }

    while !delta.is_empty() {
        for atom in delta.atoms() {
            full.insert(&atom);
        }
        let mut next = Database::new();
        for rule in rules {
            for k in 0..rule.positive.len() {
                let pk = &rule.positive[k];
                if delta.relation(&pk.predicate, pk.arity()).is_none() {
                    continue;
                }
                let positives: Vec<_> = rule
                    .positive
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let db = if j == k { &delta } else { &full };
                        (db.relation(&p.predicate, p.arity()), p)
                    })
                    .collect();
                join(&positives, rule.nvars, &rule.free, domain, &mut |b| {
                    if !blocked(rule, b) {
                        let tuple = rule.head.ground_tuple(b);
                        let head = &rule.head.predicate;
                        if !full.relation(head, tuple.len()).is_some_and(|r| r.contains(&tuple)) {
                            next.insert_tuple(head, tuple);
                        }
                    }
                    true
                });
            }
        }
        delta = next;
    }
    full
}

pub(crate) fn to_belief_set(db: &Database) -> BeliefSet {
    db.atoms().collect()
}

/// Least Herbrand model of a definite knowledge base.
pub fn acc_datalog(kb: &Kb, pool: &ConstantPool) -> Result<BeliefSet> {
    match kb.theory() {
        Theory::Program(p) => Ok(to_belief_set(&least_model(p.compiled(), kb.facts(), pool, None))),
        Theory::Reduced(r) => {
            let negation = r.interpretation();
            Ok(to_belief_set(&least_model(
                r.program().compiled(),
                kb.facts(),
                pool,
                Some(negation),
            )))
        }
        _ => Ok(kb.facts().iter().cloned().collect()),
    }
}

/// A rule with no variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: GroundAtom,
    pub positive: BTreeSet<GroundAtom>,
    pub negative: BTreeSet<GroundAtom>,
}

impl GroundRule {
    pub fn to_rule(&self) -> Rule {
        Rule::new(
            self.head.to_atom(),
            self.positive.iter().map(GroundAtom::to_atom).collect(),
            self.negative.iter().map(GroundAtom::to_atom).collect(),
        )
    }
}

/// Every instance of every rule over `pool`. Exponential in the number of
/// variables per rule; intended for small programs and for checking the
/// lazily reduced evaluation against an explicit one.
pub fn ground_program(program: &Program, pool: &ConstantPool) -> BTreeSet<GroundRule> {
    let mut out = BTreeSet::new();
    for rule in program.rules() {
        let mut vars = VarTable::default();
        let head = vars.compile(&rule.head);
        let pos: Vec<Pattern> = rule.positive.iter().map(|a| vars.compile(a)).collect();
        let neg: Vec<Pattern> = rule.negative.iter().map(|a| vars.compile(a)).collect();
        let all: Vec<usize> = (0..vars.len()).collect();
        join(&[], vars.len(), &all, pool.symbols(), &mut |b| {
            out.insert(GroundRule {
                head: head.ground(b),
                positive: pos.iter().map(|p| p.ground(b)).collect(),
                negative: neg.iter().map(|p| p.ground(b)).collect(),
            });
            true
        });
    }
    out
}
