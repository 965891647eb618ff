use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::atom::{GroundAtom, Symbol};
use super::belief::BeliefSet;
use crate::logics::datalog::Program;
use crate::logics::el::Ontology;
use crate::matching::Database;

/// A knowledge base: a set of facts plus the context's static theory.
///
/// The shipped `add` operation only ever grows the fact set, so the theory
/// is shared between all knowledge bases derived from one context.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Kb {
    facts: BTreeSet<GroundAtom>,
    theory: Theory,
}

#[derive(Clone, Debug, Default)]
pub enum Theory {
    #[default]
    None,
    Program(Arc<Program>),
    /// A normal program reduced against a fixed belief set: `not a` holds
    /// iff `a` is absent from that set. Definite by construction.
    Reduced(Arc<Reduct>),
    Ontology(Arc<Ontology>),
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Theory::None, Theory::None) => true,
            (Theory::Program(a), Theory::Program(b)) => Arc::ptr_eq(a, b) || a == b,
            (Theory::Reduced(a), Theory::Reduced(b)) => Arc::ptr_eq(a, b) || a == b,
            (Theory::Ontology(a), Theory::Ontology(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

#[derive(Debug)]
pub struct Reduct {
    program: Arc<Program>,
    against: BeliefSet,
    index: Database,
}

impl Reduct {
    pub fn new(program: Arc<Program>, against: BeliefSet) -> Self {
        let index = Database::from_atoms(against.iter());
        Reduct {
            program,
            against,
            index,
        }
    }

    pub fn program(&self) -> &Arc<Program> {
        &self.program
    }

    pub fn against(&self) -> &BeliefSet {
        &self.against
    }

    pub(crate) fn interpretation(&self) -> &Database {
        &self.index
    }
}

impl PartialEq for Reduct {
    fn eq(&self, other: &Self) -> bool {
        self.program == other.program && self.against == other.against
    }
}

impl Kb {
    pub fn new(facts: BTreeSet<GroundAtom>, theory: Theory) -> Self {
        Kb { facts, theory }
    }

    pub fn from_facts(facts: impl IntoIterator<Item = GroundAtom>) -> Self {
        Kb {
            facts: facts.into_iter().collect(),
            theory: Theory::None,
        }
    }

    pub fn with_program(facts: BTreeSet<GroundAtom>, program: Program) -> Self {
        Kb {
            facts,
            theory: Theory::Program(Arc::new(program)),
        }
    }

    pub fn with_ontology(facts: BTreeSet<GroundAtom>, ontology: Ontology) -> Self {
        Kb {
            facts,
            theory: Theory::Ontology(Arc::new(ontology)),
        }
    }

    pub fn facts(&self) -> &BTreeSet<GroundAtom> {
        &self.facts
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    /// Same theory, different facts.
    pub fn with_facts(&self, facts: BTreeSet<GroundAtom>) -> Kb {
        Kb {
            facts,
            theory: self.theory.clone(),
        }
    }

    pub fn with_theory(&self, theory: Theory) -> Kb {
        Kb {
            facts: self.facts.clone(),
            theory,
        }
    }

    pub fn insert(&mut self, fact: GroundAtom) -> bool {
        self.facts.insert(fact)
    }

    /// `self ⊆ other`: same theory and a subset of the facts.
    pub fn is_subset(&self, other: &Kb) -> bool {
        self.theory == other.theory && self.facts.is_subset(&other.facts)
    }

    /// Predicates (with arity) mentioned by facts and theory.
    pub fn signature(&self) -> BTreeMap<Symbol, usize> {
        let mut sig: BTreeMap<Symbol, usize> = BTreeMap::new();
        for f in &self.facts {
            sig.entry(f.predicate.clone()).or_insert(f.arity());
        }
        match &self.theory {
            Theory::None => {}
            Theory::Program(p) => add_program_signature(p, &mut sig),
            Theory::Reduced(r) => add_program_signature(r.program(), &mut sig),
            Theory::Ontology(o) => {
                for c in o.concept_names() {
                    sig.entry(c).or_insert(1);
                }
                for r in o.role_names() {
                    sig.entry(r).or_insert(2);
                }
            }
        }
        sig
    }

    /// Constants mentioned by facts and theory.
    pub fn constants(&self) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = self.facts.iter().flat_map(|f| f.args.iter().cloned()).collect();
        let program = match &self.theory {
            Theory::Program(p) => Some(p.as_ref()),
            Theory::Reduced(r) => Some(r.program().as_ref()),
            Theory::Ontology(o) => {
                out.extend(o.individuals());
                None
            }
            Theory::None => None,
        };
        if let Some(p) = program {
            for rule in p.rules() {
                for atom in rule.atoms() {
                    out.extend(atom.constants().cloned());
                }
            }
        }
        out
    }
}

fn add_program_signature(p: &Program, sig: &mut BTreeMap<Symbol, usize>) {
    for rule in p.rules() {
        for atom in rule.atoms() {
            sig.entry(atom.predicate.clone()).or_insert(atom.arity());
        }
    }
}

impl fmt::Display for Kb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let facts: Vec<String> = self.facts.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", facts.join(", "))
    }
}
