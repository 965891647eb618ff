//! A small EL ontology logic.
//!
//! Axioms are general concept inclusions over concept names, `top`, `bot`,
//! conjunction, existential restriction and nominal fillers. They are
//! normalised into three shapes
//!
//! * `A1 and ... and Ak sub B` (B a name or `bot`),
//! * `A sub some r F`,
//! * `some r F sub B`,
//!
//! where a filler `F` is `top`, a concept name or a nominal `{o}`. Knowledge
//! base facts are concept assertions `A(a)` and role assertions `r(a,b)`.
//!
//! Acceptance saturates a canonical interpretation: the named individuals
//! plus one anonymous witness per existential filler, closed under the
//! completion rules. The accepted belief set is every derived concept and
//! role assertion between named individuals.

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::kernel::atom::{GroundAtom, Symbol};
use crate::kernel::belief::BeliefSet;
use crate::kernel::kb::{Kb, Theory};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Name(Symbol),
    Nominal(Symbol),
    And(Vec<Concept>),
    Exists(Symbol, Box<Concept>),
}

impl Concept {
    pub fn name(s: &str) -> Self {
        Concept::Name(Symbol::new(s))
    }

    pub fn some(role: &str, filler: Concept) -> Self {
        Concept::Exists(Symbol::new(role), Box::new(filler))
    }

    fn collect_names(
        &self,
        concepts: &mut BTreeSet<Symbol>,
        roles: &mut BTreeSet<Symbol>,
        nominals: &mut BTreeSet<Symbol>,
    ) {
        match self {
            Concept::Top | Concept::Bottom => {}
            Concept::Name(a) => {
                concepts.insert(a.clone());
            }
            Concept::Nominal(o) => {
                nominals.insert(o.clone());
            }
            Concept::And(cs) => cs.iter().for_each(|c| c.collect_names(concepts, roles, nominals)),
            Concept::Exists(r, c) => {
                roles.insert(r.clone());
                c.collect_names(concepts, roles, nominals);
            }
        }
    }

    /// Concept and role names, used for syntactic dependency edges.
    pub fn predicates(&self) -> BTreeSet<Symbol> {
        let (mut c, mut r, mut n) = Default::default();
        self.collect_names(&mut c, &mut r, &mut n);
        c.extend(r);
        c
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("top"),
            Concept::Bottom => f.write_str("bot"),
            Concept::Name(a) => f.write_str(a.as_str()),
            Concept::Nominal(o) => {
                f.write_str("{")?;
                o.write_constant(f)?;
                f.write_str("}")
            }
            Concept::And(cs) => {
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" and ")?;
                    }
                    match c {
                        Concept::And(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            Concept::Exists(r, c) => match c.as_ref() {
                Concept::And(_) => write!(f, "some {r} ({c})"),
                _ => write!(f, "some {r} {c}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Sub(Concept, Concept),
    Equiv(Concept, Concept),
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Sub(a, b) => write!(f, "{a} sub {b}."),
            Axiom::Equiv(a, b) => write!(f, "{a} equiv {b}."),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Filler {
    Top,
    Name(Symbol),
    Nominal(Symbol),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Rhs {
    Name(Symbol),
    Bottom,
    Exists(Symbol, Filler),
}

/// `None` in a left-hand side stands for `top`.
#[derive(Clone, Debug, Default)]
struct Normalized {
    conj: Vec<(Vec<Option<Symbol>>, Rhs)>,
    exists: Vec<(Symbol, Filler, Rhs)>,
    fresh: HashSet<Symbol>,
}

struct Normalizer {
    out: Normalized,
    counter: usize,
}

impl Normalizer {
    fn fresh(&mut self) -> Symbol {
        let s = Symbol::new(&format!("_el{}", self.counter));
        self.counter += 1;
        self.out.fresh.insert(s.clone());
        s
    }

    fn lhs(&mut self, c: &Concept) -> std::result::Result<Vec<Option<Symbol>>, String> {
        match c {
            Concept::Top => Ok(vec![None]),
            Concept::Name(a) => Ok(vec![Some(a.clone())]),
            Concept::And(cs) => {
                let mut out = Vec::new();
                for c in cs {
                    out.extend(self.lhs(c)?);
                }
                Ok(out)
            }
            Concept::Exists(r, d) => {
                let filler = self.lhs_filler(d)?;
                let x = self.fresh();
                self.out.exists.push((r.clone(), filler, Rhs::Name(x.clone())));
                Ok(vec![Some(x)])
            }
            Concept::Bottom => Err("`bot` may only occur on the right-hand side".into()),
            Concept::Nominal(o) => Err(format!("nominal {{{o}}} may only occur as an existential filler")),
        }
    }

    fn lhs_filler(&mut self, d: &Concept) -> std::result::Result<Filler, String> {
        match d {
            Concept::Top => Ok(Filler::Top),
            Concept::Name(a) => Ok(Filler::Name(a.clone())),
            Concept::Nominal(o) => Ok(Filler::Nominal(o.clone())),
            other => {
                let lhs = self.lhs(other)?;
                let y = self.fresh();
                self.out.conj.push((lhs, Rhs::Name(y.clone())));
                Ok(Filler::Name(y))
            }
        }
    }

    fn rhs(&mut self, lhs: &[Option<Symbol>], d: &Concept) -> std::result::Result<(), String> {
        match d {
            Concept::Top => Ok(()),
            Concept::Bottom => {
                self.out.conj.push((lhs.to_vec(), Rhs::Bottom));
                Ok(())
            }
            Concept::Name(b) => {
                self.out.conj.push((lhs.to_vec(), Rhs::Name(b.clone())));
                Ok(())
            }
            Concept::And(ds) => ds.iter().try_for_each(|d| self.rhs(lhs, d)),
            Concept::Exists(r, e) => {
                let filler = match e.as_ref() {
                    Concept::Top => Filler::Top,
                    Concept::Name(a) => Filler::Name(a.clone()),
                    Concept::Nominal(o) => Filler::Nominal(o.clone()),
                    Concept::Bottom => return Err("`some r bot` is not supported".into()),
                    other => {
                        let y = self.fresh();
                        self.rhs(&[Some(y.clone())], other)?;
                        Filler::Name(y)
                    }
                };
                self.out.conj.push((lhs.to_vec(), Rhs::Exists(r.clone(), filler)));
                Ok(())
            }
            Concept::Nominal(o) => Err(format!("nominal {{{o}}} may only occur as an existential filler")),
        }
    }

    fn axiom(&mut self, sub: &Concept, sup: &Concept) -> std::result::Result<(), String> {
        let lhs = self.lhs(sub)?;
        self.rhs(&lhs, sup)
    }
}

/// The axioms of one EL knowledge base.
#[derive(Debug, Default)]
pub struct Ontology {
    axioms: Vec<Axiom>,
    normalized: OnceLock<std::result::Result<Normalized, String>>,
}

impl Clone for Ontology {
    fn clone(&self) -> Self {
        Ontology::new(self.axioms.clone())
    }
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.axioms == other.axioms
    }
}

impl Ontology {
    pub fn new(axioms: Vec<Axiom>) -> Self {
        Ontology {
            axioms,
            normalized: OnceLock::new(),
        }
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    fn normalized(&self) -> std::result::Result<&Normalized, &str> {
        self.normalized
            .get_or_init(|| {
                let mut n = Normalizer {
                    out: Normalized::default(),
                    counter: 0,
                };
                for ax in &self.axioms {
                    match ax {
                        Axiom::Sub(a, b) => n.axiom(a, b)?,
                        Axiom::Equiv(a, b) => {
                            n.axiom(a, b)?;
                            n.axiom(b, a)?;
                        }
                    }
                }
                Ok(n.out)
            })
            .as_ref()
            .map_err(|e| e.as_str())
    }

    /// Problems with axioms outside the supported fragment.
    pub fn check(&self) -> Option<String> {
        self.normalized().err().map(str::to_owned)
    }

    fn names(&self) -> (BTreeSet<Symbol>, BTreeSet<Symbol>, BTreeSet<Symbol>) {
        let (mut c, mut r, mut n) = Default::default();
        for ax in &self.axioms {
            let (Axiom::Sub(a, b) | Axiom::Equiv(a, b)) = ax;
            a.collect_names(&mut c, &mut r, &mut n);
            b.collect_names(&mut c, &mut r, &mut n);
        }
        (c, r, n)
    }

    pub fn concept_names(&self) -> BTreeSet<Symbol> {
        self.names().0
    }

    pub fn role_names(&self) -> BTreeSet<Symbol> {
        self.names().1
    }

    /// Individuals named by nominals.
    pub fn individuals(&self) -> BTreeSet<Symbol> {
        self.names().2
    }
}

/// Outcome of a saturation run, with the number of derived facts.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub beliefs: BeliefSet,
    pub steps: usize,
}

/// Accepted belief set of an EL knowledge base.
pub fn acc_el(kb: &Kb) -> Result<BeliefSet> {
    saturate(kb).map(|s| s.beliefs)
}

pub fn saturate(kb: &Kb) -> Result<Saturation> {
    let empty = Ontology::default();
    let onto = match kb.theory() {
        Theory::Ontology(o) => o.as_ref(),
        _ => &empty,
    };
    let norm = onto.normalized().map_err(|e| Error::Inconsistent {
        individual: format!("<unsupported axiom: {e}>"),
    })?;
    Saturator::new(norm, kb.facts(), onto.individuals()).run()
}

type Elem = usize;

struct Saturator<'a> {
    norm: &'a Normalized,
    names: Vec<Option<Symbol>>,
    named: HashMap<Symbol, Elem>,
    witnesses: HashMap<Filler, Elem>,
    labels: Vec<HashSet<Symbol>>,
    edges: HashSet<(Symbol, Elem, Elem)>,
    preds: HashMap<(Symbol, Elem), Vec<Elem>>,
    succs: HashMap<(Symbol, Elem), Vec<Elem>>,
    conj_by: HashMap<Option<Symbol>, Vec<usize>>,
    exists_by_role: HashMap<Symbol, Vec<usize>>,
    queue: Vec<Event>,
    steps: usize,
}

enum Event {
    Label(Elem, Option<Symbol>),
    Edge(Symbol, Elem, Elem),
}

impl<'a> Saturator<'a> {
    fn new(norm: &'a Normalized, facts: &BTreeSet<GroundAtom>, nominals: BTreeSet<Symbol>) -> Self {
        let mut conj_by: HashMap<Option<Symbol>, Vec<usize>> = HashMap::default();
        for (k, (lhs, _)) in norm.conj.iter().enumerate() {
            for c in lhs {
                conj_by.entry(c.clone()).or_default().push(k);
            }
        }
        let mut exists_by_role: HashMap<Symbol, Vec<usize>> = HashMap::default();
        for (k, (r, _, _)) in norm.exists.iter().enumerate() {
            exists_by_role.entry(r.clone()).or_default().push(k);
        }
        let mut s = Saturator {
            norm,
            names: Vec::new(),
            named: HashMap::default(),
            witnesses: HashMap::default(),
            labels: Vec::new(),
            edges: HashSet::default(),
            preds: HashMap::default(),
            succs: HashMap::default(),
            conj_by,
            exists_by_role,
            queue: Vec::new(),
            steps: 0,
        };
        for o in nominals {
            s.named_elem(&o);
        }
        for f in facts {
            match f.args.as_slice() {
                [a] => {
                    let x = s.named_elem(a);
                    s.queue.push(Event::Label(x, Some(f.predicate.clone())));
                }
                [a, b] => {
                    let x = s.named_elem(a);
                    let y = s.named_elem(b);
                    s.queue.push(Event::Edge(f.predicate.clone(), x, y));
                }
                _ => {}
            }
        }
        s
    }

    fn new_elem(&mut self, name: Option<Symbol>) -> Elem {
        let e = self.names.len();
        self.names.push(name);
        self.labels.push(HashSet::default());
        // Every element is an instance of top.
        self.queue.push(Event::Label(e, None));
        e
    }

    fn named_elem(&mut self, a: &Symbol) -> Elem {
        if let Some(e) = self.named.get(a) {
            return *e;
        }
        let e = self.new_elem(Some(a.clone()));
        self.named.insert(a.clone(), e);
        e
    }

    fn witness(&mut self, filler: &Filler) -> Elem {
        if let Filler::Nominal(o) = filler {
            return self.named_elem(o);
        }
        if let Some(e) = self.witnesses.get(filler) {
            return *e;
        }
        let e = self.new_elem(None);
        if let Filler::Name(a) = filler {
            self.queue.push(Event::Label(e, Some(a.clone())));
        }
        self.witnesses.insert(filler.clone(), e);
        e
    }

    fn has_label(&self, x: Elem, c: &Option<Symbol>) -> bool {
        match c {
            None => true,
            Some(a) => self.labels[x].contains(a),
        }
    }

    fn matches(&self, filler: &Filler, y: Elem) -> bool {
        match filler {
            Filler::Top => true,
            Filler::Name(a) => self.labels[y].contains(a),
            Filler::Nominal(o) => self.named.get(o) == Some(&y),
        }
    }

    fn describe(&self, x: Elem) -> String {
        match &self.names[x] {
            Some(n) => n.to_string(),
            None => {
                let filler = self.witnesses.iter().find(|(_, e)| **e == x).map(|(f, _)| f.clone());
                match filler {
                    Some(Filler::Name(a)) => format!("_:{a}"),
                    _ => "_:top".to_string(),
                }
            }
        }
    }

    fn apply(&mut self, x: Elem, rhs: &Rhs) -> Result<()> {
        match rhs {
            Rhs::Name(b) => {
                if !self.labels[x].contains(b) {
                    self.queue.push(Event::Label(x, Some(b.clone())));
                }
            }
            Rhs::Bottom => {
                return Err(Error::Inconsistent {
                    individual: self.describe(x),
                })
            }
            Rhs::Exists(r, filler) => {
                let y = self.witness(filler);
                if !self.edges.contains(&(r.clone(), x, y)) {
                    self.queue.push(Event::Edge(r.clone(), x, y));
                }
            }
        }
        Ok(())
    }

    fn run(mut self) -> Result<Saturation> {
        let norm = self.norm;
        while let Some(ev) = self.queue.pop() {
            match ev {
                Event::Label(x, c) => {
                    if let Some(a) = &c {
                        if !self.labels[x].insert(a.clone()) {
                            continue;
                        }
                        self.steps += 1;
                    }
                    if let Some(ks) = self.conj_by.get(&c).cloned() {
                        for k in ks {
                            let (lhs, rhs) = &norm.conj[k];
                            if lhs.iter().all(|l| self.has_label(x, l)) {
                                self.apply(x, rhs)?;
                            }
                        }
                    }
                    // Propagate to predecessors through `some r F sub D`.
                    for (r, filler, rhs) in &norm.exists {
                        let relevant = match (filler, &c) {
                            (Filler::Name(a), Some(b)) => a == b,
                            (Filler::Top, None) => true,
                            (Filler::Nominal(o), None) => self.named.get(o) == Some(&x),
                            _ => false,
                        };
                        if relevant {
                            let ps = self.preds.get(&(r.clone(), x)).cloned().unwrap_or_default();
                            for p in ps {
                                self.apply(p, rhs)?;
                            }
                        }
                    }
                }
                Event::Edge(r, x, y) => {
                    if !self.edges.insert((r.clone(), x, y)) {
                        continue;
                    }
                    self.steps += 1;
                    self.preds.entry((r.clone(), y)).or_default().push(x);
                    self.succs.entry((r.clone(), x)).or_default().push(y);
                    if let Some(ks) = self.exists_by_role.get(&r).cloned() {
                        for k in ks {
                            let (_, filler, rhs) = &norm.exists[k];
                            if self.matches(filler, y) {
                                self.apply(x, rhs)?;
                            }
                        }
                    }
                }
            }
        }

        let mut beliefs = BeliefSet::new();
        for (x, name) in self.names.iter().enumerate() {
            let Some(name) = name else { continue };
            for a in &self.labels[x] {
                if !norm.fresh.contains(a) {
                    beliefs.insert(GroundAtom::new(a.clone(), vec![name.clone()]));
                }
            }
        }
        for (r, x, y) in &self.edges {
            if let (Some(a), Some(b)) = (&self.names[*x], &self.names[*y]) {
                beliefs.insert(GroundAtom::new(r.clone(), vec![a.clone(), b.clone()]));
            }
        }
        Ok(Saturation {
            beliefs,
            steps: self.steps,
        })
    }
}
