//! Indexed fact storage and a nested-loop join used both by the rule
//! evaluators of the context logics and by bridge-rule evaluation.
//!
//! Matching a schematic rule against a database is the same as evaluating
//! each of its ground instances over the constant pool: variables that no
//! positive literal binds are enumerated over the pool.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use crate::kernel::atom::{Atom, GroundAtom, Symbol, Term};

pub(crate) type Tuple = Box<[Symbol]>;

/// Tuples of one predicate, with a hash index per argument position.
#[derive(Clone, Debug, Default)]
pub(crate) struct Relation {
    tuples: Vec<Tuple>,
    set: HashSet<Tuple>,
    index: Vec<HashMap<Symbol, Vec<u32>>>,
}

impl Relation {
    fn new(arity: usize) -> Self {
        Relation {
            tuples: Vec::new(),
            set: HashSet::default(),
            index: vec![HashMap::default(); arity],
        }
    }

    pub(crate) fn insert(&mut self, tuple: Tuple) -> bool {
        if self.set.contains(&tuple) {
            return false;
        }
        let id = self.tuples.len() as u32;
        for (pos, value) in tuple.iter().enumerate() {
            self.index[pos].entry(value.clone()).or_default().push(id);
        }
        self.set.insert(tuple.clone());
        self.tuples.push(tuple);
        true
    }

    pub(crate) fn contains(&self, tuple: &[Symbol]) -> bool {
        self.set.contains(tuple)
    }

    pub(crate) fn len(&self) -> usize {
        self.tuples.len()
    }
}

/// A set of ground atoms keyed by predicate and arity.
#[derive(Clone, Debug, Default)]
pub(crate) struct Database {
    relations: HashMap<(Symbol, usize), Relation>,
    size: usize,
}

impl Database {
    pub(crate) fn new() -> Self {
        Database::default()
    }

    pub(crate) fn from_atoms<'a>(atoms: impl IntoIterator<Item = &'a GroundAtom>) -> Self {
        let mut db = Database::new();
        for a in atoms {
            db.insert(a);
        }
        db
    }

    pub(crate) fn insert(&mut self, atom: &GroundAtom) -> bool {
        self.insert_tuple(&atom.predicate, atom.args.clone().into_boxed_slice())
    }

    pub(crate) fn insert_tuple(&mut self, pred: &Symbol, tuple: Tuple) -> bool {
        let added = self
            .relations
            .entry((pred.clone(), tuple.len()))
            .or_insert_with(|| Relation::new(tuple.len()))
            .insert(tuple);
        if added {
            self.size += 1;
        }
        added
    }

    pub(crate) fn contains(&self, atom: &GroundAtom) -> bool {
        self.relations
            .get(&(atom.predicate.clone(), atom.args.len()))
            .is_some_and(|r| r.contains(&atom.args))
    }

    pub(crate) fn relation(&self, pred: &Symbol, arity: usize) -> Option<&Relation> {
        self.relations.get(&(pred.clone(), arity))
    }

    pub(crate) fn len(&self) -> usize {
        self.size
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub(crate) fn atoms(&self) -> impl Iterator<Item = GroundAtom> + '_ {
        self.relations.iter().flat_map(|((pred, _), rel)| {
            rel.tuples
                .iter()
                .map(move |t| GroundAtom::new(pred.clone(), t.to_vec()))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Var(usize),
    Const(Symbol),
}

#[derive(Clone, Debug)]
pub(crate) struct Pattern {
    pub(crate) predicate: Symbol,
    pub(crate) slots: Vec<Slot>,
}

impl Pattern {
    pub(crate) fn arity(&self) -> usize {
        self.slots.len()
    }

    /// Instantiate under a complete binding.
    pub(crate) fn ground(&self, binding: &[Symbol]) -> GroundAtom {
        GroundAtom::new(
            self.predicate.clone(),
            self.slots
                .iter()
                .map(|s| match s {
                    Slot::Var(v) => binding[*v].clone(),
                    Slot::Const(c) => c.clone(),
                })
                .collect(),
        )
    }

    pub(crate) fn ground_tuple(&self, binding: &[Symbol]) -> Tuple {
        self.slots
            .iter()
            .map(|s| match s {
                Slot::Var(v) => binding[*v].clone(),
                Slot::Const(c) => c.clone(),
            })
            .collect()
    }
}

/// Assigns dense slot numbers to the variables of one rule.
#[derive(Clone, Debug, Default)]
pub(crate) struct VarTable {
    names: Vec<Symbol>,
}

impl VarTable {
    pub(crate) fn compile(&mut self, atom: &Atom) -> Pattern {
        let slots = atom
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => Slot::Const(c.clone()),
                Term::Var(v) => Slot::Var(self.slot(v)),
            })
            .collect();
        Pattern {
            predicate: atom.predicate.clone(),
            slots,
        }
    }

    fn slot(&mut self, v: &Symbol) -> usize {
        match self.names.iter().position(|n| n == v) {
            Some(k) => k,
            None => {
                self.names.push(v.clone());
                self.names.len() - 1
            }
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.names.len()
    }
}

/// Slots that no positive pattern binds; these range over the pool.
pub(crate) fn free_slots(nvars: usize, positives: &[&Pattern]) -> Vec<usize> {
    let mut bound = vec![false; nvars];
    for p in positives {
        for s in &p.slots {
            if let Slot::Var(v) = s {
                bound[*v] = true;
            }
        }
    }
    (0..nvars).filter(|v| !bound[*v]).collect()
}

/// Enumerate every complete binding that satisfies all positive patterns
/// (each against its relation), extended over `domain` for `free` slots.
/// `emit` returns `false` to stop the enumeration early.
pub(crate) fn join(
    positives: &[(Option<&Relation>, &Pattern)],
    nvars: usize,
    free: &[usize],
    domain: &[Symbol],
    emit: &mut dyn FnMut(&[Symbol]) -> bool,
) {
    if positives.iter().any(|(r, _)| r.is_none_or(|r| r.len() == 0)) {
        return;
    }
    if !free.is_empty() && domain.is_empty() {
        return;
    }
    let mut binding: Vec<Option<Symbol>> = vec![None; nvars];
    let mut scratch: Vec<Symbol> = Vec::with_capacity(nvars);
    join_rec(positives, 0, &mut binding, free, domain, &mut scratch, emit);
}

fn join_rec(
    positives: &[(Option<&Relation>, &Pattern)],
    depth: usize,
    binding: &mut Vec<Option<Symbol>>,
    free: &[usize],
    domain: &[Symbol],
    scratch: &mut Vec<Symbol>,
    emit: &mut dyn FnMut(&[Symbol]) -> bool,
) -> bool {
    if depth == positives.len() {
        return enumerate_free(binding, free, domain, scratch, emit);
    }
    let (rel, pat) = positives[depth];
    let rel = rel.expect("checked above");

    // Pick the most selective bound position.
    let mut best: Option<&Vec<u32>> = None;
    for (pos, slot) in pat.slots.iter().enumerate() {
        let value = match slot {
            Slot::Const(c) => Some(c),
            Slot::Var(v) => binding[*v].as_ref(),
        };
        if let Some(value) = value {
            match rel.index[pos].get(value) {
                None => return true,
                Some(ids) => {
                    if best.is_none_or(|b| ids.len() < b.len()) {
                        best = Some(ids);
                    }
                }
            }
        }
    }

    let mut newly: Vec<usize> = Vec::with_capacity(pat.slots.len());
    let mut visit = |tuple: &Tuple, binding: &mut Vec<Option<Symbol>>, scratch: &mut Vec<Symbol>| {
        newly.clear();
        let mut ok = true;
        for (slot, value) in pat.slots.iter().zip(tuple.iter()) {
            match slot {
                Slot::Const(c) => {
                    if c != value {
                        ok = false;
                        break;
                    }
                }
                Slot::Var(v) => match &binding[*v] {
                    Some(b) => {
                        if b != value {
                            ok = false;
                            break;
                        }
                    }
                    None => {
                        binding[*v] = Some(value.clone());
                        newly.push(*v);
                    }
                },
            }
        }
        let cont = if ok {
            join_rec(positives, depth + 1, binding, free, domain, scratch, emit)
        } else {
            true
        };
        for v in &newly {
            binding[*v] = None;
        }
        cont
    };

    match best {
        Some(ids) => {
            for id in ids {
                if !visit(&rel.tuples[*id as usize], binding, scratch) {
                    return false;
                }
            }
        }
        None => {
            for tuple in &rel.tuples {
                if !visit(tuple, binding, scratch) {
                    return false;
                }
            }
        }
    }
    true
}

fn enumerate_free(
    binding: &mut Vec<Option<Symbol>>,
    free: &[usize],
    domain: &[Symbol],
    scratch: &mut Vec<Symbol>,
    emit: &mut dyn FnMut(&[Symbol]) -> bool,
) -> bool {
    match free.split_first() {
        None => {
            scratch.clear();
            scratch.extend(binding.iter().map(|b| b.clone().expect("complete binding")));
            emit(scratch)
        }
        Some((v, rest)) => {
            for c in domain {
                binding[*v] = Some(c.clone());
                if !enumerate_free(binding, rest, domain, scratch, emit) {
                    binding[*v] = None;
                    return false;
                }
            }
            binding[*v] = None;
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ga(p: &str, args: &[&str]) -> GroundAtom {
        GroundAtom::new(p, args.iter().map(|a| Symbol::new(a)).collect())
    }

    fn var(v: &str) -> Term {
        Term::Var(Symbol::new(v))
    }

    #[test]
    fn two_way_join() {
        let db = Database::from_atoms(&[ga("e", &["a", "b"]), ga("e", &["b", "c"]), ga("e", &["c", "d"])]);
        let mut vars = VarTable::default();
        let p1 = vars.compile(&Atom::new("e", vec![var("x"), var("y")]));
        let p2 = vars.compile(&Atom::new("e", vec![var("y"), var("z")]));
        let rel = db.relation(&Symbol::new("e"), 2);
        let mut out = Vec::new();
        join(&[(rel, &p1), (rel, &p2)], vars.len(), &[], &[], &mut |b| {
            out.push(b.to_vec());
            true
        });
        out.sort();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], vec![Symbol::new("a"), Symbol::new("b"), Symbol::new("c")]);
    }

    #[test]
    fn free_variables_range_over_domain() {
        let mut vars = VarTable::default();
        let _ = vars.compile(&Atom::new("p", vec![var("x")]));
        let domain = vec![Symbol::new("a"), Symbol::new("b")];
        let mut n = 0;
        join(&[], vars.len(), &[0], &domain, &mut |_| {
            n += 1;
            true
        });
        assert_eq!(n, 2);
    }
}
