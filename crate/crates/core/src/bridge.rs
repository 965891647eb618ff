//! Bridge-rule grounding and evaluation against belief states.
//!
//! Rules may be schematic. [`ground`] enumerates their instances over a
//! constant pool; the engine itself never materialises that grounding and
//! instead matches rule bodies against the belief state, which yields the
//! same set of applicable heads.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::kernel::atom::{Atom, GroundAtom, Symbol, Term};
use crate::kernel::belief::BeliefState;
use crate::kernel::context::Emcs;
use crate::kernel::rules::{BridgeLiteral, BridgeRule, Head, OperationalFormula};
use crate::matching::{free_slots, join, Database, Pattern, VarTable};

/// The finite set of constants rules are grounded over.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstantPool(Arc<Vec<Symbol>>);

impl ConstantPool {
    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: &Symbol) -> bool {
        self.0.binary_search(c).is_ok()
    }
}

impl FromIterator<Symbol> for ConstantPool {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        let set: BTreeSet<Symbol> = iter.into_iter().collect();
        ConstantPool(Arc::new(set.into_iter().collect()))
    }
}

/// All variable-free instances of `rules` over `pool`. Variables that occur
/// only in negated literals are instantiated like any other.
pub fn ground(rules: &[BridgeRule], pool: &ConstantPool) -> Vec<BridgeRule> {
    let mut out = BTreeSet::new();
    for rule in rules {
        let vars = rule.variables();
        if vars.is_empty() {
            out.insert(rule.clone());
            continue;
        }
        if pool.is_empty() {
            continue;
        }
        let mut assignment = vec![0usize; vars.len()];
        'odometer: loop {
            let lookup = |v: &Symbol| {
                let k = vars.iter().position(|w| w == v).expect("variable of rule");
                pool.symbols()[assignment[k]].clone()
            };
            out.insert(instantiate(rule, &lookup));
            for digit in assignment.iter_mut() {
                *digit += 1;
                if *digit < pool.len() {
                    continue 'odometer;
                }
                *digit = 0;
            }
            break;
        }
    }
    out.into_iter().collect()
}

fn instantiate(rule: &BridgeRule, subst: &dyn Fn(&Symbol) -> Symbol) -> BridgeRule {
    let atom = |a: &Atom| a.substitute(subst).to_atom();
    BridgeRule {
        head: Head {
            op: rule.head.op.clone(),
            atom: atom(&rule.head.atom),
            next: rule.head.next,
        },
        body: rule
            .body
            .iter()
            .map(|l| BridgeLiteral {
                context: l.context,
                atom: atom(&l.atom),
                negated: l.negated,
            })
            .collect(),
    }
}

/// `S ⊨ (r:b)` / `S ⊨ not (r:b)` for a ground literal. Literals pointing
/// outside the state are never satisfied.
pub fn satisfies(s: &BeliefState, lit: &BridgeLiteral) -> bool {
    let Some(component) = s.components().get(lit.context) else {
        return false;
    };
    let Some(atom) = lit.atom.as_ground() else {
        return false;
    };
    component.contains(&atom) != lit.negated
}

/// Heads of the bridge rules of context `i` applicable in `s`.
pub fn app(system: &Emcs, i: usize, s: &BeliefState) -> BTreeSet<OperationalFormula> {
    let index = StateIndex::new(s);
    applicable(system.context(i).compiled_rules(), &index, &index, system.pool())
}

/// `(app^now, app^next)`: plain heads, and next-wrapped heads with the
/// wrapper stripped.
pub fn split_now_next(
    heads: &BTreeSet<OperationalFormula>,
) -> (BTreeSet<OperationalFormula>, BTreeSet<OperationalFormula>) {
    let mut now = BTreeSet::new();
    let mut next = BTreeSet::new();
    for h in heads {
        if h.next {
            next.insert(h.unwrapped());
        } else {
            now.insert(h.clone());
        }
    }
    (now, next)
}

/// A belief state indexed for matching.
pub(crate) struct StateIndex {
    dbs: Vec<Database>,
}

impl StateIndex {
    pub(crate) fn new(s: &BeliefState) -> Self {
        StateIndex {
            dbs: s.components().iter().map(|c| Database::from_atoms(c.iter())).collect(),
        }
    }

    fn contains(&self, ctx: usize, atom: &GroundAtom) -> bool {
        self.dbs.get(ctx).is_some_and(|db| db.contains(atom))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledBridgeRule {
    op: Symbol,
    next: bool,
    head: Pattern,
    positive: Vec<(usize, Pattern)>,
    negative: Vec<(usize, Pattern)>,
    nvars: usize,
    free: Vec<usize>,
}

impl CompiledBridgeRule {
    pub(crate) fn new(rule: &BridgeRule) -> Self {
        let mut vars = VarTable::default();
        let positive: Vec<(usize, Pattern)> = rule
            .body
            .iter()
            .filter(|l| !l.negated)
            .map(|l| (l.context, vars.compile(&l.atom)))
            .collect();
        let negative = rule
            .body
            .iter()
            .filter(|l| l.negated)
            .map(|l| (l.context, vars.compile(&l.atom)))
            .collect();
        let head = vars.compile(&rule.head.atom);
        let free = free_slots(vars.len(), &positive.iter().map(|(_, p)| p).collect::<Vec<_>>());
        CompiledBridgeRule {
            op: rule.head.op.clone(),
            next: rule.head.next,
            head,
            positive,
            negative,
            nvars: vars.len(),
            free,
        }
    }
}

/// Heads of all rule instances whose positive literals hold in `positive`
/// and whose negated literals are absent from `negative`. Passing the same
/// state twice gives `app`; passing a fixed reducing state as `negative`
/// evaluates the rules of the corresponding reduct.
pub(crate) fn applicable(
    rules: &[CompiledBridgeRule],
    positive: &StateIndex,
    negative: &StateIndex,
    pool: &ConstantPool,
) -> BTreeSet<OperationalFormula> {
    let mut out = BTreeSet::new();
    for rule in rules {
        let rels: Vec<_> = rule
            .positive
            .iter()
            .map(|(ctx, p)| {
                (
                    positive
                        .dbs
                        .get(*ctx)
                        .and_then(|db| db.relation(&p.predicate, p.arity())),
                    p,
                )
            })
            .collect();
        join(&rels, rule.nvars, &rule.free, pool.symbols(), &mut |b| {
            if rule
                .negative
                .iter()
                .all(|(ctx, p)| !negative.contains(*ctx, &p.ground(b)))
            {
                out.insert(OperationalFormula {
                    op: rule.op.clone(),
                    formula: rule.head.ground(b),
                    next: rule.next,
                });
            }
            true
        });
    }
    out
}

/// Whether `atom` is an instance of `pattern`.
pub(crate) fn matches(pattern: &Atom, atom: &GroundAtom) -> bool {
    if pattern.predicate != atom.predicate || pattern.arity() != atom.arity() {
        return false;
    }
    let mut seen: Vec<(&Symbol, &Symbol)> = Vec::new();
    for (t, c) in pattern.terms.iter().zip(&atom.args) {
        match t {
            Term::Const(k) => {
                if k != c {
                    return false;
                }
            }
            Term::Var(v) => match seen.iter().find(|(w, _)| *w == v) {
                Some((_, bound)) if *bound != c => return false,
                Some(_) => {}
                None => seen.push((v, c)),
            },
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::belief::BeliefSet;

    fn set(atoms: &[&str]) -> BeliefSet {
        atoms.iter().map(|a| GroundAtom::prop(a)).collect()
    }

    fn var(v: &str) -> Term {
        Term::Var(Symbol::new(v))
    }

    #[test]
    fn grounding_enumerates_pool() {
        let rule = BridgeRule::new(
            Head::add(Atom::new("P", vec![var("x")])),
            vec![BridgeLiteral::pos(0, Atom::new("Q", vec![var("x")]))],
        );
        let pool = ConstantPool::from_iter([Symbol::new("a"), Symbol::new("b")]);
        assert_eq!(ground(&[rule], &pool).len(), 2);

        let ground_rule = BridgeRule::new(Head::add(Atom::new("p", vec![])), vec![]);
        assert_eq!(ground(std::slice::from_ref(&ground_rule), &pool), vec![ground_rule]);
    }

    #[test]
    fn satisfaction() {
        let s = BeliefState::new(vec![set(&["p"])]);
        assert!(satisfies(&s, &BridgeLiteral::pos(0, GroundAtom::prop("p"))));
        assert!(satisfies(&s, &BridgeLiteral::neg(0, GroundAtom::prop("q"))));
        let s2 = BeliefState::new(vec![set(&["p"]), set(&[])]);
        assert!(!satisfies(&s2, &BridgeLiteral::pos(1, GroundAtom::prop("p"))));
    }

    #[test]
    fn split() {
        let heads: BTreeSet<_> = [
            OperationalFormula::add(GroundAtom::prop("p")),
            OperationalFormula::add_next(GroundAtom::prop("q")),
        ]
        .into_iter()
        .collect();
        let (now, next) = split_now_next(&heads);
        assert_eq!(
            now,
            [OperationalFormula::add(GroundAtom::prop("p"))].into_iter().collect()
        );
        assert_eq!(
            next,
            [OperationalFormula::add(GroundAtom::prop("q"))].into_iter().collect()
        );
        let (n, x) = split_now_next(&BTreeSet::new());
        assert!(n.is_empty() && x.is_empty());

        let both: BTreeSet<_> = [
            OperationalFormula::add(GroundAtom::prop("p")),
            OperationalFormula::add_next(GroundAtom::prop("p")),
        ]
        .into_iter()
        .collect();
        let (now, next) = split_now_next(&both);
        assert_eq!(now, next);
    }

    #[test]
    fn pattern_matching_respects_repeated_variables() {
        let pat = Atom::new("e", vec![var("x"), var("x")]);
        assert!(matches(&pat, &GroundAtom::new("e", vec!["a".into(), "a".into()])));
        assert!(!matches(&pat, &GroundAtom::new("e", vec!["a".into(), "b".into()])));
    }
}
