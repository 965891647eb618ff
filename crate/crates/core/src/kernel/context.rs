use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::atom::{GroundAtom, Symbol};
use super::belief::{BeliefSet, BeliefState};
use super::kb::Kb;
use super::rules::{BridgeRule, OperationalFormula};
use crate::bridge::{matches, CompiledBridgeRule, ConstantPool};
use crate::error::{Error, Result};
use crate::logics::{ContextLogic, LogicKind};

/// Predicate name to arity.
pub type Vocabulary = BTreeMap<Symbol, usize>;

/// The only operation with management semantics.
pub const ADD: &str = "add";

/// One context `(L, kb, br, OP, mng)`.
///
/// Cloning is cheap: the bridge rules and their compiled form are shared, so
/// replacing the knowledge base keeps the rule index.
#[derive(Clone)]
pub struct EvolvingContext {
    name: Symbol,
    logic: Arc<dyn ContextLogic>,
    kb: Kb,
    rules: Arc<Vec<BridgeRule>>,
    compiled: Arc<OnceLock<Vec<CompiledBridgeRule>>>,
    op_base: BTreeSet<Symbol>,
    vocab: Option<Vocabulary>,
    observation: bool,
}

impl EvolvingContext {
    pub fn new(name: &str, kind: LogicKind, kb: Kb) -> Self {
        EvolvingContext::with_logic(name, kind.logic(), kb)
    }

    pub fn with_logic(name: &str, logic: Arc<dyn ContextLogic>, kb: Kb) -> Self {
        EvolvingContext {
            name: Symbol::new(name),
            logic,
            kb,
            rules: Arc::default(),
            compiled: Arc::default(),
            op_base: [Symbol::new(ADD)].into_iter().collect(),
            vocab: None,
            observation: false,
        }
    }

    /// An observation context: identity logic, knowledge base supplied per
    /// instant.
    pub fn observation(name: &str) -> Self {
        EvolvingContext {
            observation: true,
            ..EvolvingContext::new(name, LogicKind::Identity, Kb::default())
        }
    }

    pub fn with_bridge_rules(mut self, rules: Vec<BridgeRule>) -> Self {
        self.rules = Arc::new(rules);
        self.compiled = Arc::default();
        self
    }

    pub fn with_vocab(mut self, vocab: Vocabulary) -> Self {
        self.vocab = Some(vocab);
        self
    }

    pub fn with_ops(mut self, ops: BTreeSet<Symbol>) -> Self {
        self.op_base = ops;
        self
    }

    pub fn name(&self) -> &Symbol {
        &self.name
    }

    pub fn logic(&self) -> &Arc<dyn ContextLogic> {
        &self.logic
    }

    pub fn kind(&self) -> LogicKind {
        self.logic.kind()
    }

    pub fn kb(&self) -> &Kb {
        &self.kb
    }

    pub fn bridge_rules(&self) -> &[BridgeRule] {
        &self.rules
    }

    pub fn op_base(&self) -> &BTreeSet<Symbol> {
        &self.op_base
    }

    /// The vocabulary as declared in the source, if any.
    pub fn declared_vocab(&self) -> Option<&Vocabulary> {
        self.vocab.as_ref()
    }

    pub fn is_observation(&self) -> bool {
        self.observation
    }

    pub(crate) fn compiled_rules(&self) -> &[CompiledBridgeRule] {
        self.compiled
            .get_or_init(|| self.rules.iter().map(CompiledBridgeRule::new).collect())
    }

    /// `mng(ops, kb)` for this context's management base. `position` is the
    /// 1-based index used in error reports.
    pub fn mng(&self, position: usize, ops: &BTreeSet<OperationalFormula>, kb: &Kb) -> Result<Kb> {
        if ops.is_empty() {
            return Ok(kb.clone());
        }
        let mut out = kb.clone();
        for op in ops {
            if op.next {
                return Err(Error::NextWrapped {
                    context: position,
                    formula: op.to_string(),
                });
            }
            if !self.op_base.contains(&op.op) {
                return Err(Error::UndeclaredOperation {
                    context: position,
                    op: op.op.clone(),
                });
            }
            if op.op.as_str() != ADD {
                return Err(Error::UnsupportedOperation {
                    context: position,
                    op: op.op.clone(),
                });
            }
            out.insert(op.formula.clone());
        }
        Ok(out)
    }

    /// Whether every declared operation is known to only grow the knowledge
    /// base.
    pub fn ops_monotone(&self) -> bool {
        self.op_base.iter().all(|op| op.as_str() == ADD)
    }

    /// `C[k]`.
    pub fn replace_kb(&self, kb: Kb) -> EvolvingContext {
        EvolvingContext { kb, ..self.clone() }
    }
}

impl fmt::Debug for EvolvingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvolvingContext")
            .field("name", &self.name)
            .field("kind", &self.kind())
            .field("observation", &self.observation)
            .field("kb", &self.kb)
            .field("rules", &self.rules)
            .field("op_base", &self.op_base)
            .field("vocab", &self.vocab)
            .finish()
    }
}

impl PartialEq for EvolvingContext {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.kind() == other.kind()
            && self.observation == other.observation
            && self.kb == other.kb
            && self.rules == other.rules
            && self.op_base == other.op_base
            && self.vocab == other.vocab
    }
}

/// `mng_i(ops, kb_i)` for a context on its own knowledge base.
pub fn mng_apply(context: &EvolvingContext, ops: &BTreeSet<OperationalFormula>) -> Result<Kb> {
    context.mng(1, ops, context.kb())
}

/// `C[k]`, rejecting facts outside the declared vocabulary.
pub fn replace_kb(context: &EvolvingContext, kb: Kb) -> Result<EvolvingContext> {
    if let Some(vocab) = context.declared_vocab() {
        let sig = context.kb().signature();
        for f in kb.facts() {
            let known = vocab.get(&f.predicate).or_else(|| sig.get(&f.predicate));
            if known != Some(&f.arity()) {
                return Err(Error::Vocabulary {
                    context: 1,
                    atom: f.to_string(),
                });
            }
        }
    }
    Ok(context.replace_kb(kb))
}

/// An evolving multi-context system. Observation contexts come first.
#[derive(Clone, Debug)]
pub struct Emcs {
    contexts: Vec<EvolvingContext>,
    constants: BTreeSet<Symbol>,
    vocab: Arc<Vec<Vocabulary>>,
    pool: ConstantPool,
}

impl PartialEq for Emcs {
    fn eq(&self, other: &Self) -> bool {
        self.contexts == other.contexts && self.constants == other.constants
    }
}

impl Emcs {
    pub fn new(contexts: Vec<EvolvingContext>) -> Self {
        Emcs::with_constants(contexts, BTreeSet::new())
    }

    /// A system whose constant pool additionally contains `constants`.
    pub fn with_constants(contexts: Vec<EvolvingContext>, constants: BTreeSet<Symbol>) -> Self {
        let vocab = Arc::new(effective_vocabularies(&contexts));
        let pool = pool_of(&contexts, &constants);
        Emcs {
            contexts,
            constants,
            vocab,
            pool,
        }
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn contexts(&self) -> &[EvolvingContext] {
        &self.contexts
    }

    pub fn context(&self, i: usize) -> &EvolvingContext {
        &self.contexts[i]
    }

    /// Constants declared at top level, beyond those occurring in the system.
    pub fn declared_constants(&self) -> &BTreeSet<Symbol> {
        &self.constants
    }

    pub fn pool(&self) -> &ConstantPool {
        &self.pool
    }

    /// `ℓ`, the length of the leading run of observation contexts.
    pub fn obs_count(&self) -> usize {
        self.contexts.iter().take_while(|c| c.is_observation()).count()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.contexts.iter().position(|c| c.name().as_str() == name)
    }

    pub fn kbs(&self) -> Vec<Kb> {
        self.contexts.iter().map(|c| c.kb().clone()).collect()
    }

    /// Declared vocabulary extended by everything the system itself uses
    /// for context `i`: its knowledge base, its own bridge heads and every
    /// body literal that queries it.
    pub fn vocabulary(&self, i: usize) -> &Vocabulary {
        &self.vocab[i]
    }

    /// The same system with every knowledge base replaced.
    pub fn with_kbs(&self, kbs: Vec<Kb>) -> Emcs {
        assert_eq!(kbs.len(), self.len(), "one knowledge base per context");
        let contexts: Vec<_> = self.contexts.iter().zip(kbs).map(|(c, kb)| c.replace_kb(kb)).collect();
        let pool = pool_of(&contexts, &self.constants);
        Emcs {
            contexts,
            constants: self.constants.clone(),
            vocab: self.vocab.clone(),
            pool,
        }
    }

    pub(crate) fn check_shape(&self, s: &BeliefState) -> Result<()> {
        if s.len() != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                found: s.len(),
            });
        }
        Ok(())
    }

    /// Checks that `atom` is in the vocabulary of context `i`.
    pub(crate) fn check_atom(&self, i: usize, atom: &GroundAtom) -> Result<()> {
        if self.vocab[i].get(&atom.predicate) == Some(&atom.arity()) {
            Ok(())
        } else {
            Err(Error::Vocabulary {
                context: i + 1,
                atom: atom.to_string(),
            })
        }
    }
}

fn effective_vocabularies(contexts: &[EvolvingContext]) -> Vec<Vocabulary> {
    let mut vocab: Vec<Vocabulary> = contexts
        .iter()
        .map(|c| {
            let mut v = c.declared_vocab().cloned().unwrap_or_default();
            for (p, a) in c.kb().signature() {
                v.entry(p).or_insert(a);
            }
            for r in c.bridge_rules() {
                v.entry(r.head.atom.predicate.clone()).or_insert(r.head.atom.arity());
            }
            v
        })
        .collect();
    for c in contexts {
        for r in c.bridge_rules() {
            for l in &r.body {
                if let Some(v) = vocab.get_mut(l.context) {
                    v.entry(l.atom.predicate.clone()).or_insert(l.atom.arity());
                }
            }
        }
    }
    vocab
}

fn pool_of(contexts: &[EvolvingContext], declared: &BTreeSet<Symbol>) -> ConstantPool {
    let mut all = declared.clone();
    for c in contexts {
        all.extend(c.kb().constants());
        for r in c.bridge_rules() {
            all.extend(r.head.atom.constants().cloned());
            for l in &r.body {
                all.extend(l.atom.constants().cloned());
            }
        }
    }
    all.into_iter().collect()
}

/// `S'_i = S_i ∩ OUT_i`, where `OUT_i` holds the beliefs of context `i`
/// that instantiate some bridge-rule body literal of the system.
pub fn output_projection(s: &BeliefState, system: &Emcs) -> BeliefState {
    let mut patterns: Vec<Vec<&crate::kernel::atom::Atom>> = vec![Vec::new(); s.len()];
    for c in system.contexts() {
        for r in c.bridge_rules() {
            for l in &r.body {
                if let Some(p) = patterns.get_mut(l.context) {
                    p.push(&l.atom);
                }
            }
        }
    }
    BeliefState::new(
        s.components()
            .iter()
            .zip(&patterns)
            .map(|(si, pats)| -> BeliefSet {
                si.iter()
                    .filter(|b| pats.iter().any(|p| matches(p, b)))
                    .cloned()
                    .collect()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::atom::Atom;
    use crate::kernel::rules::{BridgeLiteral, Head};

    fn prop(p: &str) -> GroundAtom {
        GroundAtom::prop(p)
    }

    fn ops(formulas: &[&str]) -> BTreeSet<OperationalFormula> {
        formulas.iter().map(|f| OperationalFormula::add(prop(f))).collect()
    }

    #[test]
    fn mng_add() {
        let c = EvolvingContext::new("C", LogicKind::Identity, Kb::from_facts([prop("q")]));
        assert_eq!(mng_apply(&c, &BTreeSet::new()).unwrap(), *c.kb());
        assert_eq!(
            mng_apply(&c, &ops(&["p"])).unwrap(),
            Kb::from_facts([prop("p"), prop("q")])
        );
        let c = EvolvingContext::new("C", LogicKind::Identity, Kb::from_facts([prop("p")]));
        assert_eq!(mng_apply(&c, &ops(&["p"])).unwrap(), Kb::from_facts([prop("p")]));
    }

    #[test]
    fn mng_rejects_undeclared_and_next() {
        let c = EvolvingContext::new("C", LogicKind::Identity, Kb::default()).with_ops(BTreeSet::new());
        assert!(matches!(
            mng_apply(&c, &ops(&["p"])),
            Err(Error::UndeclaredOperation { .. })
        ));
        let c = EvolvingContext::new("C", LogicKind::Identity, Kb::default());
        let next = [OperationalFormula::add_next(prop("p"))].into_iter().collect();
        assert!(matches!(mng_apply(&c, &next), Err(Error::NextWrapped { .. })));
        let c = c.with_ops([Symbol::new("del")].into_iter().collect());
        let del = [OperationalFormula {
            op: Symbol::new("del"),
            formula: prop("p"),
            next: false,
        }]
        .into_iter()
        .collect();
        assert!(matches!(mng_apply(&c, &del), Err(Error::UnsupportedOperation { .. })));
    }

    #[test]
    fn replace_kb_checks_declared_vocabulary() {
        let c = EvolvingContext::observation("O").with_vocab([(Symbol::new("o"), 0)].into_iter().collect());
        assert_eq!(replace_kb(&c, c.kb().clone()).unwrap(), c);
        let r = replace_kb(&c, Kb::from_facts([prop("o")])).unwrap();
        assert_eq!(r.kb().facts().len(), 1);
        assert!(replace_kb(&c, Kb::from_facts([prop("x")])).is_err());
    }

    #[test]
    fn projection() {
        let c1 = EvolvingContext::new("C1", LogicKind::Identity, Kb::default());
        let c2 =
            EvolvingContext::new("C2", LogicKind::Identity, Kb::default()).with_bridge_rules(vec![BridgeRule::new(
                Head::add(Atom::new("r", vec![])),
                vec![BridgeLiteral::pos(0, prop("p"))],
            )]);
        let sys = Emcs::new(vec![c1, c2]);
        let s = BeliefState::new(vec![
            [prop("p"), prop("q")].into_iter().collect(),
            [prop("r")].into_iter().collect(),
        ]);
        let expected = BeliefState::new(vec![[prop("p")].into_iter().collect(), BeliefSet::new()]);
        assert_eq!(output_projection(&s, &sys), expected);
        assert_eq!(output_projection(&expected, &sys), expected);

        let bare = Emcs::new(vec![EvolvingContext::new("C", LogicKind::Identity, Kb::default())]);
        let s = BeliefState::new(vec![[prop("p")].into_iter().collect()]);
        assert_eq!(output_projection(&s, &bare), BeliefState::empty(1));
    }

    #[test]
    fn observation_prefix_and_pool() {
        let sys = Emcs::new(vec![
            EvolvingContext::observation("O"),
            EvolvingContext::new(
                "C",
                LogicKind::Identity,
                Kb::from_facts([GroundAtom::new("P", vec!["a".into()])]),
            ),
        ]);
        assert_eq!(sys.obs_count(), 1);
        assert_eq!(sys.pool().symbols(), &[Symbol::new("a")]);
        assert_eq!(sys.index_of("C"), Some(1));
    }
}
