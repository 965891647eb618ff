//! Context logics: the plug-in point for heterogeneous knowledge.
//!
//! A logic decides which belief sets a knowledge base accepts, optionally
//! provides a reduction function, and reports the structural properties the
//! solvers rely on (monotonicity, a least belief set).

pub mod datalog;
pub mod el;
pub mod normal_lp;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bridge::ConstantPool;
use crate::error::Result;
use crate::kernel::belief::BeliefSet;
use crate::kernel::kb::{Kb, Theory};

pub use datalog::acc_datalog;
pub use el::acc_el;
pub use normal_lp::{acc_normal_lp, gl_reduct};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicKind {
    Identity,
    Datalog,
    NormalLp,
    El,
}

impl LogicKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LogicKind::Identity => "identity",
            LogicKind::Datalog => "datalog",
            LogicKind::NormalLp => "normal-lp",
            LogicKind::El => "el",
        }
    }

    pub fn logic(self) -> Arc<dyn ContextLogic> {
        match self {
            LogicKind::Identity => Arc::new(IdentityLogic),
            LogicKind::Datalog => Arc::new(DatalogLogic),
            LogicKind::NormalLp => Arc::new(NormalLpLogic),
            LogicKind::El => Arc::new(ElLogic),
        }
    }
}

impl fmt::Display for LogicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LogicKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "identity" => Ok(LogicKind::Identity),
            "datalog" => Ok(LogicKind::Datalog),
            "normal-lp" => Ok(LogicKind::NormalLp),
            "el" => Ok(LogicKind::El),
            other => Err(format!("unknown logic `{other}`")),
        }
    }
}

/// A logic `(KB, BS, ACC)` with an optional reduction function.
///
/// `acc` returns the single accepted belief set; every shipped logic is
/// deterministic. The pool supplies the constants of the signature for
/// logics whose rules are grounded over it.
pub trait ContextLogic: fmt::Debug + Send + Sync {
    fn kind(&self) -> LogicKind;

    fn acc(&self, kb: &Kb, pool: &ConstantPool) -> Result<BeliefSet>;

    /// `red(kb, s)`; `None` when the logic is not reducible.
    fn reduce(&self, kb: &Kb, s: &BeliefSet) -> Option<Kb>;

    /// ACC is a singleton and ⊆-monotone in the knowledge base.
    fn is_monotone(&self) -> bool;

    /// The least element of BS, if the logic is normal.
    fn least_element(&self) -> Option<BeliefSet> {
        Some(BeliefSet::new())
    }

    /// Problems with the theory part of a knowledge base.
    fn check_kb(&self, kb: &Kb) -> Vec<String>;
}

/// Identity logic: the knowledge base is its own belief set.
#[derive(Debug, Clone, Copy)]
pub struct IdentityLogic;

pub fn acc_observation(kb: &Kb) -> BeliefSet {
    kb.facts().iter().cloned().collect()
}

impl ContextLogic for IdentityLogic {
    fn kind(&self) -> LogicKind {
        LogicKind::Identity
    }

    fn acc(&self, kb: &Kb, _pool: &ConstantPool) -> Result<BeliefSet> {
        Ok(acc_observation(kb))
    }

    fn reduce(&self, kb: &Kb, _s: &BeliefSet) -> Option<Kb> {
        Some(kb.clone())
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn check_kb(&self, kb: &Kb) -> Vec<String> {
        match kb.theory() {
            Theory::None => vec![],
            _ => vec!["identity knowledge bases hold facts only".into()],
        }
    }
}

/// Definite datalog under least-model semantics.
#[derive(Debug, Clone, Copy)]
pub struct DatalogLogic;

impl ContextLogic for DatalogLogic {
    fn kind(&self) -> LogicKind {
        LogicKind::Datalog
    }

    fn acc(&self, kb: &Kb, pool: &ConstantPool) -> Result<BeliefSet> {
        acc_datalog(kb, pool)
    }

    fn reduce(&self, kb: &Kb, _s: &BeliefSet) -> Option<Kb> {
        Some(kb.clone())
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn check_kb(&self, kb: &Kb) -> Vec<String> {
        let mut out = Vec::new();
        match kb.theory() {
            Theory::None => {}
            Theory::Program(p) => {
                for (k, r) in p.rules().iter().enumerate() {
                    if !r.is_definite() {
                        out.push(format!("rule {}: default negation in a datalog context: {r}", k + 1));
                    }
                    if !r.is_safe() {
                        out.push(format!("rule {}: unsafe rule: {r}", k + 1));
                    }
                }
            }
            _ => out.push("datalog knowledge bases hold rules and facts".into()),
        }
        out
    }
}

/// Normal logic programs; ACC returns the true atoms of the well-founded
/// model, `red` is the Gelfond-Lifschitz reduct.
#[derive(Debug, Clone, Copy)]
pub struct NormalLpLogic;

impl ContextLogic for NormalLpLogic {
    fn kind(&self) -> LogicKind {
        LogicKind::NormalLp
    }

    fn acc(&self, kb: &Kb, pool: &ConstantPool) -> Result<BeliefSet> {
        acc_normal_lp(kb, pool)
    }

    fn reduce(&self, kb: &Kb, s: &BeliefSet) -> Option<Kb> {
        Some(normal_lp::reduce_lazily(kb, s))
    }

    fn is_monotone(&self) -> bool {
        false
    }

    fn check_kb(&self, kb: &Kb) -> Vec<String> {
        match kb.theory() {
            Theory::None | Theory::Program(_) | Theory::Reduced(_) => vec![],
            Theory::Ontology(_) => vec!["normal-lp knowledge bases hold rules and facts".into()],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ElLogic;

impl ContextLogic for ElLogic {
    fn kind(&self) -> LogicKind {
        LogicKind::El
    }

    fn acc(&self, kb: &Kb, _pool: &ConstantPool) -> Result<BeliefSet> {
        acc_el(kb)
    }

    fn reduce(&self, kb: &Kb, _s: &BeliefSet) -> Option<Kb> {
        Some(kb.clone())
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn check_kb(&self, kb: &Kb) -> Vec<String> {
        let mut out = Vec::new();
        match kb.theory() {
            Theory::None => {}
            Theory::Ontology(o) => out.extend(o.check()),
            _ => out.push("el knowledge bases hold axioms and assertions".into()),
        }
        for f in kb.facts() {
            if !(1..=2).contains(&f.arity()) {
                out.push(format!("`{f}` is neither a concept nor a role assertion"));
            }
        }
        out
    }
}
