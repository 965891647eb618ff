//! Seeded random systems and observation streams.
//!
//! Systems are produced as source text and parsed, so every instance can be
//! printed and replayed. Reasoning contexts use identity, datalog or
//! stratified normal-lp logics; predicates are unary over a pool of one or
//! two constants, which keeps each context at four ground atoms or fewer.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bridge::ConstantPool;
use crate::evolution::{ObservationInstant, ObservationSequence};
use crate::kernel::atom::GroundAtom;
use crate::kernel::belief::BeliefSet;
use crate::kernel::context::Emcs;
use crate::kernel::kb::Kb;
use crate::kernel::rules::OperationalFormula;
use crate::syntax::parse_system;

#[derive(Clone, Debug)]
pub struct Params {
    pub max_contexts: usize,
    /// Predicates per context are chosen so that predicates × constants
    /// stays at or below this.
    pub max_atoms: usize,
    pub max_bridge_rules: usize,
    pub max_kb_rules: usize,
    pub negation_probability: f64,
    /// Chance that a bridge rule head is `next`-wrapped (evolving systems only).
    pub next_probability: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            max_contexts: 3,
            max_atoms: 4,
            max_bridge_rules: 5,
            max_kb_rules: 2,
            negation_probability: 0.5,
            next_probability: 0.3,
        }
    }
}

/// A normal program with two belief sets `smaller ⊆ larger` and an `add`
/// operation, for checking how the reduct interacts with management.
#[derive(Clone, Debug)]
pub struct LpQuadruple {
    pub kb: Kb,
    pub smaller: BeliefSet,
    pub larger: BeliefSet,
    pub op: OperationalFormula,
    pub pool: ConstantPool,
}

pub struct Generator {
    rng: ChaCha8Rng,
    params: Params,
}

struct Shape {
    /// `(name, kind, predicates)`; observation contexts come first.
    contexts: Vec<(String, &'static str, Vec<String>)>,
    constants: Vec<String>,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator::with_params(seed, Params::default())
    }

    pub fn with_params(seed: u64, params: Params) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            params,
        }
    }

    /// A static system without observation contexts.
    pub fn system_text(&mut self) -> String {
        let n = self.rng.gen_range(1..=self.params.max_contexts);
        self.text(0, n, false)
    }

    /// One or two observation contexts followed by reasoning contexts,
    /// with some bridge heads `next`-wrapped.
    pub fn evolving_system_text(&mut self) -> String {
        let ell = self.rng.gen_range(1..=2);
        let n = self.rng.gen_range(1..=self.params.max_contexts);
        self.text(ell, n, true)
    }

    pub fn system(&mut self) -> Emcs {
        let text = self.system_text();
        parse_system(&text).unwrap_or_else(|e| panic!("generated system does not parse: {e}\n{text}"))
    }

    pub fn evolving_system(&mut self) -> Emcs {
        let text = self.evolving_system_text();
        parse_system(&text).unwrap_or_else(|e| panic!("generated system does not parse: {e}\n{text}"))
    }

    /// `len` instants, each observation context seeing a random subset of
    /// its declared atoms over the system's constants.
    pub fn stream(&mut self, system: &Emcs, len: usize) -> ObservationSequence {
        let ell = system.obs_count();
        let constants: Vec<_> = system.declared_constants().iter().cloned().collect();
        let instants = (0..len)
            .map(|_| {
                let obs = (0..ell)
                    .map(|i| {
                        let mut set = BTreeSet::new();
                        let vocab = system.context(i).declared_vocab().cloned().unwrap_or_default();
                        for (pred, &arity) in &vocab {
                            for c in &constants {
                                if arity == 1 && self.rng.gen_bool(0.4) {
                                    set.insert(GroundAtom::new(pred.clone(), vec![c.clone()]));
                                }
                            }
                        }
                        set
                    })
                    .collect();
                ObservationInstant::new(obs)
            })
            .collect();
        ObservationSequence::new(instants)
    }

    /// Programs over `q0..q3` and constants `k1, k2`, not necessarily
    /// stratified.
    pub fn lp_quadruple(&mut self) -> LpQuadruple {
        let preds = ["q0", "q1", "q2", "q3"];
        let constants = ["k1", "k2"];
        let mut text = String::from("constants k1, k2;\ncontext L : normal-lp { kb {\n");
        for p in preds {
            for c in constants {
                if self.rng.gen_bool(0.2) {
                    writeln!(text, "{p}({c}).").unwrap();
                }
            }
        }
        for _ in 0..self.rng.gen_range(0..=5) {
            let term = self.constant_or_var(&constants.map(String::from));
            let mut body = vec![];
            if term == "x" || self.rng.gen_bool(0.5) {
                body.push(format!("{}({term})", preds.choose(&mut self.rng).unwrap()));
            }
            for _ in 0..self.rng.gen_range(0..=2) {
                body.push(format!("not {}({term})", preds.choose(&mut self.rng).unwrap()));
            }
            let head = preds.choose(&mut self.rng).unwrap();
            writeln!(text, "{head}({term}) <- {}.", body.join(", ")).unwrap();
        }
        text.push_str("} }\n");
        let sys = parse_system(&text).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{text}"));
        let atoms: Vec<GroundAtom> = preds
            .iter()
            .flat_map(|p| constants.iter().map(move |c| GroundAtom::new(*p, vec![(*c).into()])))
            .collect();
        let smaller: BeliefSet = atoms.iter().filter(|_| self.rng.gen_bool(0.3)).cloned().collect();
        let larger = atoms
            .iter()
            .filter(|a| smaller.contains(*a) || self.rng.gen_bool(0.3))
            .cloned()
            .collect();
        let op = OperationalFormula::add(atoms.choose(&mut self.rng).unwrap().clone());
        LpQuadruple {
            kb: sys.context(0).kb().clone(),
            smaller,
            larger,
            op,
            pool: sys.pool().clone(),
        }
    }

    fn shape(&mut self, ell: usize, n: usize) -> Shape {
        let nconst = self.rng.gen_range(1..=2);
        let constants = (1..=nconst).map(|k| format!("k{k}")).collect();
        let per_context = (self.params.max_atoms / nconst).max(1);
        let mut contexts = Vec::new();
        for i in 0..ell + n {
            let kind = if i < ell {
                "observation"
            } else {
                *["identity", "datalog", "normal-lp"].choose(&mut self.rng).unwrap()
            };
            let npred = self.rng.gen_range(1..=per_context);
            let name = format!("C{}", i + 1);
            let preds = (0..npred).map(|k| format!("{}p{k}", name.to_lowercase())).collect();
            contexts.push((name, kind, preds));
        }
        Shape { contexts, constants }
    }

    fn text(&mut self, ell: usize, n: usize, evolving: bool) -> String {
        let shape = self.shape(ell, n);
        let mut out = format!("constants {};\n", shape.constants.join(", "));
        for (i, (name, kind, preds)) in shape.contexts.iter().enumerate() {
            write!(out, "\ncontext {name} : {kind} {{\n").unwrap();
            let vocab: Vec<_> = preds.iter().map(|p| format!("{p}/1")).collect();
            writeln!(out, "  vocab {};", vocab.join(", ")).unwrap();
            if i >= ell {
                let kb = self.kb(kind, preds, &shape.constants);
                if !kb.is_empty() {
                    writeln!(out, "  kb {{\n{kb}  }}").unwrap();
                }
                let bridge = self.bridge(i, &shape, evolving);
                if !bridge.is_empty() {
                    writeln!(out, "  bridge {{\n{bridge}  }}").unwrap();
                }
            }
            out.push_str("}\n");
        }
        out
    }

    fn constant_or_var(&mut self, constants: &[String]) -> String {
        if self.rng.gen_bool(0.5) {
            "x".into()
        } else {
            constants.choose(&mut self.rng).unwrap().clone()
        }
    }

    fn kb(&mut self, kind: &str, preds: &[String], constants: &[String]) -> String {
        let mut out = String::new();
        for p in preds {
            for c in constants {
                if self.rng.gen_bool(0.3) {
                    writeln!(out, "    {p}({c}).").unwrap();
                }
            }
        }
        if kind == "identity" {
            return out;
        }
        // Stratification: a rule for predicate k only uses predicates up to
        // k positively and strictly below k negatively.
        for _ in 0..self.rng.gen_range(0..=self.params.max_kb_rules) {
            let h = self.rng.gen_range(0..preds.len());
            let mut body = vec![format!("{}(x)", preds[self.rng.gen_range(0..=h)])];
            if kind == "normal-lp" && h > 0 && self.rng.gen_bool(self.params.negation_probability) {
                body.push(format!("not {}(x)", preds[self.rng.gen_range(0..h)]));
            }
            writeln!(out, "    {}(x) <- {}.", preds[h], body.join(", ")).unwrap();
        }
        out
    }

    fn bridge(&mut self, i: usize, shape: &Shape, evolving: bool) -> String {
        let mut out = String::new();
        let (_, _, heads) = &shape.contexts[i];
        for _ in 0..self.rng.gen_range(0..=self.params.max_bridge_rules) {
            let nlits = self.rng.gen_range(1..=2);
            let mut body = Vec::new();
            let mut has_var = false;
            for _ in 0..nlits {
                let r = self.rng.gen_range(0..shape.contexts.len());
                let pred = shape.contexts[r].2.choose(&mut self.rng).unwrap().clone();
                // `x` only enters through a positive literal, so every rule is safe.
                let negated = self.rng.gen_bool(self.params.negation_probability);
                let term = if negated && !has_var {
                    shape.constants.choose(&mut self.rng).unwrap().clone()
                } else {
                    self.constant_or_var(&shape.constants)
                };
                has_var |= term == "x";
                let not = if negated { "not " } else { "" };
                body.push(format!("{not}(C{}:{pred}({term}))", r + 1));
            }
            let head_term = if has_var {
                "x".to_string()
            } else {
                shape.constants.choose(&mut self.rng).unwrap().clone()
            };
            let head = format!("add({}({head_term}))", heads.choose(&mut self.rng).unwrap());
            let head = if evolving && self.rng.gen_bool(self.params.next_probability) {
                format!("next({head})")
            } else {
                head
            };
            writeln!(out, "    {head} <- {}.", body.join(", ")).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::validate::validate;

    #[test]
    fn generated_systems_are_valid_and_reproducible() {
        for seed in 0..50 {
            let a = Generator::new(seed).system_text();
            assert_eq!(a, Generator::new(seed).system_text());
            let sys = parse_system(&a).unwrap();
            assert!(validate(&sys).is_empty(), "{a}\n{:?}", validate(&sys));
            assert!(sys.contexts().iter().all(|c| !c.is_observation()));
        }
    }

    #[test]
    fn evolving_systems_have_observation_contexts_and_streams() {
        for seed in 0..50 {
            let mut g = Generator::new(seed);
            let sys = g.evolving_system();
            assert!(validate(&sys).is_empty());
            assert!(sys.obs_count() >= 1);
            let obs = g.stream(&sys, 5);
            assert_eq!(obs.len(), 5);
            assert!(obs.instants().iter().all(|o| o.observations().len() == sys.obs_count()));
        }
    }
}
