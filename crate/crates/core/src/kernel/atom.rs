//! Symbols, terms and atoms.
//!
//! Every belief and every knowledge-base statement that is not a rule or an
//! axiom is a [`GroundAtom`]. Schematic atoms ([`Atom`]) may carry variables;
//! a variable is written as a single lowercase letter.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An interned-by-sharing name: predicate, constant, operation or variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the name reads as a schematic variable (`x`, `y`, `z`, ...).
    pub fn is_variable_name(name: &str) -> bool {
        let mut chars = name.chars();
        matches!((chars.next(), chars.next()), (Some(c), None) if c.is_ascii_lowercase())
    }

    /// Whether the symbol can be printed as a constant without quotes.
    fn is_bare_constant(&self) -> bool {
        let s = self.as_str();
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !Symbol::is_variable_name(s)
    }

    pub(crate) fn write_constant(&self, f: &mut impl fmt::Write) -> fmt::Result {
        if self.is_bare_constant() {
            f.write_str(self.as_str())
        } else {
            f.write_char('\'')?;
            for c in self.as_str().chars() {
                if c == '\'' || c == '\\' {
                    f.write_char('\\')?;
                }
                f.write_char(c)?;
            }
            f.write_char('\'')
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Symbol),
    Const(Symbol),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v.as_str()),
            Term::Const(c) => c.write_constant(f),
        }
    }
}

/// A variable-free atom `Pred(c1,...,ck)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: Symbol,
    pub args: Vec<Symbol>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<Symbol>, args: Vec<Symbol>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }

    /// A zero-arity atom.
    pub fn prop(predicate: &str) -> Self {
        GroundAtom::new(predicate, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            terms: self.args.iter().cloned().map(Term::Const).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.predicate.as_str())?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (k, a) in self.args.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                a.write_constant(f)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GroundAtom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::syntax::parse_ground_atom(s)
    }
}

impl Serialize for GroundAtom {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroundAtom {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A possibly non-ground atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Symbol,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<Symbol>, terms: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            terms,
        }
    }

    pub fn arity(&self) -> usize {
        self.terms.len()
    }

    pub fn is_ground(&self) -> bool {
        self.terms.iter().all(|t| !t.is_var())
    }

    pub fn variables(&self) -> impl Iterator<Item = &Symbol> {
        self.terms.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }

    pub fn constants(&self) -> impl Iterator<Item = &Symbol> {
        self.terms.iter().filter_map(|t| match t {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        })
    }

    /// The ground atom, if no variables occur.
    pub fn as_ground(&self) -> Option<GroundAtom> {
        let args = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom::new(self.predicate.clone(), args))
    }

    /// Instantiate under `subst`; panics if a variable is unbound.
    pub fn substitute(&self, subst: &dyn Fn(&Symbol) -> Symbol) -> GroundAtom {
        GroundAtom::new(
            self.predicate.clone(),
            self.terms
                .iter()
                .map(|t| match t {
                    Term::Const(c) => c.clone(),
                    Term::Var(v) => subst(v),
                })
                .collect(),
        )
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.predicate.as_str())?;
        if !self.terms.is_empty() {
            f.write_str("(")?;
            for (k, t) in self.terms.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl From<GroundAtom> for Atom {
    fn from(g: GroundAtom) -> Self {
        g.to_atom()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_quote_when_needed() {
        let a = GroundAtom::new("HTSCode", vec!["c1".into(), "07020020".into(), "x".into()]);
        assert_eq!(a.to_string(), "HTSCode(c1,'07020020','x')");
        assert_eq!(GroundAtom::prop("p").to_string(), "p");
    }

    #[test]
    fn variable_names() {
        assert!(Symbol::is_variable_name("x"));
        assert!(!Symbol::is_variable_name("xy"));
        assert!(!Symbol::is_variable_name("X"));
    }
}
