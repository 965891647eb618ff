use std::fmt;

use serde::{Serialize, Serializer};

use super::atom::{Atom, GroundAtom, Symbol};

/// A ground operational formula `op(s)`, possibly wrapped in `next`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationalFormula {
    pub op: Symbol,
    pub formula: GroundAtom,
    pub next: bool,
}

impl OperationalFormula {
    pub fn add(formula: GroundAtom) -> Self {
        OperationalFormula {
            op: Symbol::new("add"),
            formula,
            next: false,
        }
    }

    pub fn add_next(formula: GroundAtom) -> Self {
        OperationalFormula {
            next: true,
            ..OperationalFormula::add(formula)
        }
    }

    /// The same formula without the `next` wrapper.
    pub fn unwrapped(&self) -> OperationalFormula {
        OperationalFormula {
            next: false,
            ..self.clone()
        }
    }
}

impl fmt::Display for OperationalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.next {
            write!(f, "next({}({}))", self.op, self.formula)
        } else {
            write!(f, "{}({})", self.op, self.formula)
        }
    }
}

impl Serialize for OperationalFormula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Schematic bridge-rule head.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Head {
    pub op: Symbol,
    pub atom: Atom,
    pub next: bool,
}

impl Head {
    pub fn add(atom: Atom) -> Self {
        Head {
            op: Symbol::new("add"),
            atom,
            next: false,
        }
    }

    pub fn add_next(atom: Atom) -> Self {
        Head {
            next: true,
            ..Head::add(atom)
        }
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.next {
            write!(f, "next({}({}))", self.op, self.atom)
        } else {
            write!(f, "{}({})", self.op, self.atom)
        }
    }
}

/// `(r:b)` or `not (r:b)`. `context` is a 0-based index; it prints 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BridgeLiteral {
    pub context: usize,
    pub atom: Atom,
    pub negated: bool,
}

impl BridgeLiteral {
    pub fn pos(context: usize, atom: impl Into<Atom>) -> Self {
        BridgeLiteral {
            context,
            atom: atom.into(),
            negated: false,
        }
    }

    pub fn neg(context: usize, atom: impl Into<Atom>) -> Self {
        BridgeLiteral {
            context,
            atom: atom.into(),
            negated: true,
        }
    }
}

impl fmt::Display for BridgeLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "({}:{})", self.context + 1, self.atom)
    }
}

/// `head <- body`. Variables are allowed; see [`crate::bridge::ground`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BridgeRule {
    pub head: Head,
    pub body: Vec<BridgeLiteral>,
}

impl BridgeRule {
    pub fn new(head: Head, body: Vec<BridgeLiteral>) -> Self {
        BridgeRule { head, body }
    }

    pub fn is_ground(&self) -> bool {
        self.head.atom.is_ground() && self.body.iter().all(|l| l.atom.is_ground())
    }

    pub fn has_negation(&self) -> bool {
        self.body.iter().any(|l| l.negated)
    }

    /// Every head variable occurs in some positive body literal.
    pub fn is_safe(&self) -> bool {
        self.head.atom.variables().all(|v| {
            self.body
                .iter()
                .filter(|l| !l.negated)
                .any(|l| l.atom.variables().any(|w| w == v))
        })
    }

    pub fn variables(&self) -> Vec<Symbol> {
        let mut vars: Vec<Symbol> = Vec::new();
        let atoms = std::iter::once(&self.head.atom).chain(self.body.iter().map(|l| &l.atom));
        for a in atoms {
            for v in a.variables() {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        vars
    }
}

impl fmt::Display for BridgeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" <- ")?;
            for (k, l) in self.body.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}
