//! Reasoning engine for evolving multi-context systems.
//!
//! A system is a sequence of contexts, each a knowledge base under its own
//! logic, linked by bridge rules whose heads are operations on the owning
//! knowledge base. Observation contexts receive a fresh knowledge base at
//! every time instant. The crate computes static and evolving equilibria,
//! grounded equilibria of reducible systems and the well-founded semantics,
//! and ships a brute-force oracle for cross-checking on small instances.

pub mod bridge;
pub mod equilibria;
pub mod error;
pub mod evolution;
pub mod kernel;
pub mod logics;
mod matching;
pub mod oracle;
pub mod syntax;

pub use error::{Error, Result};
pub use kernel::atom::{Atom, GroundAtom, Symbol, Term};
pub use kernel::belief::{BeliefSet, BeliefState};
pub use kernel::context::{mng_apply, output_projection, replace_kb, Emcs, EvolvingContext};
pub use kernel::kb::{Kb, Theory};
pub use kernel::rules::{BridgeLiteral, BridgeRule, Head, OperationalFormula};
pub use kernel::validate::{validate, warnings, Diagnostic};
pub use logics::LogicKind;
