//! Text formats: the `.emcs` system language, JSON-lines observation
//! streams, and state/trace records.
//!
//! ```text
//! constants a, 'b c';
//! context C1 : observation { vocab Obs/1; }
//! context C2 : normal-lp {
//!   vocab P/1, Q/1;
//!   ops add;
//!   kb { P(x) <- Q(x), not R(x). Q(a). }
//!   bridge { next(add(R(x))) <- (C1:Obs(x)). }
//! }
//! ```
//!
//! A single lowercase letter is a variable; other constants are bare words
//! or single-quoted. Bridge literals name their context by 1-based index or
//! by name. Ontology axioms use `sub`, `equiv`, `and`, `some r C`, `{o}`,
//! `top` and `bot`.

mod lexer;
mod parser;
mod print;
pub mod records;

pub use parser::{parse_ground_atom, parse_system};
pub use print::serialize_system;
