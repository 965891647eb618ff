//! Core data model: atoms, belief states, knowledge bases, bridge rules,
//! contexts and whole-system validation.

pub mod atom;
pub mod belief;
pub mod context;
pub mod kb;
pub mod rules;
pub mod validate;
