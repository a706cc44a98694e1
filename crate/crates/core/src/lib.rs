//! A workbench for the modal μ-calculus: syntax, finite-model semantics,
//! a proof kernel for the natural deduction system, and interactive proof
//! sessions.

pub mod kernel;
pub mod parser;
pub mod semantics;
pub mod session;
pub mod syntax;
