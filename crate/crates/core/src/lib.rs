//! Proof kernel and cut-elimination workbench for constructive natural
//! deduction modulo rewriting.
//!
//! The crate is layered bottom-up: [`syntax`] and [`rewriting`] define the
//! object language and its congruence, [`proofs`] checks proof terms in
//! three rule systems, [`reduction`] eliminates cuts, [`tva`] and
//! [`semantics`] provide truth values algebras and models, [`cutfree`]
//! searches for normal proofs and builds the context model, and
//! [`frontend`] parses and prints the text formats.

pub mod budgets;
pub mod cutfree;
pub mod frontend;
pub mod proofs;
pub mod reduction;
pub mod rewriting;
pub mod semantics;
pub mod syntax;
pub mod tva;

pub use budgets::Budgets;
