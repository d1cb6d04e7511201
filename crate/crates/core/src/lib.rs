//! Self-play conjecturing and proving over a toy equational rewrite system.
//!
//! A single count-based sequence model plays two roles. As conjecturer it
//! proposes new equations from a seed theorem, its proof, and a lemma used in
//! that proof; as prover it writes rewrite proofs that the [`kernel`] checks.
//! The [`selfplay`] loop curates both roles' training data from verified
//! attempts each iteration.

pub mod corpus;
pub mod kernel;
pub mod policy;
pub mod reporting;
pub mod seed;
pub mod selfplay;

pub use kernel::{Kernel, Proof, Statement, Term};
