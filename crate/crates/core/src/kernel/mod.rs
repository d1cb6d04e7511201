//! The toy formal system: terms, rewrite rules, the proof checker, and a
//! brute-force search oracle.

mod oracle;
mod parse;
mod proof;
mod rewrite;
mod rules;
mod term;
mod verify;

use std::sync::OnceLock;

pub use oracle::{OracleDepthError, MAX_ORACLE_DEPTH};
pub use parse::{parse_proof, parse_proof_with, parse_statement, parse_statement_with, parse_term, ParseError};
pub use proof::{Direction, Proof, ProofStep, Side};
pub use rewrite::{apply_rule, apply_rule_metered, match_pattern, BudgetExceeded, Meter, RewriteError};
pub use rules::{RewriteRule, RuleError, RuleLibrary, TRIVIAL_RULE};
pub use term::{Meta, Op, Pattern, Statement, Term};
pub use verify::{FailReason, VerificationOutcome, Verdict, DEFAULT_STEP_BUDGET};

/// Size bounds on terms accepted by the parser and produced by rewriting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_term_depth: usize,
    pub max_literal: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_term_depth: 8, max_literal: 10_000 }
    }
}

/// A rule library together with term limits; the verifier and oracle live here.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub library: RuleLibrary,
    pub limits: Limits,
}

impl Kernel {
    pub fn new(library: RuleLibrary, limits: Limits) -> Self {
        Kernel { library, limits }
    }

    /// Standard rule library with default limits.
    pub fn standard() -> &'static Kernel {
        static KERNEL: OnceLock<Kernel> = OnceLock::new();
        KERNEL.get_or_init(|| Kernel::new(RuleLibrary::standard().clone(), Limits::default()))
    }

    pub fn parse_statement(&self, text: &str) -> Result<Statement, ParseError> {
        parse_statement_with(text, &self.limits)
    }

    pub fn parse_proof(&self, text: &str) -> Result<Proof, ParseError> {
        parse_proof_with(text, &self.limits)
    }
}

/// Statements and proofs serialize as their canonical text.
macro_rules! serde_as_text {
    ($ty:ty, $parse:path) => {
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.canonical_text())
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = <std::borrow::Cow<'de, str>>::deserialize(d)?;
                $parse(&text).map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_as_text!(Statement, parse_statement);
serde_as_text!(Proof, parse_proof);
