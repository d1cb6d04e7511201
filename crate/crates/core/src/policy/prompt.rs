use serde::{Deserialize, Serialize};

use super::tokens::{EASY_THEOREM, HARD_THEOREM, HARD_THEOREM_END, LEMMA, PROOF, PROOF_END, THEOREM};
use crate::kernel::{Proof, RuleLibrary, Statement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Conjecturer,
    Prover,
}

impl Role {
    /// Token that terminates a completion in this role.
    pub fn end_token(self) -> &'static str {
        match self {
            Role::Conjecturer => HARD_THEOREM_END,
            Role::Prover => PROOF_END,
        }
    }
}

/// The model input for one sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub role: Role,
    pub lemma: Option<String>,
    pub seed_statement: Option<Statement>,
    pub seed_proof: Option<Proof>,
    pub target_statement: Option<Statement>,
}

impl PromptRecord {
    pub fn conjecturer(lemma: impl Into<String>, seed_statement: Statement, seed_proof: Proof) -> Self {
        PromptRecord {
            role: Role::Conjecturer,
            lemma: Some(lemma.into()),
            seed_statement: Some(seed_statement),
            seed_proof: Some(seed_proof),
            target_statement: None,
        }
    }

    pub fn prover(target: Statement) -> Self {
        PromptRecord { role: Role::Prover, lemma: None, seed_statement: None, seed_proof: None, target_statement: Some(target) }
    }

    /// Prompt text with the formatting tokens. The lemma is shown as
    /// `name : pattern -> replacement` when the library knows it.
    pub fn render(&self, library: &RuleLibrary) -> String {
        match self.role {
            Role::Conjecturer => {
                let lemma = self.lemma.as_deref().unwrap_or_default();
                let lemma = match library.get(lemma) {
                    Some(rule) => format!("{lemma} : {}", rule.statement_text()),
                    None => lemma.to_string(),
                };
                let statement = self.seed_statement.as_ref().map(Statement::canonical_text).unwrap_or_default();
                let proof = self.seed_proof.as_ref().map(Proof::canonical_text).unwrap_or_default();
                format!("{LEMMA} {lemma} {EASY_THEOREM} {statement} := {proof} {HARD_THEOREM}")
            }
            Role::Prover => {
                let target = self.target_statement.as_ref().map(Statement::canonical_text).unwrap_or_default();
                format!("{THEOREM} {target} {PROOF}")
            }
        }
    }
}

/// A (prompt, completion, weight) training record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedExample {
    pub prompt: PromptRecord,
    pub completion: String,
    pub weight: f64,
}
