use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::kernel::{Proof, Statement, VerificationOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    DatasetStatement,
    Conjecture,
}

/// Where a conjecture came from: the conjecturer prompt `(t, p^t, l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed_statement: Statement,
    pub seed_proof: Proof,
    pub lemma: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub kind: TargetKind,
    pub statement: Statement,
    pub provenance: Option<Provenance>,
}

impl Target {
    pub fn dataset(statement: Statement) -> Self {
        Target { kind: TargetKind::DatasetStatement, statement, provenance: None }
    }

    pub fn conjecture(statement: Statement, provenance: Provenance) -> Self {
        Target { kind: TargetKind::Conjecture, statement, provenance: Some(provenance) }
    }
}

/// One sampled proof `p^c` of target `c`, with its verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttemptRecord {
    pub kind: TargetKind,
    pub provenance: Option<Provenance>,
    pub target: Statement,
    /// Canonical text when the completion parsed, the raw completion otherwise.
    pub proof: String,
    pub outcome: VerificationOutcome,
    pub sample_index: usize,
}

impl AttemptRecord {
    pub fn is_correct(&self) -> bool {
        self.outcome.is_verified()
    }

    /// Proof length `L` in characters.
    pub fn length(&self) -> usize {
        self.proof.chars().count()
    }

    pub fn lemma(&self) -> Option<&str> {
        self.provenance.as_ref().map(|p| p.lemma.as_str())
    }

    pub fn to_line(&self) -> AttemptLine {
        AttemptLine {
            kind: self.kind,
            seed_statement: self.provenance.as_ref().map(|p| p.seed_statement.canonical_text()),
            seed_proof: self.provenance.as_ref().map(|p| p.seed_proof.canonical_text()),
            lemma: self.lemma().map(str::to_string),
            target: self.target.canonical_text(),
            proof: self.proof.clone(),
            verdict: self.outcome.verdict.to_string(),
            used_lemmas: self.outcome.used_lemmas.iter().cloned().collect(),
            length: self.length(),
            cost: self.outcome.cost,
            sample_index: self.sample_index,
        }
    }
}

/// The `attempts.jsonl` row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptLine {
    pub kind: TargetKind,
    pub seed_statement: Option<String>,
    pub seed_proof: Option<String>,
    pub lemma: Option<String>,
    pub target: String,
    pub proof: String,
    pub verdict: String,
    pub used_lemmas: Vec<String>,
    pub length: usize,
    pub cost: u64,
    pub sample_index: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassCount {
    pub attempts: usize,
    pub successes: usize,
}

impl PassCount {
    pub fn rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.successes as f64 / self.attempts as f64
        }
    }
}

/// Empirical pass rate per target canonical text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PassRateTable {
    pub entries: BTreeMap<String, PassCount>,
}

impl PassRateTable {
    pub fn get(&self, target: &str) -> Option<PassCount> {
        self.entries.get(target).copied()
    }

    pub fn rate(&self, target: &str) -> Option<f64> {
        self.get(target).map(|c| c.rate())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `P̂(c) = #correct / #attempts` for every target in `attempts`.
pub fn compute_pass_rates(attempts: &[AttemptRecord]) -> PassRateTable {
    let mut entries: BTreeMap<String, PassCount> = BTreeMap::new();
    for a in attempts {
        let e = entries.entry(a.target.canonical_text()).or_default();
        e.attempts += 1;
        if a.is_correct() {
            e.successes += 1;
        }
    }
    PassRateTable { entries }
}
