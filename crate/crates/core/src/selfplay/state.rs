use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::records::TargetKind;
use crate::kernel::{Proof, Statement};
use crate::policy::{PromptRecord, WeightedExample};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Stp,
    ExpertVanilla,
    #[serde(rename = "expert-opt")]
    ExpertOptimized,
    Parallel,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Stp => "stp",
            Method::ExpertVanilla => "expert-vanilla",
            Method::ExpertOptimized => "expert-opt",
            Method::Parallel => "parallel",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Method::Stp, Method::ExpertVanilla, Method::ExpertOptimized, Method::Parallel]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

/// Prover examples of the most recent iterations, oldest first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayBuffer {
    capacity: usize,
    slots: VecDeque<Vec<WeightedExample>>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "replay buffer needs at least one slot");
        ReplayBuffer { capacity, slots: VecDeque::new() }
    }

    pub fn push(&mut self, slot: Vec<WeightedExample>) {
        if self.slots.len() == self.capacity {
            self.slots.pop_front();
        }
        self.slots.push_back(slot);
    }

    pub fn clear(&mut self) {
        self.slots.clear();
    }

    /// Number of occupied iteration slots.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn example_count(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    pub fn examples(&self) -> impl Iterator<Item = &WeightedExample> {
        self.slots.iter().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvedProof {
    pub proof: Proof,
    pub length: usize,
    pub cost: u64,
}

/// A distinct correct proof together with its target's pass counts in the
/// iteration that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub kind: TargetKind,
    pub target: Statement,
    pub proof: Proof,
    pub successes: usize,
    pub attempts: usize,
}

impl HistoryEntry {
    pub fn pass_rate(&self) -> f64 {
        self.successes as f64 / self.attempts as f64
    }
}

/// Everything a run carries between iterations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunState {
    pub method: Method,
    pub seed: u64,
    /// Completed iterations.
    pub iteration: usize,
    /// Dataset statement canonical text → its distinct verified proofs.
    pub proved: BTreeMap<String, Vec<ProvedProof>>,
    pub replay: ReplayBuffer,
    pub history: Vec<HistoryEntry>,
    /// Iteration of the latest periodic refresh.
    pub refreshed_at: Option<usize>,
    pub proofs_sampled: u64,
    pub conjectures_generated: u64,
    /// Current model snapshot, relative to the run directory.
    pub model: Option<String>,
}

impl RunState {
    pub fn new(method: Method, seed: u64, replay_iters: usize) -> Self {
        RunState {
            method,
            seed,
            iteration: 0,
            proved: BTreeMap::new(),
            replay: ReplayBuffer::new(replay_iters),
            history: Vec::new(),
            refreshed_at: None,
            proofs_sampled: 0,
            conjectures_generated: 0,
            model: None,
        }
    }

    pub fn is_proved(&self, statement: &Statement) -> bool {
        self.proved.contains_key(&statement.canonical_text())
    }
}

/// The refresh / final re-training data rule: history entries up to
/// `upto_iteration` whose pass rate is at most `pass_max`, at most
/// `per_target_cap` distinct proofs per target (seeded choice), weight 1.
pub fn retrain_examples(
    history: &[HistoryEntry],
    upto_iteration: usize,
    pass_max: f64,
    per_target_cap: usize,
    seed: u64,
) -> Vec<WeightedExample> {
    let mut by_target: BTreeMap<String, (&Statement, Vec<&Proof>)> = BTreeMap::new();
    let mut seen = HashSet::new();
    for e in history.iter().filter(|e| e.iteration <= upto_iteration && e.pass_rate() <= pass_max) {
        let key = e.target.canonical_text();
        if !seen.insert((key.clone(), e.proof.canonical_text())) {
            continue;
        }
        by_target.entry(key).or_insert_with(|| (&e.target, Vec::new())).1.push(&e.proof);
    }
    let mut out = Vec::new();
    for (key, (target, proofs)) in by_target {
        let chosen: Vec<&Proof> = if proofs.len() > per_target_cap {
            let mut rng = seed::rng(seed, &[seed::label("retrain"), upto_iteration as u64, seed::label(&key)]);
            let mut picked = index::sample(&mut rng, proofs.len(), per_target_cap).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| proofs[i]).collect()
        } else {
            proofs
        };
        out.extend(chosen.into_iter().map(|p| WeightedExample {
            prompt: PromptRecord::prover(target.clone()),
            completion: p.canonical_text(),
            weight: 1.0,
        }));
    }
    out
}
