//! The iteration engines (STP and the three baselines) and the run directory.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::artifacts::{to_jsonl, to_sorted_json, write_atomic, write_jsonl};
use super::curate::{build_conjecturer_dataset, build_prover_dataset, ConjecturerDatasetStats, ProverSample, Unproved};
use super::records::{compute_pass_rates, AttemptRecord, PassRateTable, Provenance, Target, TargetKind};
use super::reweight::InfeasibleError;
use super::sample::{sample_and_verify, sample_conjectures};
use super::select::{cap_conjectures, select_conjecturer_inputs, triviality_filter};
use super::state::{retrain_examples, HistoryEntry, Method, ProvedProof, RunState};
use super::{ConfigError, RunConfig};
use crate::corpus::{extract_conjecturer_sft, extract_prover_sft, Corpus, CorpusError, DatasetStatement, Source};
use crate::kernel::{Kernel, Proof, Statement};
use crate::policy::{PolicyModel, PromptRecord, SnapshotError, WeightedExample};
use crate::reporting::{append_report, histogram, truncate_report, IterationReport, REPORT_FILE};
use crate::seed;

pub const CONFIG_FILE: &str = "config.json";
pub const STATE_FILE: &str = "state.json";
pub const DATASET_FILE: &str = "dataset.jsonl";
pub const CORPUS_DIR: &str = "corpus";
pub const MODEL_DIR: &str = "model";
pub const ITERATIONS_DIR: &str = "iterations";

#[derive(Debug, thiserror::Error)]
pub enum SelfPlayError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Infeasible(#[from] InfeasibleError),
    #[error("{path}: {source}")]
    Snapshot { path: PathBuf, source: SnapshotError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Layout(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SelfPlayError + '_ {
    move |source| SelfPlayError::Io { path: path.to_path_buf(), source }
}

/// SFT examples for both roles: every corpus proof, and every
/// `(lemma, X, Y)` tuple as a conjecturer example with `Y` as completion.
pub fn sft_examples(corpus: &Corpus, per_pair_cap: usize, seed: u64) -> Vec<WeightedExample> {
    let prover = extract_prover_sft(corpus).into_iter().map(|e| WeightedExample {
        prompt: PromptRecord::prover(e.statement),
        completion: e.proof.canonical_text(),
        weight: 1.0,
    });
    let conjecturer = extract_conjecturer_sft(corpus, per_pair_cap, seed).into_iter().map(|e| WeightedExample {
        prompt: PromptRecord::conjecturer(
            e.lemma,
            e.theorem_x.statement.clone(),
            e.theorem_x.proof.clone().expect("extracted theorems are proved"),
        ),
        completion: e.theorem_y.statement.canonical_text(),
        weight: 1.0,
    });
    prover.chain(conjecturer).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjectureStatus {
    Kept,
    Unparseable,
    Trivial,
    Duplicate,
    Capped,
}

/// The `conjectures.jsonl` row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureLine {
    pub index: usize,
    pub lemma: String,
    pub seed_statement: String,
    pub completion: String,
    pub statement: Option<String>,
    pub status: ConjectureStatus,
}

#[derive(Clone, Debug, Default)]
pub struct IterationArtifacts {
    pub conjecturer_inputs: Vec<PromptRecord>,
    pub conjectures: Vec<ConjectureLine>,
    pub attempts: Vec<AttemptRecord>,
    pub conjecturer_dataset: Vec<WeightedExample>,
    pub conjecturer_stats: ConjecturerDatasetStats,
    pub prover_dataset: Vec<ProverSample>,
}

/// Outcome of one iteration; nothing is committed until the caller takes it.
pub struct Step {
    pub state: RunState,
    /// `None` when the model did not change.
    pub model: Option<PolicyModel>,
    /// New base after a periodic refresh.
    pub base: Option<PolicyModel>,
    pub artifacts: IterationArtifacts,
    pub report: IterationReport,
}

/// Fixed inputs of a run: config, dataset and the SFT-only base model.
pub struct Engine<'k> {
    pub kernel: &'k Kernel,
    pub config: RunConfig,
    pub dataset: Vec<DatasetStatement>,
    pub sft: Vec<WeightedExample>,
    pub sft_model: PolicyModel,
}

impl<'k> Engine<'k> {
    pub fn new(kernel: &'k Kernel, config: RunConfig, corpus: &Corpus, dataset: Vec<DatasetStatement>) -> Result<Self, SelfPlayError> {
        config.validate()?;
        let sft = sft_examples(corpus, config.sft_per_pair_cap, config.seed);
        let sft_model = PolicyModel::trained(config.ngram_order, config.smoothing, &kernel.library, &sft);
        Ok(Engine { kernel, config, dataset, sft, sft_model })
    }

    pub fn initial_state(&self, method: Method) -> RunState {
        RunState::new(method, self.config.seed, self.config.replay_iters)
    }

    fn retrained(&self, examples: &[WeightedExample]) -> PolicyModel {
        let mut model = self.sft_model.clone();
        model.train(&self.kernel.library, examples);
        model
    }

    /// SFT counts plus the refresh data rule applied to history up to `upto`.
    pub fn retrain_at(&self, state: &RunState, upto: usize) -> PolicyModel {
        let c = &self.config;
        self.retrained(&retrain_examples(&state.history, upto, c.final_retrain_pass_max, c.max_proofs_per_statement, c.seed))
    }

    /// The model STP trains on top of: SFT-only until the first refresh.
    pub fn base_model(&self, state: &RunState) -> PolicyModel {
        match state.refreshed_at {
            Some(t) => self.retrain_at(state, t),
            None => self.sft_model.clone(),
        }
    }

    pub fn periodic_refresh(&self, state: &RunState) -> (RunState, PolicyModel) {
        let mut next = state.clone();
        next.refreshed_at = Some(state.iteration);
        next.replay.clear();
        let model = self.retrain_at(&next, state.iteration);
        (next, model)
    }

    pub fn final_retrain(&self, state: &RunState) -> PolicyModel {
        self.retrain_at(state, state.iteration)
    }

    pub fn unproved(&self, state: &RunState) -> Vec<&DatasetStatement> {
        self.dataset.iter().filter(|d| !state.is_proved(&d.statement)).collect()
    }

    /// Proved dataset pairs in dataset order, every stored proof.
    pub fn proved_pairs(&self, state: &RunState) -> Vec<(Statement, Proof)> {
        let mut out = Vec::new();
        for d in &self.dataset {
            if let Some(proofs) = state.proved.get(&d.statement.canonical_text()) {
                out.extend(proofs.iter().map(|p| (d.statement.clone(), p.proof.clone())));
            }
        }
        out
    }

    pub fn step(&self, state: &RunState, model: &PolicyModel, base: &PolicyModel) -> Result<Step, SelfPlayError> {
        match state.method {
            Method::Stp => self.step_stp(state, model, base),
            Method::ExpertVanilla | Method::ExpertOptimized | Method::Parallel => self.step_baseline(state, model),
        }
    }

    fn stream(&self, state: &RunState) -> u64 {
        seed::derive(self.config.seed, &[seed::label(state.method.name()), state.iteration as u64 + 1])
    }

    fn step_stp(&self, state: &RunState, model: &PolicyModel, base: &PolicyModel) -> Result<Step, SelfPlayError> {
        let cfg = &self.config;
        let lib = &self.kernel.library;
        let t = state.iteration + 1;
        let stream = self.stream(state);
        let unproved = self.unproved(state);

        let inputs = if unproved.is_empty() {
            Vec::new()
        } else {
            let pairs = self.proved_pairs(state);
            let mut rng = seed::rng(stream, &[seed::label("select")]);
            select_conjecturer_inputs(&pairs, cfg.trivial_lemma_prob, cfg.lemma_cap_frac, &mut rng)
        };
        let completions =
            sample_conjectures(self.kernel, model, &inputs, cfg.conjecturer_params(), seed::derive(stream, &[seed::label("conjecture")]));

        let mut seen: HashSet<String> = unproved.iter().map(|d| d.statement.canonical_text()).collect();
        let mut lines = Vec::with_capacity(inputs.len());
        let mut candidates: Vec<(usize, Target)> = Vec::new();
        for (index, (prompt, completion)) in inputs.iter().zip(completions).enumerate() {
            let lemma = prompt.lemma.clone().unwrap_or_default();
            let seed_statement = prompt.seed_statement.clone().expect("conjecturer prompt has a seed statement");
            let seed_proof = prompt.seed_proof.clone().expect("conjecturer prompt has a seed proof");
            let parsed = self.kernel.parse_statement(&completion).ok();
            let status = match &parsed {
                None => ConjectureStatus::Unparseable,
                Some(c) if !triviality_filter(self.kernel, c, &seed_statement) => ConjectureStatus::Trivial,
                Some(c) if !seen.insert(c.canonical_text()) => ConjectureStatus::Duplicate,
                Some(c) => {
                    let provenance = Provenance { seed_statement: seed_statement.clone(), seed_proof, lemma: lemma.clone() };
                    candidates.push((index, Target::conjecture(c.clone(), provenance)));
                    ConjectureStatus::Capped
                }
            };
            lines.push(ConjectureLine {
                index,
                lemma,
                seed_statement: seed_statement.canonical_text(),
                completion,
                statement: parsed.map(|c| c.canonical_text()),
                status,
            });
        }
        let kept = cap_conjectures(candidates, unproved.len(), &mut seed::rng(stream, &[seed::label("cap")]));
        for (index, _) in &kept {
            lines[*index].status = ConjectureStatus::Kept;
        }

        let mut targets: Vec<Target> = kept.into_iter().map(|(_, target)| target).collect();
        let kept_count = targets.len();
        targets.extend(unproved.iter().map(|d| Target::dataset(d.statement.clone())));
        let attempts = sample_and_verify(
            self.kernel,
            model,
            &targets,
            cfg.k,
            cfg.prover_params(),
            cfg.step_budget,
            seed::derive(stream, &[seed::label("prove")]),
        );
        let rates = compute_pass_rates(&attempts);

        let mut next = state.clone();
        next.iteration = t;
        next.proofs_sampled += attempts.len() as u64;
        let newly_proved = self.record_proofs(&mut next, &attempts);
        self.record_history(&mut next, &attempts, &rates, false);

        let still_unproved: Vec<Unproved> = unproved
            .iter()
            .filter(|d| !next.is_proved(&d.statement))
            .map(|d| Unproved { statement: d.statement.clone(), source: d.source })
            .collect();
        let (conjecturer_dataset, conjecturer_stats) = build_conjecturer_dataset(&attempts, &rates, &still_unproved, cfg, t)?;
        let prover_dataset = build_prover_dataset(&attempts, &rates, cfg);
        next.replay.push(prover_dataset.iter().map(ProverSample::example).collect());

        let mut training: Vec<WeightedExample> = next.replay.examples().cloned().collect();
        training.extend(conjecturer_dataset.iter().cloned());
        let mut trained = base.clone();
        trained.train(lib, &training);

        let conj_hist = histogram(targets[..kept_count].iter().map(|c| counts(&rates, &c.statement)));
        let mut report = self.report(state, &next, &targets, &attempts, &rates, newly_proved);
        report.conjectures_generated = inputs.len();
        report.conjectures_kept = kept_count;
        report.conjecture_histogram = conj_hist;
        report.conjecturer_dataset_size = conjecturer_dataset.len();
        report.prover_dataset_size = prover_dataset.len();
        report.replay_size = next.replay.example_count();
        next.conjectures_generated += inputs.len() as u64;

        let mut new_base = None;
        let mut model_out = trained;
        if t.is_multiple_of(cfg.refresh_every) {
            let (refreshed, model) = self.periodic_refresh(&next);
            next = refreshed;
            new_base = Some(model.clone());
            model_out = model;
        }

        Ok(Step {
            state: next,
            model: Some(model_out),
            base: new_base,
            artifacts: IterationArtifacts {
                conjecturer_inputs: inputs,
                conjectures: lines,
                attempts,
                conjecturer_dataset,
                conjecturer_stats,
                prover_dataset,
            },
            report,
        })
    }

    fn step_baseline(&self, state: &RunState, model: &PolicyModel) -> Result<Step, SelfPlayError> {
        let cfg = &self.config;
        let t = state.iteration + 1;
        let stream = self.stream(state);
        let targets: Vec<Target> = match state.method {
            Method::ExpertOptimized => self.dataset.iter().map(|d| Target::dataset(d.statement.clone())).collect(),
            _ => self.unproved(state).into_iter().map(|d| Target::dataset(d.statement.clone())).collect(),
        };
        let attempts = sample_and_verify(
            self.kernel,
            model,
            &targets,
            cfg.k_baseline,
            cfg.prover_params(),
            cfg.step_budget,
            seed::derive(stream, &[seed::label("prove")]),
        );
        let rates = compute_pass_rates(&attempts);

        let mut next = state.clone();
        next.iteration = t;
        next.proofs_sampled += attempts.len() as u64;
        let newly_proved = self.record_proofs(&mut next, &attempts);
        let mut training_size = 0;
        let trained = match state.method {
            Method::Parallel => None,
            method => {
                self.record_history(&mut next, &attempts, &rates, true);
                let cap = if method == Method::ExpertOptimized { cfg.max_proofs_per_statement } else { usize::MAX };
                let examples = retrain_examples(&next.history, t, 1.0, cap, cfg.seed);
                training_size = examples.len();
                Some(self.retrained(&examples))
            }
        };
        let mut report = self.report(state, &next, &targets, &attempts, &rates, newly_proved);
        report.prover_dataset_size = training_size;
        Ok(Step { state: next, model: trained, base: None, artifacts: IterationArtifacts { attempts, ..Default::default() }, report })
    }

    /// Adds distinct verified proofs of dataset statements; returns how many
    /// statements were proved for the first time.
    fn record_proofs(&self, state: &mut RunState, attempts: &[AttemptRecord]) -> usize {
        let mut newly = 0;
        for a in attempts.iter().filter(|a| a.kind == TargetKind::DatasetStatement && a.is_correct()) {
            let entry = state.proved.entry(a.target.canonical_text()).or_insert_with(|| {
                newly += 1;
                Vec::new()
            });
            let proof = self.kernel.parse_proof(&a.proof).expect("verified proofs parse");
            if !entry.iter().any(|p| p.proof == proof) {
                entry.push(ProvedProof { proof, length: a.length(), cost: a.outcome.cost });
            }
        }
        newly
    }

    /// Appends one entry per distinct `(target, proof)` of this iteration.
    /// With `global_dedup`, pairs already in the history are skipped.
    fn record_history(&self, state: &mut RunState, attempts: &[AttemptRecord], rates: &PassRateTable, global_dedup: bool) {
        let mut seen: HashSet<(String, String)> = if global_dedup {
            state.history.iter().map(|h| (h.target.canonical_text(), h.proof.canonical_text())).collect()
        } else {
            HashSet::new()
        };
        for a in attempts.iter().filter(|a| a.is_correct()) {
            let text = a.target.canonical_text();
            if !seen.insert((text.clone(), a.proof.clone())) {
                continue;
            }
            let count = rates.get(&text).expect("every attempted target has a pass count");
            state.history.push(HistoryEntry {
                iteration: state.iteration,
                kind: a.kind,
                target: a.target.clone(),
                proof: self.kernel.parse_proof(&a.proof).expect("verified proofs parse"),
                successes: count.successes,
                attempts: count.attempts,
            });
        }
    }

    fn report(
        &self,
        before: &RunState,
        after: &RunState,
        targets: &[Target],
        attempts: &[AttemptRecord],
        rates: &PassRateTable,
        newly_proved: usize,
    ) -> IterationReport {
        let statements = targets.iter().filter(|t| t.kind == TargetKind::DatasetStatement);
        IterationReport {
            method: before.method.name().to_string(),
            iteration: after.iteration,
            unproved_before: self.dataset.len() - before.proved.len(),
            targets: targets.len(),
            proofs_sampled: attempts.len() as u64,
            proofs_sampled_cumulative: before.proofs_sampled + attempts.len() as u64,
            newly_proved,
            proved_total: after.proved.len(),
            dataset_size: self.dataset.len(),
            cumulative_pass_rate: IterationReport::pass_rate(after.proved.len(), self.dataset.len()),
            statement_histogram: histogram(statements.map(|t| counts(rates, &t.statement))),
            ..Default::default()
        }
    }
}

fn counts(rates: &PassRateTable, statement: &Statement) -> (usize, usize) {
    let c = rates.get(&statement.canonical_text()).unwrap_or_default();
    (c.successes, c.attempts.max(1))
}

#[derive(Serialize, Deserialize)]
struct DatasetLine {
    statement: Statement,
    source: Source,
}

/// A run in progress. With a directory every iteration is persisted and the
/// run can be resumed from `state.json`.
pub struct Run<'k> {
    pub engine: Engine<'k>,
    pub state: RunState,
    pub model: PolicyModel,
    base: PolicyModel,
    dir: Option<PathBuf>,
    /// Record wall-clock time in reports (breaks byte-identity between runs).
    pub record_elapsed: bool,
}

impl<'k> Run<'k> {
    pub fn in_memory(engine: Engine<'k>, method: Method) -> Self {
        let state = engine.initial_state(method);
        let model = engine.sft_model.clone();
        Run { base: model.clone(), engine, state, model, dir: None, record_elapsed: false }
    }

    /// Lays out a fresh run directory, which must be absent or empty.
    pub fn create(engine: Engine<'k>, method: Method, corpus: &Corpus, dir: &Path) -> Result<Self, SelfPlayError> {
        if dir.exists() && fs::read_dir(dir).map_err(io_err(dir))?.next().is_some() {
            return Err(SelfPlayError::Layout(format!("{} is not empty", dir.display())));
        }
        fs::create_dir_all(dir.join(MODEL_DIR)).map_err(io_err(dir))?;
        fs::create_dir_all(dir.join(ITERATIONS_DIR)).map_err(io_err(dir))?;
        let write = |name: &str, text: &str| fs::write(dir.join(name), text).map_err(io_err(&dir.join(name)));
        write(CONFIG_FILE, &engine.config.to_json())?;
        let dataset: Vec<DatasetLine> =
            engine.dataset.iter().map(|d| DatasetLine { statement: d.statement.clone(), source: d.source }).collect();
        write(DATASET_FILE, &to_jsonl(&dataset))?;
        write(REPORT_FILE, "")?;
        corpus.write_dir(&dir.join(CORPUS_DIR))?;

        let mut run = Run::in_memory(engine, method);
        let path = model_path(0);
        run.model.save(&dir.join(&path)).map_err(io_err(&dir.join(&path)))?;
        run.state.model = Some(path);
        run.dir = Some(dir.to_path_buf());
        run.write_state()?;
        Ok(run)
    }

    /// Re-opens a run directory at its last committed iteration, discarding
    /// anything a later, interrupted iteration left behind.
    pub fn open(kernel: &'k Kernel, dir: &Path) -> Result<Self, SelfPlayError> {
        let config = RunConfig::load(&dir.join(CONFIG_FILE))?;
        let corpus = Corpus::read_dir(kernel, &dir.join(CORPUS_DIR))?;
        let path = dir.join(DATASET_FILE);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let mut dataset = Vec::new();
        for line in text.lines() {
            let d: DatasetLine = serde_json::from_str(line).map_err(|source| SelfPlayError::Json { path: path.clone(), source })?;
            dataset.push(DatasetStatement { statement: d.statement, source: d.source });
        }
        let engine = Engine::new(kernel, config, &corpus, dataset)?;

        let path = dir.join(STATE_FILE);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let state: RunState = serde_json::from_str(&text).map_err(|source| SelfPlayError::Json { path: path.clone(), source })?;
        let model_rel = state.model.clone().ok_or_else(|| SelfPlayError::Layout("state names no model".into()))?;
        let model_file = dir.join(&model_rel);
        let model = PolicyModel::load(&model_file).map_err(|source| SelfPlayError::Snapshot { path: model_file, source })?;
        let base = engine.base_model(&state);

        truncate_report(dir, state.iteration).map_err(io_err(dir))?;
        prune_after(&dir.join(ITERATIONS_DIR), state.iteration, "").map_err(io_err(dir))?;
        prune_after(&dir.join(MODEL_DIR), state.iteration, ".txt").map_err(io_err(dir))?;
        Ok(Run { engine, state, model, base, dir: Some(dir.to_path_buf()), record_elapsed: false })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Runs one iteration and commits it. On error nothing is committed.
    pub fn advance(&mut self) -> Result<IterationReport, SelfPlayError> {
        let started = Instant::now();
        let mut step = self.engine.step(&self.state, &self.model, &self.base)?;
        if self.record_elapsed {
            step.report.elapsed_ms = Some(started.elapsed().as_millis() as u64);
        }
        log::info!(
            "{} iteration {}: {} targets, {} newly proved, pass rate {:.4}",
            step.report.method,
            step.report.iteration,
            step.report.targets,
            step.report.newly_proved,
            step.report.cumulative_pass_rate
        );
        if let Some(dir) = self.dir.clone() {
            self.persist(&dir, &mut step)?;
        }
        self.state = step.state;
        if let Some(model) = step.model {
            self.model = model;
        }
        if let Some(base) = step.base {
            self.base = base;
        }
        Ok(step.report)
    }

    /// Advances until `iterations` iterations are complete.
    pub fn run_until(&mut self, iterations: usize) -> Result<Vec<IterationReport>, SelfPlayError> {
        let mut out = Vec::new();
        while self.state.iteration < iterations {
            out.push(self.advance()?);
        }
        Ok(out)
    }

    fn persist(&self, dir: &Path, step: &mut Step) -> Result<(), SelfPlayError> {
        let t = step.state.iteration;
        let it = dir.join(ITERATIONS_DIR).join(format!("{t:04}"));
        fs::create_dir_all(&it).map_err(io_err(&it))?;
        let a = &step.artifacts;
        let jsonl = |name: &str, r: io::Result<()>| r.map_err(io_err(&it.join(name)));
        jsonl("conjecturer_inputs.jsonl", write_jsonl(&it.join("conjecturer_inputs.jsonl"), &a.conjecturer_inputs))?;
        jsonl("conjectures.jsonl", write_jsonl(&it.join("conjectures.jsonl"), &a.conjectures))?;
        if self.engine.config.write_attempts {
            let lines: Vec<_> = a.attempts.iter().map(AttemptRecord::to_line).collect();
            jsonl("attempts.jsonl", write_jsonl(&it.join("attempts.jsonl"), &lines))?;
        }
        jsonl("conjecturer_dataset.jsonl", write_jsonl(&it.join("conjecturer_dataset.jsonl"), &a.conjecturer_dataset))?;
        jsonl("prover_dataset.jsonl", write_jsonl(&it.join("prover_dataset.jsonl"), &a.prover_dataset))?;
        fs::write(it.join("report.json"), to_sorted_json(&step.report)).map_err(io_err(&it))?;

        if let Some(model) = &step.model {
            let rel = model_path(t);
            model.save(&dir.join(&rel)).map_err(io_err(&dir.join(&rel)))?;
            step.state.model = Some(rel);
        }
        append_report(dir, &step.report).map_err(io_err(dir))?;
        let path = dir.join(STATE_FILE);
        write_atomic(&path, to_sorted_json(&step.state).as_bytes()).map_err(io_err(&path))
    }

    fn write_state(&self) -> Result<(), SelfPlayError> {
        let dir = self.dir.as_ref().expect("write_state needs a run directory");
        let path = dir.join(STATE_FILE);
        write_atomic(&path, to_sorted_json(&self.state).as_bytes()).map_err(io_err(&path))
    }
}

fn model_path(iteration: usize) -> String {
    format!("{MODEL_DIR}/{iteration:04}.txt")
}

/// Removes `NNNN<suffix>` entries numbered above `keep`.
fn prune_after(dir: &Path, keep: usize, suffix: &str) -> io::Result<()> {
    let Ok(entries) = fs::read_dir(dir) else { return Ok(()) };
    let mut doomed = BTreeSet::new();
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(n) = name.strip_suffix(suffix).and_then(|s| s.parse::<usize>().ok()) {
            if n > keep {
                doomed.insert(entry.path());
            }
        }
    }
    for path in doomed {
        if path.is_dir() {
            fs::remove_dir_all(path)?;
        } else {
            fs::remove_file(path)?;
        }
    }
    Ok(())
}
