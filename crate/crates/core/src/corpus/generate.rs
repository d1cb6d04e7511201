//! Procedural theorem generation: random start term, random forward rewrites.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{Corpus, CorpusError, CorpusFile, TheoremEntry};
use crate::kernel::{apply_rule, Direction, Kernel, Op, Proof, ProofStep, Side, Statement, Term, DEFAULT_STEP_BUDGET};
use crate::seed;

pub const MAX_GENERATOR_STEPS: usize = 8;

const VARIABLES: [char; 4] = ['a', 'b', 'c', 'd'];
const START_DEPTH: usize = 3;
const MAX_ATTEMPTS_PER_THEOREM: usize = 10_000;

fn random_leaf<R: Rng>(rng: &mut R) -> Term {
    let roll: f64 = rng.random();
    if roll < 0.55 {
        Term::Var(*VARIABLES.choose(rng).unwrap())
    } else if roll < 0.70 {
        Term::Lit(0)
    } else if roll < 0.85 {
        Term::Lit(1)
    } else if roll < 0.95 {
        Term::Lit(2)
    } else {
        Term::Lit(3)
    }
}

fn random_term<R: Rng>(rng: &mut R, depth: usize, root: bool) -> Term {
    if depth == 0 || (!root && rng.random_bool(0.35)) {
        return random_leaf(rng);
    }
    let op = if rng.random_bool(0.5) { Op::Add } else { Op::Mul };
    Term::node(op, random_term(rng, depth - 1, false), random_term(rng, depth - 1, false))
}

/// All forward rewrites of `term` that stay within the kernel limits.
fn forward_moves(kernel: &Kernel, term: &Term) -> Vec<(String, Vec<u8>, Term)> {
    let mut out = Vec::new();
    let paths = term.paths();
    for rule in kernel.library.nontrivial() {
        for path in &paths {
            if let Ok(next) = apply_rule(term, rule, path, Direction::Forward) {
                if next.depth() <= kernel.limits.max_term_depth && next.max_literal() <= kernel.limits.max_literal {
                    out.push((rule.name.clone(), path.clone(), next));
                }
            }
        }
    }
    out
}

/// One random theorem: `start = end` with the recorded forward proof on `L`.
pub fn random_theorem<R: Rng>(kernel: &Kernel, rng: &mut R, min_steps: usize, max_steps: usize) -> Option<(Statement, Proof)> {
    let start = random_term(rng, START_DEPTH, true);
    let steps = rng.random_range(min_steps..=max_steps);
    let mut current = start.clone();
    let mut proof = Vec::with_capacity(steps + 1);
    for _ in 0..steps {
        let moves = forward_moves(kernel, &current);
        let (rule, path, next) = moves.choose(rng)?.clone();
        proof.push(ProofStep::rw(Direction::Forward, rule, Side::L, path));
        current = next;
    }
    proof.push(ProofStep::Refl);
    let statement = Statement::new(start, current);
    if kernel.closes_directly(&statement) {
        return None;
    }
    let proof = Proof::new(proof).ok()?;
    Some((statement, proof))
}

fn check_range(min_steps: usize, max_steps: usize) -> Result<(), CorpusError> {
    if min_steps < 1 || min_steps > max_steps || max_steps > MAX_GENERATOR_STEPS {
        return Err(CorpusError::Config(format!(
            "step range ({min_steps}, {max_steps}) must satisfy 1 <= min <= max <= {MAX_GENERATOR_STEPS}"
        )));
    }
    Ok(())
}

/// Generates `count` distinct statements with recorded proofs, skipping any
/// canonical text in `exclude`.
pub fn generate_theorems(
    kernel: &Kernel,
    seed: u64,
    count: usize,
    (min_steps, max_steps): (usize, usize),
    exclude: &HashSet<String>,
) -> Result<Vec<(Statement, Proof)>, CorpusError> {
    check_range(min_steps, max_steps)?;
    let mut rng = seed::rng(seed, &[seed::label("theorems")]);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut failures = 0;
    while out.len() < count {
        match random_theorem(kernel, &mut rng, min_steps, max_steps) {
            Some((statement, proof)) => {
                let text = statement.canonical_text();
                if exclude.contains(&text) || !seen.insert(text) {
                    failures += 1;
                } else {
                    debug_assert!(kernel.verify(&statement, &proof, DEFAULT_STEP_BUDGET).is_verified());
                    failures = 0;
                    out.push((statement, proof));
                }
            }
            None => failures += 1,
        }
        if failures > MAX_ATTEMPTS_PER_THEOREM {
            return Err(CorpusError::Config(format!(
                "could not find {count} distinct theorems; stopped at {}",
                out.len()
            )));
        }
    }
    Ok(out)
}

/// A seeded proof library of `files` files with `theorems_per_file` theorems each.
pub fn generate_seed_corpus(
    kernel: &Kernel,
    seed: u64,
    files: usize,
    theorems_per_file: usize,
    steps: (usize, usize),
) -> Result<Corpus, CorpusError> {
    let theorems = generate_theorems(kernel, seed, files * theorems_per_file, steps, &HashSet::new())?;
    let mut iter = theorems.into_iter();
    let files = (0..files)
        .map(|f| {
            let file_id = format!("f{f:03}");
            let theorems = (0..theorems_per_file)
                .map(|position| {
                    let (statement, proof) = iter.next().expect("generated exactly files * per_file");
                    TheoremEntry {
                        name: format!("t{f:03}_{position:03}"),
                        statement,
                        proof: Some(proof),
                        file_id: file_id.clone(),
                        position,
                    }
                })
                .collect();
            CorpusFile { id: file_id, theorems }
        })
        .collect();
    Ok(Corpus { files })
}

/// Proofless statements disjoint from `exclude`; their recorded proofs are discarded.
pub fn generate_unproved_dataset(
    kernel: &Kernel,
    seed: u64,
    count: usize,
    steps: (usize, usize),
    exclude: &HashSet<String>,
) -> Result<Vec<Statement>, CorpusError> {
    Ok(generate_recorded_dataset(kernel, seed, count, steps, exclude)?.into_iter().map(|(s, _)| s).collect())
}

/// Like [`generate_unproved_dataset`], keeping each statement's generator step count.
pub fn generate_recorded_dataset(
    kernel: &Kernel,
    seed: u64,
    count: usize,
    steps: (usize, usize),
    exclude: &HashSet<String>,
) -> Result<Vec<(Statement, usize)>, CorpusError> {
    let stream = seed::derive(seed, &[seed::label("dataset")]);
    Ok(generate_theorems(kernel, stream, count, steps, exclude)?
        .into_iter()
        .map(|(s, p)| (s, p.rewrite_count()))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchmarkSpec {
    pub files: usize,
    pub per_file: usize,
    pub corpus_steps: (usize, usize),
    pub dataset_size: usize,
    pub dataset_steps: (usize, usize),
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec { files: 20, per_file: 50, corpus_steps: (1, 5), dataset_size: 2000, dataset_steps: (1, 6) }
    }
}

/// A seed corpus plus a disjoint proofless dataset with recorded difficulty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Benchmark {
    pub corpus: Corpus,
    pub dataset: Vec<(Statement, usize)>,
}

pub const BENCHMARK_CORPUS_DIR: &str = "corpus";
pub const BENCHMARK_DATASET: &str = "dataset.txt";
pub const BENCHMARK_DIFFICULTY: &str = "difficulty.txt";

pub fn generate_benchmark(kernel: &Kernel, seed: u64, spec: BenchmarkSpec) -> Result<Benchmark, CorpusError> {
    let corpus = generate_seed_corpus(kernel, seed, spec.files, spec.per_file, spec.corpus_steps)?;
    let exclude: HashSet<String> = corpus.theorems().map(|t| t.statement.canonical_text()).collect();
    let dataset = generate_recorded_dataset(kernel, seed, spec.dataset_size, spec.dataset_steps, &exclude)?;
    Ok(Benchmark { corpus, dataset })
}

impl Benchmark {
    /// Writes `corpus/`, `dataset.txt` and `difficulty.txt` (one step count per dataset line).
    pub fn write_dir(&self, dir: &Path) -> Result<(), CorpusError> {
        self.corpus.write_dir(&dir.join(BENCHMARK_CORPUS_DIR))?;
        let write = |name: &str, body: String| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| CorpusError::io(&path, e))
        };
        write(BENCHMARK_DATASET, super::dataset_to_text(self.dataset.iter().map(|(s, _)| s)))?;
        write(BENCHMARK_DIFFICULTY, self.dataset.iter().map(|(_, k)| format!("{k}\n")).collect())
    }

    pub fn read_dir(kernel: &Kernel, dir: &Path) -> Result<Benchmark, CorpusError> {
        let corpus = Corpus::read_dir(kernel, &dir.join(BENCHMARK_CORPUS_DIR))?;
        let statements = super::load_unproved_dataset(kernel, &dir.join(BENCHMARK_DATASET), super::Source::Main)?;
        let path = dir.join(BENCHMARK_DIFFICULTY);
        let text = std::fs::read_to_string(&path).map_err(|e| CorpusError::io(&path, e))?;
        let steps: Vec<usize> = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                l.trim().parse().map_err(|_| CorpusError::Format { path: path.clone(), line: i + 1, message: format!("bad step count `{l}`") })
            })
            .collect::<Result<_, _>>()?;
        if steps.len() != statements.len() {
            return Err(CorpusError::Format {
                path,
                line: steps.len(),
                message: format!("{} step counts for {} statements", steps.len(), statements.len()),
            });
        }
        Ok(Benchmark { corpus, dataset: statements.into_iter().map(|d| d.statement).zip(steps).collect() })
    }
}
