use std::collections::BTreeSet;
use std::path::Path;

use stp_core::corpus::{generate_benchmark, Benchmark, BenchmarkSpec, DatasetStatement, Source};
use stp_core::reporting::{read_reports, IterationReport};
use stp_core::selfplay::run::ConjectureStatus;
use stp_core::selfplay::{Engine, Method, Run, RunConfig, TargetKind};
use stp_core::Kernel;

fn small() -> Benchmark {
    let spec = BenchmarkSpec { files: 2, per_file: 25, corpus_steps: (1, 4), dataset_size: 80, dataset_steps: (1, 4) };
    generate_benchmark(Kernel::standard(), 5, spec).unwrap()
}

fn bundled() -> Benchmark {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/benchmark");
    Benchmark::read_dir(Kernel::standard(), &dir).unwrap()
}

fn engine(bench: &Benchmark, config: RunConfig) -> Engine<'static> {
    let dataset = bench.dataset.iter().map(|(s, _)| DatasetStatement { statement: s.clone(), source: Source::Main }).collect();
    Engine::new(Kernel::standard(), config, &bench.corpus, dataset).unwrap()
}

fn assert_monotone(reports: &[IterationReport]) {
    for w in reports.windows(2) {
        assert!(w[1].cumulative_pass_rate >= w[0].cumulative_pass_rate);
        assert!(w[1].proved_total >= w[0].proved_total);
    }
}

#[test]
fn bundled_benchmark_matches_regeneration() {
    let bundled = bundled();
    let fresh = generate_benchmark(Kernel::standard(), 0, BenchmarkSpec::default()).unwrap();
    assert_eq!(bundled.corpus.to_files(), fresh.corpus.to_files());
    assert_eq!(bundled.dataset, fresh.dataset);
    let steps: BTreeSet<usize> = bundled.dataset.iter().map(|(_, s)| *s).collect();
    assert_eq!(steps, (1..=6).collect());
}

#[test]
fn parallel_sampling_keeps_the_model_and_counts_samples() {
    let bench = small();
    let engine = engine(&bench, RunConfig::default());
    let k = engine.config.k_baseline as u64;
    let mut run = Run::in_memory(engine, Method::Parallel);
    let before = run.model.snapshot_bytes();
    let mut proved = BTreeSet::new();
    for _ in 0..3 {
        let unproved = run.engine.unproved(&run.state).len() as u64;
        let sampled = run.state.proofs_sampled;
        let r = run.advance().unwrap();
        assert_eq!(run.state.proofs_sampled - sampled, k * unproved);
        assert_eq!(r.proofs_sampled, k * unproved);
        let now: BTreeSet<String> = run.state.proved.keys().cloned().collect();
        assert!(now.is_superset(&proved));
        proved = now;
    }
    assert_eq!(run.model.snapshot_bytes(), before);
}

#[test]
fn vanilla_expert_iteration_skips_proved_statements() {
    let bench = small();
    let run = Run::in_memory(engine(&bench, RunConfig::default()), Method::ExpertVanilla);
    let (engine, mut state, mut model) = (run.engine, run.state, run.model);
    let mut reports = Vec::new();
    for _ in 0..3 {
        let step = engine.step(&state, &model, &engine.sft_model).unwrap();
        for a in &step.artifacts.attempts {
            assert!(!state.is_proved(&a.target), "sampled proved statement {}", a.target);
        }
        assert_eq!(step.artifacts.attempts.len(), engine.config.k_baseline * engine.unproved(&state).len());
        reports.push(step.report);
        state = step.state;
        model = step.model.unwrap();
    }
    assert_monotone(&reports);
}

#[test]
fn optimized_expert_iteration_samples_everything() {
    let bench = small();
    let engine = engine(&bench, RunConfig::default());
    let mut run = Run::in_memory(engine, Method::ExpertOptimized);
    let reports = run.run_until(3).unwrap();
    for r in &reports {
        assert_eq!(r.targets, bench.dataset.len());
        assert_eq!(r.proofs_sampled, (run.engine.config.k_baseline * bench.dataset.len()) as u64);
        assert!(r.prover_dataset_size <= 16 * bench.dataset.len());
    }
    assert_monotone(&reports);
}

#[test]
fn stp_iterations_respect_budget_and_replay() {
    let bench = small();
    let config = RunConfig { refresh_every: 2, ..RunConfig::default() };
    let mut run = Run::in_memory(engine(&bench, config), Method::Stp);
    let mut reports = Vec::new();
    for _ in 0..5 {
        let r = run.advance().unwrap();
        let c = &run.engine.config;
        assert!(r.conjectures_kept <= r.unproved_before);
        assert_eq!(r.proofs_sampled, (c.k * (r.conjectures_kept + r.unproved_before)) as u64);
        let since = run.state.iteration - run.state.refreshed_at.unwrap_or(0);
        assert_eq!(run.state.replay.len(), since.min(c.replay_iters));
        reports.push(r);
    }
    assert_eq!(run.state.refreshed_at, Some(4));
    assert_monotone(&reports);
}

#[test]
fn stp_step_artifacts_follow_the_filters() {
    let bench = bundled();
    // Conjecturer inputs come from proved statements, so look at iteration 2.
    let mut run = Run::in_memory(engine(&bench, RunConfig::default()), Method::Stp);
    run.advance().unwrap();
    let step = run.engine.step(&run.state, &run.model, &run.engine.base_model(&run.state)).unwrap();
    let a = &step.artifacts;
    let kept: BTreeSet<String> = a
        .attempts
        .iter()
        .filter(|x| x.kind == TargetKind::Conjecture)
        .map(|x| x.target.canonical_text())
        .collect();
    assert_eq!(kept.len(), step.report.conjectures_kept);
    assert!(kept.len() <= step.report.unproved_before);
    assert!(step.report.conjectures_generated > 0 && !a.prover_dataset.is_empty());
    let statuses = a.conjectures.iter().filter(|c| c.status == ConjectureStatus::Kept).count();
    assert_eq!(statuses, kept.len());
    for ex in &a.conjecturer_dataset {
        let attempts: Vec<_> = a.attempts.iter().filter(|x| x.target.canonical_text() == ex.completion).collect();
        let correct: Vec<_> = attempts.iter().filter(|x| x.is_correct()).collect();
        let rate = correct.len() as f64 / attempts.len() as f64;
        assert!(rate > 0.0 && rate <= 0.25);
        let lemma = ex.prompt.lemma.as_ref().unwrap();
        assert!(correct.iter().any(|x| x.outcome.used_lemmas.contains(lemma)));
        assert!(ex.weight > 0.0);
    }
    for s in &a.prover_dataset {
        let attempts: Vec<_> = a.attempts.iter().filter(|x| x.target == s.target).collect();
        let correct = attempts.iter().filter(|x| x.is_correct()).count();
        assert!(2 * correct < attempts.len());
    }
}

#[test]
fn empty_dataset_produces_no_conjectures() {
    let bench = small();
    let mut run = Run::in_memory(
        Engine::new(Kernel::standard(), RunConfig::default(), &bench.corpus, Vec::new()).unwrap(),
        Method::Stp,
    );
    let r = run.advance().unwrap();
    assert_eq!((r.conjectures_generated, r.targets, r.proofs_sampled), (0, 0, 0));
}

#[test]
fn in_memory_runs_are_deterministic() {
    let bench = small();
    let a = Run::in_memory(engine(&bench, RunConfig::default()), Method::Stp).run_until(2).unwrap();
    let b = Run::in_memory(engine(&bench, RunConfig::default()), Method::Stp).run_until(2).unwrap();
    assert_eq!(a, b);
    let c = Run::in_memory(engine(&bench, RunConfig { seed: 1, ..RunConfig::default() }), Method::Stp).run_until(2).unwrap();
    assert_ne!(a, c);
}

#[test]
fn resume_discards_uncommitted_work() {
    let bench = small();
    let tmp = tempfile::tempdir().unwrap();
    let (full, part) = (tmp.path().join("full"), tmp.path().join("part"));
    let config = RunConfig { refresh_every: 2, ..RunConfig::default() };
    Run::create(engine(&bench, config.clone()), Method::ExpertOptimized, &bench.corpus, &full).unwrap().run_until(3).unwrap();
    Run::create(engine(&bench, config), Method::ExpertOptimized, &bench.corpus, &part).unwrap().run_until(1).unwrap();
    std::fs::create_dir_all(part.join("iterations/0002")).unwrap();
    std::fs::write(part.join("iterations/0002/attempts.jsonl"), "partial").unwrap();
    Run::open(Kernel::standard(), &part).unwrap().run_until(3).unwrap();
    assert_eq!(read_reports(&full).unwrap(), read_reports(&part).unwrap());
    for name in ["state.json", "report.jsonl", "model/0003.txt", "iterations/0002/attempts.jsonl"] {
        assert_eq!(std::fs::read(full.join(name)).unwrap(), std::fs::read(part.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn create_refuses_a_non_empty_directory() {
    let bench = small();
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("stray"), "").unwrap();
    assert!(Run::create(engine(&bench, RunConfig::default()), Method::Stp, &bench.corpus, tmp.path()).is_err());
}
