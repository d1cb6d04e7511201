//! Fan-out sampling. Work is split across the rayon pool and merged back in
//! input order; every sample draws from its own seed derived from
//! `(stream, target index, sample index)`.

use rayon::prelude::*;

use super::records::{AttemptRecord, Target};
use crate::kernel::{Kernel, VerificationOutcome};
use crate::policy::{PolicyModel, PromptRecord, SampleParams};
use crate::seed;

/// `k` proof samples per target, each parsed and verified.
pub fn sample_and_verify(
    kernel: &Kernel,
    model: &PolicyModel,
    targets: &[Target],
    k: usize,
    params: SampleParams,
    step_budget: u64,
    stream: u64,
) -> Vec<AttemptRecord> {
    assert!(k >= 1, "k must be at least 1");
    let per_target: Vec<Vec<AttemptRecord>> = targets
        .par_iter()
        .enumerate()
        .map(|(i, target)| {
            let prompt = model.encode(&kernel.library, &PromptRecord::prover(target.statement.clone()));
            (0..k)
                .map(|j| {
                    let text = model.sample_encoded(&prompt, params, seed::derive(stream, &[i as u64, j as u64]));
                    let (proof, outcome) = match kernel.parse_proof(&text) {
                        Ok(p) => (p.canonical_text(), kernel.verify(&target.statement, &p, step_budget)),
                        Err(_) => (text, VerificationOutcome::unparseable()),
                    };
                    AttemptRecord {
                        kind: target.kind,
                        provenance: target.provenance.clone(),
                        target: target.statement.clone(),
                        proof,
                        outcome,
                        sample_index: j,
                    }
                })
                .collect()
        })
        .collect();
    per_target.into_iter().flatten().collect()
}

/// One completion per conjecturer prompt.
pub fn sample_conjectures(
    kernel: &Kernel,
    model: &PolicyModel,
    prompts: &[PromptRecord],
    params: SampleParams,
    stream: u64,
) -> Vec<String> {
    prompts
        .par_iter()
        .enumerate()
        .map(|(i, p)| model.sample(&kernel.library, p, params, seed::derive(stream, &[i as u64])))
        .collect()
}
