//! Turning one iteration's attempts into weighted training data.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::records::{AttemptRecord, PassRateTable, Provenance, TargetKind};
use super::reweight::{wasserstein_reweight, InfeasibleError, ReweightProblem};
use super::RunConfig;
use crate::corpus::Source;
use crate::kernel::Statement;
use crate::policy::{embed, PromptRecord, WeightedExample};

/// Whether `count` lies in the pass band `(low, high]`.
pub fn in_pass_band(rate: f64, low: f64, high: f64) -> bool {
    rate > low && rate <= high
}

/// `E(c) = min correct proof length / len(c)` for each conjecture with a
/// correct proof, keyed by canonical text.
pub fn elegancy_scores(attempts: &[AttemptRecord]) -> BTreeMap<String, f64> {
    let mut best: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for a in attempts.iter().filter(|a| a.kind == TargetKind::Conjecture && a.is_correct()) {
        let text = a.target.canonical_text();
        let len = text.chars().count();
        let e = best.entry(text).or_insert((usize::MAX, len));
        e.0 = e.0.min(a.length());
    }
    best.into_iter().map(|(c, (l, len))| (c, l as f64 / len as f64)).collect()
}

/// Removes exactly the lowest `⌊q·N⌋` entries by `(score, text)`. Returns the
/// surviving texts and the threshold `κ` (the score at rank `⌊q·N⌋ + 1`).
pub fn elegancy_filter(scores: &[(String, f64)], quantile: f64) -> (HashSet<String>, Option<f64>) {
    let mut sorted: Vec<&(String, f64)> = scores.iter().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let drop = (quantile * sorted.len() as f64).floor() as usize;
    let kappa = sorted.get(drop).map(|e| e.1);
    (sorted[drop.min(sorted.len())..].iter().map(|e| e.0.clone()).collect(), kappa)
}

/// Unproved dataset statement with its matching weight `k_y`.
#[derive(Clone, Debug)]
pub struct Unproved {
    pub statement: Statement,
    pub source: Source,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConjecturerDatasetStats {
    pub band_records: usize,
    pub distinct: usize,
    pub after_elegancy: usize,
    pub kappa: Option<f64>,
    pub emitted: usize,
}

/// Alg. 2: band and lemma-use filter, de-duplication, elegancy filter,
/// Wasserstein re-weighting.
pub fn build_conjecturer_dataset(
    attempts: &[AttemptRecord],
    pass_rates: &PassRateTable,
    unproved: &[Unproved],
    config: &RunConfig,
    iteration: usize,
) -> Result<(Vec<WeightedExample>, ConjecturerDatasetStats), InfeasibleError> {
    let mut stats = ConjecturerDatasetStats::default();
    let mut chosen: Vec<(&Statement, &Provenance)> = Vec::new();
    let mut seen = HashSet::new();
    for a in attempts {
        let Some(prov) = &a.provenance else { continue };
        if a.kind != TargetKind::Conjecture || !a.is_correct() || !a.outcome.used_lemmas.contains(&prov.lemma) {
            continue;
        }
        let text = a.target.canonical_text();
        let rate = pass_rates.rate(&text).unwrap_or(0.0);
        if !in_pass_band(rate, config.pass_band_low, config.pass_band_high) {
            continue;
        }
        stats.band_records += 1;
        if seen.insert(text) {
            chosen.push((&a.target, prov));
        }
    }
    stats.distinct = chosen.len();
    if chosen.is_empty() {
        log::info!("iteration {iteration}: no conjectures survive the pass-band filter");
        return Ok((Vec::new(), stats));
    }

    let all_scores = elegancy_scores(attempts);
    let scores: Vec<(String, f64)> = chosen
        .iter()
        .map(|(c, _)| {
            let t = c.canonical_text();
            let e = all_scores[&t];
            (t, e)
        })
        .collect();
    let (keep, kappa) = elegancy_filter(&scores, config.elegancy_quantile);
    stats.kappa = kappa;
    chosen.retain(|(c, _)| keep.contains(&c.canonical_text()));
    stats.after_elegancy = chosen.len();
    if chosen.is_empty() || unproved.is_empty() {
        return Ok((Vec::new(), stats));
    }

    let mut targets: Vec<(String, &Unproved)> = unproved.iter().map(|u| (u.statement.canonical_text(), u)).collect();
    targets.sort_by(|a, b| a.0.cmp(&b.0));
    let x_emb: Vec<_> = chosen.iter().map(|(c, _)| embed(c)).collect();
    let y_emb: Vec<_> = targets.iter().map(|(_, u)| (embed(&u.statement), config.matching_weight(u.source, iteration))).collect();
    let problem = ReweightProblem {
        conjectures: x_emb.iter().collect(),
        statements: y_emb.iter().map(|(e, k)| (e, *k)).collect(),
        cap: config.reweight_cap,
    };
    let reweighting = wasserstein_reweight(&problem)?;

    let out: Vec<WeightedExample> = chosen
        .iter()
        .zip(&reweighting.weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|((c, prov), w)| WeightedExample {
            prompt: PromptRecord::conjecturer(prov.lemma.clone(), prov.seed_statement.clone(), prov.seed_proof.clone()),
            completion: c.canonical_text(),
            weight: *w,
        })
        .collect();
    stats.emitted = out.len();
    Ok((out, stats))
}

/// One distinct verified proof kept for prover training.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProverSample {
    pub kind: TargetKind,
    pub target: Statement,
    pub proof: String,
    pub length: usize,
    pub cost: u64,
    pub weight: f64,
}

impl ProverSample {
    pub fn example(&self) -> WeightedExample {
        WeightedExample { prompt: PromptRecord::prover(self.target.clone()), completion: self.proof.clone(), weight: self.weight }
    }
}

/// `(1/v) · γ^L · β^T`.
pub fn prover_weight(v: usize, length: usize, cost: u64, gamma: f64, beta: f64) -> f64 {
    gamma.powf(length as f64) * beta.powf(cost as f64) / v as f64
}

/// Correct proofs of targets with `P̂ < prover_pass_max`, de-duplicated by
/// `(target, proof)` and weighted by [`prover_weight`].
pub fn build_prover_dataset(attempts: &[AttemptRecord], pass_rates: &PassRateTable, config: &RunConfig) -> Vec<ProverSample> {
    let mut kept: Vec<ProverSample> = Vec::new();
    let mut seen = HashSet::new();
    let mut per_target: HashMap<String, usize> = HashMap::new();
    for a in attempts.iter().filter(|a| a.is_correct()) {
        let text = a.target.canonical_text();
        let rate = pass_rates.rate(&text).unwrap_or(0.0);
        if rate >= config.prover_pass_max {
            continue;
        }
        if !seen.insert((text.clone(), a.proof.clone())) {
            continue;
        }
        *per_target.entry(text).or_default() += 1;
        kept.push(ProverSample {
            kind: a.kind,
            target: a.target.clone(),
            proof: a.proof.clone(),
            length: a.length(),
            cost: a.outcome.cost,
            weight: 0.0,
        });
    }
    for s in &mut kept {
        let v = per_target[&s.target.canonical_text()];
        s.weight = prover_weight(v, s.length, s.cost, config.gamma, config.beta);
    }
    kept
}
