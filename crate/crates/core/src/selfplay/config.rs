use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Source;
use crate::kernel::DEFAULT_STEP_BUDGET;
use crate::policy::{SampleParams, DEFAULT_MAX_TOKENS, DEFAULT_ORDER, DEFAULT_SMOOTHING, DEFAULT_TEMPERATURE};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("config parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Every knob of a run. Serialized as a flat JSON object whose keys are
/// exactly the field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Proof samples per target in STP.
    pub k: usize,
    /// Proof samples per statement in the baselines.
    pub k_baseline: usize,
    pub gamma: f64,
    pub beta: f64,
    /// Conjecturer pass band `(pass_band_low, pass_band_high]`.
    pub pass_band_low: f64,
    pub pass_band_high: f64,
    /// Prover data keeps targets with pass rate strictly below this.
    pub prover_pass_max: f64,
    pub elegancy_quantile: f64,
    /// Upper bound on `P(x) * n` before a conjecture is masked in re-weighting.
    pub reweight_cap: f64,
    pub replay_iters: usize,
    pub refresh_every: usize,
    pub lemma_cap_frac: f64,
    pub trivial_lemma_prob: f64,
    /// Refresh and final re-training keep proofs whose target pass rate is at most this.
    pub final_retrain_pass_max: f64,
    pub max_proofs_per_statement: usize,
    pub conjecturer_temperature: f64,
    pub prover_temperature: f64,
    pub conjecturer_max_tokens: usize,
    pub prover_max_tokens: usize,
    pub step_budget: u64,
    pub matching_weight_main: u32,
    pub matching_weight_valid: u32,
    /// Per-source matching weights apply from this iteration on; earlier
    /// iterations use weight 1 for every statement.
    pub matching_weight_from_iter: usize,
    pub ngram_order: usize,
    pub smoothing: f64,
    pub sft_per_pair_cap: usize,
    /// Write `attempts.jsonl` for every iteration.
    pub write_attempts: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            k: 32,
            k_baseline: 64,
            gamma: (-0.001f64).exp(),
            beta: (-0.01f64).exp(),
            pass_band_low: 0.0,
            pass_band_high: 0.25,
            prover_pass_max: 0.5,
            elegancy_quantile: 0.2,
            reweight_cap: 3.0,
            replay_iters: 3,
            refresh_every: 10,
            lemma_cap_frac: 0.1,
            trivial_lemma_prob: 0.5,
            final_retrain_pass_max: 0.25,
            max_proofs_per_statement: 16,
            conjecturer_temperature: DEFAULT_TEMPERATURE,
            prover_temperature: DEFAULT_TEMPERATURE,
            conjecturer_max_tokens: DEFAULT_MAX_TOKENS,
            prover_max_tokens: DEFAULT_MAX_TOKENS,
            step_budget: DEFAULT_STEP_BUDGET,
            matching_weight_main: 1,
            matching_weight_valid: 1,
            matching_weight_from_iter: 0,
            ngram_order: DEFAULT_ORDER,
            smoothing: DEFAULT_SMOOTHING,
            sft_per_pair_cap: crate::corpus::DEFAULT_PER_PAIR_CAP,
            write_attempts: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.k == 0 || self.k_baseline == 0 {
            return bad("k and k_baseline must be at least 1");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0 && self.beta > 0.0 && self.beta < 1.0) {
            return bad("gamma and beta must lie in (0, 1)");
        }
        for (name, x) in [
            ("pass_band_low", self.pass_band_low),
            ("pass_band_high", self.pass_band_high),
            ("prover_pass_max", self.prover_pass_max),
            ("elegancy_quantile", self.elegancy_quantile),
            ("lemma_cap_frac", self.lemma_cap_frac),
            ("trivial_lemma_prob", self.trivial_lemma_prob),
            ("final_retrain_pass_max", self.final_retrain_pass_max),
        ] {
            if !unit(x) {
                return Err(ConfigError::Invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.pass_band_low > self.pass_band_high {
            return bad("pass_band_low exceeds pass_band_high");
        }
        if self.reweight_cap.is_nan() || self.reweight_cap <= 0.0 {
            return bad("reweight_cap must be positive");
        }
        if self.replay_iters == 0 || self.refresh_every == 0 || self.max_proofs_per_statement == 0 {
            return bad("replay_iters, refresh_every and max_proofs_per_statement must be at least 1");
        }
        if !(self.conjecturer_temperature > 0.0 && self.prover_temperature > 0.0) {
            return bad("temperatures must be positive");
        }
        if self.conjecturer_max_tokens == 0 || self.prover_max_tokens == 0 {
            return bad("token caps must be at least 1");
        }
        if self.matching_weight_main == 0 || self.matching_weight_valid == 0 {
            return bad("matching weights must be at least 1");
        }
        if self.ngram_order == 0 || self.smoothing.is_nan() || self.smoothing <= 0.0 || self.sft_per_pair_cap == 0 {
            return bad("ngram_order, smoothing and sft_per_pair_cap must be positive");
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        config.validate()?;
        Ok(config)
    }

    /// Pretty, sorted-key JSON.
    pub fn to_json(&self) -> String {
        crate::selfplay::artifacts::to_sorted_json(self)
    }

    pub fn matching_weight(&self, source: Source, iteration: usize) -> u32 {
        if iteration < self.matching_weight_from_iter {
            return 1;
        }
        match source {
            Source::Main => self.matching_weight_main,
            Source::Valid => self.matching_weight_valid,
        }
    }

    pub fn prover_params(&self) -> SampleParams {
        SampleParams { temperature: self.prover_temperature, max_tokens: self.prover_max_tokens }
    }

    pub fn conjecturer_params(&self) -> SampleParams {
        SampleParams { temperature: self.conjecturer_temperature, max_tokens: self.conjecturer_max_tokens }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<RunConfig>(r#"{"nope": 1}"#).is_err());
        let partial: RunConfig = serde_json::from_str(r#"{"k": 8}"#).unwrap();
        assert_eq!(partial.k, 8);
        assert_eq!(partial.k_baseline, 64);
    }

    #[test]
    fn rejects_out_of_range() {
        let c = RunConfig { gamma: 1.0, ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { pass_band_high: 1.5, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }
}
