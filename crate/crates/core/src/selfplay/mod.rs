//! The self-play loop: conjecture, prove, curate, retrain.

pub mod artifacts;
mod config;
pub mod curate;
pub mod records;
pub mod reweight;
pub mod run;
pub mod sample;
pub mod select;
pub mod state;

pub use config::{ConfigError, RunConfig};
pub use curate::{build_conjecturer_dataset, build_prover_dataset, elegancy_filter, elegancy_scores, prover_weight, ProverSample, Unproved};
pub use records::{compute_pass_rates, AttemptRecord, PassCount, PassRateTable, Provenance, Target, TargetKind};
pub use reweight::{wasserstein_reweight, InfeasibleError, ReweightProblem, Reweighting};
pub use run::{sft_examples, Engine, Run, SelfPlayError, Step};
pub use sample::{sample_and_verify, sample_conjectures};
pub use select::{cap_conjectures, select_conjecturer_inputs, triviality_filter};
pub use state::{retrain_examples, HistoryEntry, Method, ProvedProof, ReplayBuffer, RunState};
