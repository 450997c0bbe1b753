use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_until_consensus, SimulationConfig};
use crate::stats::Quantiles;

/// Result of one batch trial. `error` is set when the trial could not run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub converged: bool,
    pub rounds: u64,
    pub slots_used: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchAggregate {
    pub trials: u64,
    pub converged: u64,
    pub failed: u64,
    /// Converged fraction of the trials that ran; 0 for an empty batch.
    pub convergence_rate: f64,
    /// Rounds to consensus over converged trials.
    pub rounds: Option<Quantiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSummary {
    pub protocol: crate::protocol::ProtocolKind,
    pub base_seed: u64,
    pub aggregate: BatchAggregate,
    pub trials: Vec<TrialRecord>,
}

/// Runs `trials` copies of `cfg`, trial `i` with every seed shifted by `i`
/// (so the run seed is `cfg.seed + i`). Trials run in parallel; the result
/// is ordered by trial index.
pub fn run_batch(cfg: &SimulationConfig, trials: u64) -> BatchSummary {
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_cfg = cfg.with_seed_offset(i);
            let seed = trial_cfg.seed;
            match run_until_consensus(&trial_cfg) {
                Ok(o) => TrialRecord {
                    trial: i,
                    seed,
                    converged: o.converged,
                    rounds: o.rounds,
                    slots_used: o.slots_used,
                    error: None,
                },
                Err(e) => TrialRecord {
                    trial: i,
                    seed,
                    converged: false,
                    rounds: 0,
                    slots_used: 0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let failed = records.iter().filter(|r| r.error.is_some()).count() as u64;
    let converged_rounds: Vec<f64> = records.iter().filter(|r| r.converged).map(|r| r.rounds as f64).collect();
    let ran = trials - failed;
    BatchSummary {
        protocol: cfg.protocol,
        base_seed: cfg.seed,
        aggregate: BatchAggregate {
            trials,
            converged: converged_rounds.len() as u64,
            failed,
            convergence_rate: if ran == 0 { 0.0 } else { converged_rounds.len() as f64 / ran as f64 },
            rounds: Quantiles::of(&converged_rounds),
        },
        trials: records,
    }
}
