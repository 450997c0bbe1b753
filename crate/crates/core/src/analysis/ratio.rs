//! Convergence cost of orthogonal access versus superposition.
//!
//! A traditional round needs one TDMA slot per agent; a broadcast round needs
//! two orthogonal slots. The speedup compares slots, not rounds:
//! `r = n·k_t / (2·k_b)`.

use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{simulate_any, InitialStates, NumericMode, SimulationConfig, TopologySpec};
use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;
use crate::stats::Quantiles;

/// Edge density of the random graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Density {
    /// Fixed edge probability for every size.
    Probability(f64),
    /// Edge probability `min(1, d / (n - 1))`, i.e. expected degree `d`.
    MeanDegree(f64),
}

impl Density {
    pub fn probability(&self, n: usize) -> f64 {
        match *self {
            Density::Probability(p) => p,
            Density::MeanDegree(_) if n < 2 => 1.0,
            Density::MeanDegree(d) => (d / (n - 1) as f64).min(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSettings {
    pub sizes: Vec<usize>,
    pub trials: u64,
    pub density: Density,
    /// Initial states are drawn from `U[lo, hi)`.
    pub states: (f64, f64),
    pub seed: u64,
    pub numeric: NumericMode,
    /// Broadcast protocol compared against the traditional one.
    pub broadcast: ProtocolKind,
}

impl Default for RatioSettings {
    fn default() -> Self {
        RatioSettings {
            sizes: vec![10, 20, 50, 100],
            trials: 30,
            density: Density::MeanDegree(DEFAULT_MEAN_DEGREE),
            states: (0.0, std::f64::consts::TAU),
            seed: 0,
            numeric: NumericMode::Exact,
            broadcast: ProtocolKind::Switching,
        }
    }
}

/// Expected degree of the default random graphs.
pub const DEFAULT_MEAN_DEGREE: f64 = 4.0;

/// One trial: same graph and initial states under both protocols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioResult {
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub rounds_traditional: u64,
    pub rounds_broadcast: u64,
    pub slots_traditional: u64,
    pub slots_broadcast: u64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioAggregate {
    pub n: usize,
    pub trials: u64,
    /// Trials where a protocol hit the cap, or the instance started at consensus.
    pub excluded: u64,
    pub r: Option<Quantiles>,
    pub rounds_traditional: Option<Quantiles>,
    pub rounds_broadcast: Option<Quantiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioStudy {
    pub settings: RatioSettings,
    pub aggregates: Vec<RatioAggregate>,
    pub results: Vec<RatioResult>,
}

impl RatioStudy {
    pub fn aggregate(&self, n: usize) -> Option<&RatioAggregate> {
        self.aggregates.iter().find(|a| a.n == n)
    }

    pub fn summary(&self) -> RatioSummary {
        RatioSummary { settings: self.settings.clone(), aggregates: self.aggregates.clone() }
    }
}

/// Per-size aggregates without the per-trial rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSummary {
    pub settings: RatioSettings,
    pub aggregates: Vec<RatioAggregate>,
}

/// `r = n·k_t / (2·k_b)`.
pub fn slot_normalized_ratio(n: usize, rounds_traditional: u64, rounds_broadcast: u64) -> f64 {
    (rounds_traditional as f64 * n as f64) / (rounds_broadcast as f64 * 2.0)
}

/// Runs both protocols on the instance of `(n, trial)`; `None` if the trial is excluded.
pub fn ratio_trial(settings: &RatioSettings, n: usize, trial: u64) -> Result<Option<RatioResult>> {
    let seed = settings.seed.wrapping_add(trial);
    let (lo, hi) = settings.states;
    let cfg = SimulationConfig {
        numeric: settings.numeric,
        seed,
        ..SimulationConfig::new(
            TopologySpec::Random { n, p: settings.density.probability(n), seed: None },
            ProtocolKind::Traditional,
            InitialStates::Uniform { lo, hi, seed: None },
        )
    };
    let instance = cfg.resolve()?;
    let traditional = simulate_any(&instance)?.outcome();
    let broadcast = simulate_any(&instance.with_protocol(settings.broadcast))?.outcome();
    if !(traditional.converged && broadcast.converged) || traditional.rounds == 0 || broadcast.rounds == 0 {
        return Ok(None);
    }
    Ok(Some(RatioResult {
        n,
        trial,
        seed,
        rounds_traditional: traditional.rounds,
        rounds_broadcast: broadcast.rounds,
        slots_traditional: traditional.slots_used,
        slots_broadcast: broadcast.slots_used,
        r: slot_normalized_ratio(n, traditional.rounds, broadcast.rounds),
    }))
}

/// Runs every `(size, trial)` pair; trial `t` of every size uses seed `seed + t`.
pub fn ratio_experiment(settings: &RatioSettings) -> Result<RatioStudy> {
    if settings.sizes.is_empty() {
        return Err(Error::Config("ratio study needs at least one network size".into()));
    }
    if !settings.broadcast.is_broadcast() {
        return Err(Error::Config("ratio study compares against a broadcast protocol".into()));
    }
    let jobs: Vec<(usize, u64)> =
        settings.sizes.iter().flat_map(|&n| (0..settings.trials).map(move |t| (n, t))).collect();
    let outcomes: Vec<Option<RatioResult>> =
        jobs.par_iter().map(|&(n, t)| ratio_trial(settings, n, t)).collect::<Result<_>>()?;

    let results: Vec<RatioResult> = outcomes.into_iter().flatten().collect();
    let aggregates = settings
        .sizes
        .iter()
        .map(|&n| {
            let rows: Vec<&RatioResult> = results.iter().filter(|r| r.n == n).collect();
            let pick = |f: fn(&RatioResult) -> f64| Quantiles::of(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
            RatioAggregate {
                n,
                trials: settings.trials,
                excluded: settings.trials - rows.len() as u64,
                r: pick(|r| r.r),
                rounds_traditional: pick(|r| r.rounds_traditional as f64),
                rounds_broadcast: pick(|r| r.rounds_broadcast as f64),
            }
        })
        .collect();
    Ok(RatioStudy { settings: settings.clone(), aggregates, results })
}

pub const RATIO_CSV_HEADER: &str =
    "n,trial,seed,rounds_traditional,rounds_broadcast,slots_traditional,slots_broadcast,r";

pub fn ratio_csv(results: &[RatioResult]) -> String {
    let mut out = format!("{RATIO_CSV_HEADER}\n");
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n, r.trial, r.seed, r.rounds_traditional, r.rounds_broadcast, r.slots_traditional, r.slots_broadcast, r.r
        )
        .expect("writing to a String");
    }
    out
}
