//! Synchronous round scheduler.
//!
//! Every round, all frames are produced from the frozen pre-round states, the
//! channel superposes them at each receiver, and every agent steps at once.

mod batch;
mod config;
mod export;

pub use batch::{run_batch, BatchAggregate, BatchSummary, TrialRecord};
pub use config::{
    default_round_cap, sample_uniform, InitialStates, Instance, NumericMode, SimulationConfig, TopologySpec,
    TraceLevel, DEFAULT_EPSILON,
};
pub use export::{trace_csv, trace_json, TraceRecord};

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{superpose, ChannelModel, ReceivedAggregate};
use crate::error::Result;
use crate::protocol::{
    compute_u_with_threshold, make_frame, step_asymptotic, step_switching, step_traditional, AgentState, ProtocolKind,
};
use crate::scalar::{max_of, Exact, Scalar};
use crate::topology::{AgentId, Topology};

/// Snapshot of round `k`: the states entering the round and what each agent computed.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace<S> {
    pub k: u64,
    pub x: Vec<S>,
    pub y: Vec<bool>,
    /// Neighborhood average for broadcast protocols; neighborhood maximum for the traditional one.
    pub u: Vec<S>,
    /// Superposed slot sums per agent. Empty for the traditional protocol.
    pub received: Vec<ReceivedAggregate<S>>,
}

/// One synchronous round at index `k`.
pub fn run_round<S: Scalar, R: Rng + ?Sized>(
    states: &[AgentState<S>],
    k: u64,
    protocol: ProtocolKind,
    topology: &Topology,
    channel: &ChannelModel,
    rng: &mut R,
) -> (Vec<AgentState<S>>, RoundTrace<S>) {
    let n = topology.n();
    debug_assert_eq!(states.len(), n);
    let snapshot = RoundTrace {
        k,
        x: states.iter().map(|s| s.x.clone()).collect(),
        y: states.iter().map(|s| s.y).collect(),
        u: Vec::with_capacity(n),
        received: Vec::new(),
    };
    match protocol {
        ProtocolKind::Traditional => {
            let mut trace = snapshot;
            let next = (0..n)
                .map(|i| {
                    let heard: Vec<S> = topology.neighbors_index(i).iter().map(|&j| states[j].x.clone()).collect();
                    trace.u.push(max_of(&heard).unwrap_or_else(S::zero));
                    AgentState { x: step_traditional(&states[i].x, &heard), ..states[i].clone() }
                })
                .collect();
            (next, trace)
        }
        ProtocolKind::Asymptotic | ProtocolKind::Switching => {
            let frames: Vec<_> =
                states.iter().enumerate().map(|(j, s)| make_frame(AgentId::from_index(j), s)).collect();
            let threshold = channel.detection_threshold();
            let mut trace = snapshot;
            trace.received.reserve(n);
            let next = (0..n)
                .map(|i| {
                    let heard: Vec<_> = topology.neighbors_index(i).iter().map(|&j| frames[j].clone()).collect();
                    let agg = superpose(AgentId::from_index(i), &heard, topology, channel, rng)
                        .expect("frames come from the receiver's neighbors");
                    let u = compute_u_with_threshold(&agg, threshold);
                    let next = match protocol {
                        ProtocolKind::Switching => step_switching(&states[i], &u, k),
                        _ => step_asymptotic(&states[i], &u),
                    };
                    trace.u.push(u);
                    trace.received.push(agg);
                    next
                })
                .collect();
            (next, trace)
        }
    }
}

/// True when every state has reached `target` under the mode's notion of equality.
pub fn detect_consensus<S: Scalar>(x: &[S], target: &S, mode: NumericMode) -> bool {
    match mode {
        NumericMode::Exact => x.iter().all(|v| v == target),
        NumericMode::Float { epsilon } => {
            let t = target.to_f64();
            let tol = epsilon * t.abs().max(1.0);
            x.iter().all(|v| (v.to_f64() - t).abs() <= tol)
        }
    }
}

/// A completed (or capped) run with its full trace.
#[derive(Debug, Clone)]
pub struct Run<S> {
    pub protocol: ProtocolKind,
    pub numeric: NumericMode,
    pub seed: u64,
    /// `max(x(1))`.
    pub target: S,
    pub converged: bool,
    /// Rounds executed before all agents first held the target (0 if they started there).
    pub rounds: u64,
    pub slots_used: u64,
    /// One entry per executed round.
    pub trace: Vec<RoundTrace<S>>,
    /// States after the last executed round.
    pub final_states: Vec<AgentState<S>>,
}

impl<S: Scalar> Run<S> {
    pub fn n(&self) -> usize {
        self.final_states.len()
    }

    /// `x(1), x(2), ..., x(rounds + 1)`.
    pub fn x_history(&self) -> Vec<Vec<S>> {
        self.trace
            .iter()
            .map(|r| r.x.clone())
            .chain(std::iter::once(self.final_states.iter().map(|s| s.x.clone()).collect()))
            .collect()
    }

    /// `y(1), y(2), ..., y(rounds + 1)`.
    pub fn y_history(&self) -> Vec<Vec<bool>> {
        self.trace
            .iter()
            .map(|r| r.y.clone())
            .chain(std::iter::once(self.final_states.iter().map(|s| s.y).collect()))
            .collect()
    }

    pub fn final_x(&self) -> Vec<S> {
        self.final_states.iter().map(|s| s.x.clone()).collect()
    }

    pub fn outcome(&self) -> RunOutcome {
        RunOutcome {
            converged: self.converged,
            rounds: self.rounds,
            slots_used: self.slots_used,
            final_x: self.final_states.iter().map(|s| s.x.to_f64()).collect(),
            protocol: self.protocol,
            n: self.n(),
            seed: self.seed,
            lyapunov: None,
        }
    }
}

/// Iterates rounds from `x(1)` until consensus or the round cap.
pub fn simulate<S: Scalar>(instance: &Instance) -> Result<Run<S>> {
    let topology = &instance.topology;
    if !topology.is_connected() {
        warn!("topology is not connected; max-consensus is not guaranteed");
    }
    let mut states = instance
        .initial
        .iter()
        .map(|&v| AgentState::initial(S::from_f64(v).ok_or(crate::Error::NegativeState(v))?))
        .collect::<Result<Vec<_>>>()?;
    if states.len() != topology.n() {
        return Err(crate::Error::StateLength { expected: topology.n(), got: states.len() });
    }
    let target = max_of(&states.iter().map(|s| s.x.clone()).collect::<Vec<_>>()).expect("nonempty network");
    let mut rng = ChaCha8Rng::seed_from_u64(instance.seed);
    rng.set_stream(config::CHANNEL_STREAM);

    let mut trace = Vec::new();
    let mut rounds = 0;
    let mut converged =
        detect_consensus(&states.iter().map(|s| s.x.clone()).collect::<Vec<_>>(), &target, instance.numeric);
    while !converged && rounds < instance.round_cap {
        let k = rounds + 1;
        let (next, record) = run_round(&states, k, instance.protocol, topology, &instance.channel, &mut rng);
        trace.push(record);
        states = next;
        rounds = k;
        let x: Vec<S> = states.iter().map(|s| s.x.clone()).collect();
        converged = detect_consensus(&x, &target, instance.numeric);
    }
    Ok(Run {
        protocol: instance.protocol,
        numeric: instance.numeric,
        seed: instance.seed,
        target,
        converged,
        rounds,
        slots_used: rounds * instance.protocol.slots_per_round(topology.n()),
        trace,
        final_states: states,
    })
}

/// A run in either numeric field.
#[derive(Debug, Clone)]
pub enum AnyRun {
    Exact(Run<Exact>),
    Float(Run<f64>),
}

/// Applies a generic expression to whichever run an [`AnyRun`] holds.
#[macro_export]
macro_rules! with_run {
    ($any:expr, $run:ident => $body:expr) => {
        match $any {
            $crate::engine::AnyRun::Exact($run) => $body,
            $crate::engine::AnyRun::Float($run) => $body,
        }
    };
}

impl AnyRun {
    pub fn outcome(&self) -> RunOutcome {
        with_run!(self, run => run.outcome())
    }
}

/// Resolves `instance.numeric` and runs in the matching field.
pub fn simulate_any(instance: &Instance) -> Result<AnyRun> {
    Ok(match instance.numeric {
        NumericMode::Exact => AnyRun::Exact(simulate(instance)?),
        NumericMode::Float { .. } => AnyRun::Float(simulate(instance)?),
    })
}

/// Resolves a configuration and runs it to consensus or the cap.
pub fn run_until_consensus(cfg: &SimulationConfig) -> Result<RunOutcome> {
    Ok(simulate_any(&cfg.resolve()?)?.outcome())
}

/// Exported summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOutcome {
    pub converged: bool,
    pub rounds: u64,
    pub slots_used: u64,
    pub final_x: Vec<f64>,
    pub protocol: ProtocolKind,
    pub n: usize,
    pub seed: u64,
    /// `V(k)` for `k = 1..=rounds+1`, when the Lyapunov monitor is attached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<Vec<f64>>,
}
