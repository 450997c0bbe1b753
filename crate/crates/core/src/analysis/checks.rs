//! Trace post-processors for the structural properties of the broadcast dynamics.
//! They report violations instead of panicking so noisy-channel runs can be inspected.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::engine::run_round;
use crate::protocol::{AgentState, ProtocolKind};
use crate::scalar::{max_of, Scalar};
use crate::topology::{AgentId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneFault {
    /// `x_i(k+1) < x_i(k)`.
    Decrease,
    /// `x_i(k) > max(x(1))`.
    AboveInitialMax,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneViolation {
    pub agent: AgentId,
    pub k: u64,
    pub fault: MonotoneFault,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneReport {
    pub violations: Vec<MonotoneViolation>,
}

impl MonotoneReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&MonotoneViolation> {
        self.violations.first()
    }
}

/// Checks `x_i(k) <= x_i(k+1) <= max(x(1))` along `x(1), x(2), ...`.
/// A decrease is reported at the round `k` it happens in.
pub fn check_monotone<S: Scalar>(xs: &[Vec<S>]) -> MonotoneReport {
    let mut report = MonotoneReport::default();
    let Some(bound) = xs.first().and_then(|x0| max_of(x0)) else {
        return report;
    };
    for (idx, x) in xs.iter().enumerate() {
        let k = idx as u64 + 1;
        for (i, v) in x.iter().enumerate() {
            let agent = AgentId::from_index(i);
            if *v > bound {
                report.violations.push(MonotoneViolation { agent, k, fault: MonotoneFault::AboveInitialMax });
            }
            if let Some(next) = xs.get(idx + 1) {
                if next[i] < *v {
                    report.violations.push(MonotoneViolation { agent, k, fault: MonotoneFault::Decrease });
                }
            }
        }
    }
    report
}

/// Outcome of the equilibrium test for one `(x, y)` point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquilibriumVerdict {
    /// One synchronous asymptotic round leaves `(x, y)` unchanged.
    pub fixed: bool,
    /// `x = c·1` and `y = 1`.
    pub analytic: bool,
}

impl EquilibriumVerdict {
    pub fn is_equilibrium(&self) -> bool {
        self.fixed
    }

    pub fn agrees(&self) -> bool {
        self.fixed == self.analytic
    }
}

/// `x` is constant and every agent is authorized.
pub fn is_consensus_equilibrium<S: Scalar>(x: &[S], y: &[bool]) -> bool {
    x.windows(2).all(|w| w[0] == w[1]) && y.iter().all(|&b| b)
}

/// Applies one ideal-channel round of the asymptotic dynamics and compares.
pub fn is_fixed_point<S: Scalar>(x: &[S], y: &[bool], topology: &Topology) -> bool {
    let states: Vec<AgentState<S>> =
        x.iter().zip(y).map(|(x, &y)| AgentState { x: x.clone(), y, timer: 1, y_acc: y }).collect();
    // the ideal channel draws nothing from the rng
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (next, _) = run_round(&states, 1, ProtocolKind::Asymptotic, topology, &ChannelModel::Ideal, &mut rng);
    next.iter().zip(&states).all(|(a, b)| a.x == b.x && a.y == b.y)
}

pub fn check_equilibrium<S: Scalar>(x: &[S], y: &[bool], topology: &Topology) -> EquilibriumVerdict {
    EquilibriumVerdict { fixed: is_fixed_point(x, y, topology), analytic: is_consensus_equilibrium(x, y) }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SilencingReport {
    /// Initially non-maximal agents with their first round of `y = 0`.
    pub silenced: Vec<(AgentId, u64)>,
    /// Initially non-maximal agents never silenced.
    pub unsilenced: Vec<AgentId>,
}

impl SilencingReport {
    pub fn passed(&self) -> bool {
        self.unsilenced.is_empty()
    }
}

/// Every agent with `x_i(1) < max(x(1))` must show `y_i(k) = 0` for some `k`
/// in `y(1), y(2), ...`.
pub fn check_silencing<S: Scalar>(initial: &[S], ys: &[Vec<bool>]) -> SilencingReport {
    let mut report = SilencingReport::default();
    let Some(top) = max_of(initial) else {
        return report;
    };
    for (i, x) in initial.iter().enumerate() {
        if *x >= top {
            continue;
        }
        let agent = AgentId::from_index(i);
        match ys.iter().position(|y| !y[i]) {
            Some(idx) => report.silenced.push((agent, idx as u64 + 1)),
            None => report.unsilenced.push(agent),
        }
    }
    report
}

/// Whenever `y_i(k+1) = 0`, agent `i` must have been non-maximal at `k`:
/// `x_i(k) < max(x(k))`. Returns the offending `(agent, k)` pairs.
pub fn check_silenced_are_non_maximal<S: Scalar>(xs: &[Vec<S>], ys: &[Vec<bool>]) -> Vec<(AgentId, u64)> {
    let mut bad = Vec::new();
    for (idx, (x, y_next)) in xs.iter().zip(ys.iter().skip(1)).enumerate() {
        let Some(top) = max_of(x) else { continue };
        for (i, &authorized) in y_next.iter().enumerate() {
            if !authorized && x[i].partial_cmp(&top) != Some(Ordering::Less) {
                bad.push((AgentId::from_index(i), idx as u64 + 1));
            }
        }
    }
    bad
}
