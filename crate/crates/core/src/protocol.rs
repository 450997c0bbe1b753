//! Per-agent max-consensus dynamics.
//!
//! * [`ProtocolKind::Asymptotic`]: every agent broadcasts `(y·x, y)`, computes the
//!   average `u` of its authorized neighbors from the two superposed slots,
//!   moves to `max(x, u)` and stays authorized iff `x >= u`.
//! * [`ProtocolKind::Switching`]: the same update, except at rounds `k = 2·T`
//!   where the next authorization is the conjunction of every `y` seen since the
//!   previous switch, and the timer moves to `k`.
//! * [`ProtocolKind::Traditional`]: orthogonal access, each agent learns every
//!   neighbor value individually and takes the maximum.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{BroadcastFrame, ReceivedAggregate, DEFAULT_DETECTION_THRESHOLD};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topology::AgentId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Asymptotic,
    Switching,
    Traditional,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Asymptotic => "asymptotic",
            ProtocolKind::Switching => "switching",
            ProtocolKind::Traditional => "traditional",
        }
    }

    /// Uses the superposing channel (two orthogonal slots per round).
    pub fn is_broadcast(self) -> bool {
        !matches!(self, ProtocolKind::Traditional)
    }

    /// Channel slots consumed by one round on a network of `n` agents.
    pub fn slots_per_round(self, n: usize) -> u64 {
        if self.is_broadcast() {
            2
        } else {
            n as u64
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" => Ok(ProtocolKind::Asymptotic),
            "switching" => Ok(ProtocolKind::Switching),
            "traditional" => Ok(ProtocolKind::Traditional),
            other => Err(Error::Config(format!("unknown protocol `{other}`"))),
        }
    }
}

/// Local state `(x, y, T)` of one agent, plus the running conjunction of `y`
/// over the current switching window.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState<S> {
    /// Information state.
    pub x: S,
    /// Authorization to broadcast in the current round.
    pub y: bool,
    /// Round at which the current switching window started.
    pub timer: u64,
    /// Conjunction of `y(t)` for `t` from `timer` up to the current round.
    pub y_acc: bool,
}

impl<S: Scalar> AgentState<S> {
    /// `x(1) = x0`, `y(1) = 1`, `T(1) = 1`.
    pub fn initial(x0: S) -> Result<Self> {
        if x0.partial_cmp(&S::zero()).is_none_or(Ordering::is_lt) {
            return Err(Error::NegativeState(x0.to_f64()));
        }
        Ok(AgentState { x: x0, y: true, timer: 1, y_acc: true })
    }
}

/// Average of the authorized neighbors' states, or 0 when none broadcast.
pub fn compute_u<S: Scalar>(agg: &ReceivedAggregate<S>) -> S {
    compute_u_with_threshold(agg, DEFAULT_DETECTION_THRESHOLD)
}

/// [`compute_u`] with an explicit z′ detection threshold. With an ideal channel
/// z′ is an integer count, so any threshold in `[0, 1)` means "z′ ≠ 0".
pub fn compute_u_with_threshold<S: Scalar>(agg: &ReceivedAggregate<S>, threshold: f64) -> S {
    let threshold = S::from_f64(threshold).unwrap_or_else(S::zero);
    if agg.z_prime > threshold {
        agg.z.clone() / agg.z_prime.clone()
    } else {
        S::zero()
    }
}

/// Frame broadcast by `sender` in state `s`: `(y·x, y)`.
pub fn make_frame<S: Scalar>(sender: AgentId, s: &AgentState<S>) -> BroadcastFrame<S> {
    if s.y {
        BroadcastFrame::authorized(sender, s.x.clone())
    } else {
        BroadcastFrame::silent(sender)
    }
}

/// `x' = max(x, u)`, `y' = [x >= u]`. The indicator is closed at zero, so a tie keeps authorization.
pub fn step_asymptotic<S: Scalar>(s: &AgentState<S>, u: &S) -> AgentState<S> {
    let candidate = s.x >= *u;
    AgentState { x: s.x.clone().max_of(u.clone()), y: candidate, timer: s.timer, y_acc: s.y_acc && candidate }
}

/// Rounds `k = 2·T` are switch rounds. Since `T(1) = 1` these are exactly the powers of two.
pub fn is_switch_round(k: u64, timer: u64) -> bool {
    k == 2 * timer
}

/// Switching dynamics at round `k >= 1`.
pub fn step_switching<S: Scalar>(s: &AgentState<S>, u: &S, k: u64) -> AgentState<S> {
    if !is_switch_round(k, s.timer) {
        return step_asymptotic(s, u);
    }
    debug_assert!(k.is_power_of_two(), "switch at k={k} with T={}", s.timer);
    // y_acc already holds y(T) ∧ ... ∧ y(k)
    let y_next = s.y_acc;
    AgentState {
        x: s.x.clone().max_of(u.clone()),
        y: y_next,
        timer: k,
        // the new window starts at k, so it already contains y(k) and y(k+1)
        y_acc: s.y && y_next,
    }
}

/// Orthogonal-access update: maximum over the agent and its neighbors.
pub fn step_traditional<S: Scalar>(x_self: &S, neighbor_values: &[S]) -> S {
    neighbor_values.iter().cloned().fold(x_self.clone(), S::max_of)
}
