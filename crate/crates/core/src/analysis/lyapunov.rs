//! Lyapunov monitor for the broadcast dynamics.
//!
//! Over the stacked state `v(k) = [x(k); x(k-1)]` the candidate
//!
//! ```text
//! V(k) = 2n·x* - Σ_i (x_i(k) + x_i(k-1))
//! ```
//!
//! is zero exactly at `x(k) = x(k-1) = x*·1` and must strictly decrease at every
//! other point of an ideal-channel trajectory. The first round uses
//! `x(0) = x(1)`.

use std::cmp::Ordering;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::engine::{detect_consensus, NumericMode};
use crate::scalar::Scalar;

/// `V(k) = 2n·x* - Σ_i (x_i(k) + x_i(k-1))`.
pub fn lyapunov_v<S: Scalar>(x_k: &[S], x_km1: &[S], x_star: &S) -> S {
    debug_assert_eq!(x_k.len(), x_km1.len());
    let total = x_k.iter().chain(x_km1).cloned().fold(S::zero(), Add::add);
    S::from_count(2 * x_k.len()) * x_star.clone() - total
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovRecord<S> {
    pub k: u64,
    pub v: S,
    /// `V(k+1) - V(k)`; absent for the last state of a trajectory.
    pub delta_v: Option<S>,
}

/// `V` along a state history `x(1), x(2), ...`.
pub fn lyapunov_series<S: Scalar>(xs: &[Vec<S>], x_star: &S) -> Vec<LyapunovRecord<S>> {
    let values: Vec<S> = xs.iter().enumerate().map(|(i, x)| lyapunov_v(x, &xs[i.saturating_sub(1)], x_star)).collect();
    values
        .iter()
        .enumerate()
        .map(|(i, v)| LyapunovRecord {
            k: i as u64 + 1,
            v: v.clone(),
            delta_v: values.get(i + 1).map(|next| next.clone() - v.clone()),
        })
        .collect()
}

/// Rounds at which a Lyapunov property failed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovReport {
    /// Number of rounds the property was evaluated at.
    pub checked: u64,
    pub violations: Vec<u64>,
}

impl LyapunovReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Asserts `V(k+1) < V(k)` at every `k` where `v(k)` is not the consensus
/// equilibrium, and `V(k) >= 0` everywhere.
pub fn check_lyapunov_decrease<S: Scalar>(xs: &[Vec<S>], x_star: &S, mode: NumericMode) -> LyapunovReport {
    let series = lyapunov_series(xs, x_star);
    let mut report = LyapunovReport::default();
    for (i, rec) in series.iter().enumerate() {
        let at_star =
            detect_consensus(&xs[i], x_star, mode) && detect_consensus(&xs[i.saturating_sub(1)], x_star, mode);
        let negative = rec.v < S::zero() && !at_star;
        let Some(delta) = &rec.delta_v else {
            if negative {
                report.violations.push(rec.k);
            }
            continue;
        };
        if at_star {
            continue;
        }
        report.checked += 1;
        if negative || delta.partial_cmp(&S::zero()) != Some(Ordering::Less) {
            report.violations.push(rec.k);
        }
    }
    report
}

/// Asserts `Σ_i (x_i(k+2) - x_i(k)) > 0` whenever `x(k)` is not at consensus.
pub fn check_two_step_growth<S: Scalar>(xs: &[Vec<S>], x_star: &S, mode: NumericMode) -> LyapunovReport {
    let mut report = LyapunovReport::default();
    for (i, window) in xs.windows(3).enumerate() {
        if detect_consensus(&window[0], x_star, mode) {
            continue;
        }
        report.checked += 1;
        let growth = window[2]
            .iter()
            .zip(&window[0])
            .fold(S::zero(), |acc, (later, earlier)| acc + later.clone() - earlier.clone());
        if growth.partial_cmp(&S::zero()) != Some(Ordering::Greater) {
            report.violations.push(i as u64 + 1);
        }
    }
    report
}
