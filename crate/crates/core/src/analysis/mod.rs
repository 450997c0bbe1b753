//! Runtime verification of run traces and the TDMA comparison study.

mod checks;
mod lyapunov;
mod ratio;

pub use checks::{
    check_equilibrium, check_monotone, check_silenced_are_non_maximal, check_silencing, is_consensus_equilibrium,
    is_fixed_point, EquilibriumVerdict, MonotoneFault, MonotoneReport, MonotoneViolation, SilencingReport,
};
pub use lyapunov::{
    check_lyapunov_decrease, check_two_step_growth, lyapunov_series, lyapunov_v, LyapunovRecord, LyapunovReport,
};
pub use ratio::{
    ratio_csv, ratio_experiment, ratio_trial, slot_normalized_ratio, Density, RatioAggregate, RatioResult,
    RatioSettings, RatioStudy, RatioSummary, DEFAULT_MEAN_DEGREE, RATIO_CSV_HEADER,
};

use serde::{Deserialize, Serialize};

use crate::engine::Run;
use crate::scalar::Scalar;
use crate::topology::AgentId;

/// All trace checks applicable to one broadcast run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunChecks {
    pub monotone: MonotoneReport,
    pub lyapunov: LyapunovReport,
    pub two_step_growth: LyapunovReport,
    /// Only meaningful for converged runs of the asymptotic protocol.
    pub silencing: SilencingReport,
    pub silenced_maximal: Vec<(AgentId, u64)>,
}

impl RunChecks {
    pub fn passed(&self) -> bool {
        self.monotone.passed()
            && self.lyapunov.passed()
            && self.two_step_growth.passed()
            && self.silencing.passed()
            && self.silenced_maximal.is_empty()
    }
}

pub fn verify_run<S: Scalar>(run: &Run<S>) -> RunChecks {
    let xs = run.x_history();
    let ys = run.y_history();
    RunChecks {
        monotone: check_monotone(&xs),
        lyapunov: check_lyapunov_decrease(&xs, &run.target, run.numeric),
        two_step_growth: check_two_step_growth(&xs, &run.target, run.numeric),
        silencing: check_silencing(&xs[0], &ys),
        silenced_maximal: check_silenced_are_non_maximal(&xs, &ys),
    }
}

/// `V(k)` for every recorded state, as doubles.
pub fn lyapunov_values<S: Scalar>(run: &Run<S>) -> Vec<f64> {
    lyapunov_series(&run.x_history(), &run.target).iter().map(|r| r.v.to_f64()).collect()
}
