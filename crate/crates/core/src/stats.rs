//! Order statistics for experiment summaries.

use serde::{Deserialize, Serialize};

/// Min, median and max of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantiles {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Quantiles {
    /// `None` for an empty sample. The median of an even-sized sample is the mean of the middle pair.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) { (sorted[mid - 1] + sorted[mid]) / 2.0 } else { sorted[mid] };
        Some(Quantiles { min: sorted[0], median, max: sorted[sorted.len() - 1] })
    }
}
