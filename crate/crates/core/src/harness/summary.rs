use serde::{Deserialize, Serialize};

use crate::trace::Trace;

/// Number of equally spaced aggregation points across the budget.
pub const CHECKPOINTS: u64 = 100;

/// Evaluation counts at which trials are aggregated: `ceil(k * budget / 100)`
/// for `k = 1..=100`, deduplicated.
pub fn checkpoint_grid(budget: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (1..=CHECKPOINTS)
        .map(|k| {
            let v = (k as u128 * budget as u128).div_ceil(CHECKPOINTS as u128);
            v.max(1) as u64
        })
        .collect();
    grid.dedup();
    grid
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    /// Sample standard deviation (zero for a single trial).
    pub std: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        assert!(!values.is_empty(), "statistics of an empty set");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        Stats {
            mean,
            std,
            median,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub evals: u64,
    #[serde(flatten)]
    pub f_best: Stats,
}

/// Cross-trial statistics of `f_best` at each checkpoint.
pub fn aggregate(traces: &[&Trace], budget: u64) -> Vec<Checkpoint> {
    checkpoint_grid(budget)
        .into_iter()
        .filter_map(|evals| {
            let values: Vec<f64> = traces.iter().filter_map(|t| t.best_at(evals)).collect();
            (values.len() == traces.len() && !values.is_empty()).then(|| Checkpoint {
                evals,
                f_best: Stats::of(&values),
            })
        })
        .collect()
}
