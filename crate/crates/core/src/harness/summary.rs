use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::TrialRecord;

const Z95: f64 = 1.959_963_984_540_054;

/// Aggregates for one `(experiment, input, n, eps, mode)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub input: String,
    pub n: usize,
    pub eps: f64,
    pub mode: String,
    pub trials: usize,
    pub accepts: usize,
    pub accept_freq: f64,
    pub mean_queries: f64,
    pub min_queries: usize,
    pub max_queries: usize,
    /// Wilson 95% interval for the acceptance probability.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // clamp so the point estimate is always inside despite rounding
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// Groups records by cell, in order of first appearance.
pub fn summarize(records: &[TrialRecord]) -> Vec<ExperimentSummary> {
    type Key = (String, String, usize, u64, String);
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut cells: Vec<(Vec<&TrialRecord>, &TrialRecord)> = Vec::new();
    for r in records {
        let key = (r.experiment.clone(), r.input.clone(), r.n, r.eps.to_bits(), r.mode.clone());
        let slot = *index.entry(key).or_insert_with(|| {
            cells.push((Vec::new(), r));
            cells.len() - 1
        });
        cells[slot].0.push(r);
    }
    cells
        .into_iter()
        .map(|(rows, first)| {
            let trials = rows.len();
            let accepts = rows.iter().filter(|r| r.verdict.is_accept()).count();
            let total: usize = rows.iter().map(|r| r.queries).sum();
            let (ci_low, ci_high) = wilson_interval(accepts, trials);
            ExperimentSummary {
                experiment: first.experiment.clone(),
                input: first.input.clone(),
                n: first.n,
                eps: first.eps,
                mode: first.mode.clone(),
                trials,
                accepts,
                accept_freq: accepts as f64 / trials as f64,
                mean_queries: total as f64 / trials as f64,
                min_queries: rows.iter().map(|r| r.queries).min().unwrap_or(0),
                max_queries: rows.iter().map(|r| r.queries).max().unwrap_or(0),
                ci_low,
                ci_high,
            }
        })
        .collect()
}
