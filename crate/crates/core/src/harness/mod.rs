//! Seeded experiment orchestration and result persistence.
//!
//! Every trial draws its randomness from a seed derived from the master
//! seed and the trial's index alone, so results do not depend on how trials
//! are scheduled across workers.

mod bias;
mod experiments;
mod lemmas;
mod record;
mod summary;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use bias::{run_bias_experiment, BiasConfig, BiasReport, DecisionTree, StrategyBias};
pub use experiments::{
    random_half_subset, run_hadamard_trials, run_separation_hadamard, run_simon_trials, sample_far_pa, HadamardInput,
    SeparationConfig, SimonInput, TesterMode,
};
pub use lemmas::{verify_lemmas, LemmaCheck};
pub use record::{export_csv, load, persist, read_jsonl, write_jsonl, TrialRecord};
pub use summary::{summarize, wilson_interval, ExperimentSummary};

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of work item `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Execution knobs shared by all runners.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 picks the machine default.
    pub workers: usize,
    /// Store per-trial wall time. Off by default because it breaks
    /// bit-identical output.
    pub record_time: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 1,
            record_time: false,
        }
    }
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        RunOptions {
            workers,
            ..Self::default()
        }
    }
}

/// Maps `job` over `0..count` on a bounded pool and collects in index order.
pub(crate) fn run_indexed<T, F>(count: usize, opts: &RunOptions, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if opts.workers == 1 {
        return (0..count).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..count).into_par_iter().map(job).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..10_000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }

    #[test]
    fn indexed_order_independent_of_workers() {
        let job = |i: usize| Ok(derive_seed(1, i as u64));
        let a = run_indexed(500, &RunOptions::with_workers(1), job).unwrap();
        let b = run_indexed(500, &RunOptions::with_workers(4), job).unwrap();
        assert_eq!(a, b);
    }
}
