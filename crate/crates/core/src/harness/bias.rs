use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{derive_seed, run_indexed, RunOptions};
use crate::error::{Error, Result};
use crate::f2core::{BitString, BooleanFunction};
use crate::simon_tester::{sample_p, sample_u};

/// A complete adaptive decision tree of fixed depth over a truth table.
///
/// Internal nodes are heap-indexed: node `v` has children `2v + 1` (answer
/// 0) and `2v + 2` (answer 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTree {
    depth: usize,
    positions: Vec<usize>,
    labels: BitString,
}

impl DecisionTree {
    /// Uniform query positions and uniform leaf labels.
    pub fn random<R: Rng + ?Sized>(size: usize, depth: usize, rng: &mut R) -> Self {
        let internal = (1usize << depth) - 1;
        let positions = (0..internal).map(|_| rng.gen_range(0..size)).collect();
        DecisionTree {
            depth,
            positions,
            labels: BitString::random(1 << depth, rng),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Follows the queries and returns the leaf label (`true` = accept).
    pub fn eval(&self, f: &BooleanFunction) -> bool {
        let mut v = 0;
        for _ in 0..self.depth {
            v = 2 * v + 1 + usize::from(f.eval(self.positions[v]));
        }
        self.labels.get(v - self.positions.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiasConfig {
    pub n: usize,
    pub depth: usize,
    pub strategies: usize,
    /// Samples per distribution per strategy.
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyBias {
    pub strategy: usize,
    pub seed: u64,
    pub accept_p: f64,
    pub accept_u: f64,
    pub bias: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub n: usize,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub strategies: Vec<StrategyBias>,
    pub max_bias: f64,
}

/// Estimates `|Pr_P[accept] - Pr_U[accept]|` for random depth-`q` trees.
pub fn run_bias_experiment(cfg: &BiasConfig, opts: &RunOptions) -> Result<BiasReport> {
    if !(1..=8).contains(&cfg.n) {
        return Err(Error::usage(format!("bias experiment needs 1 <= n <= 8, got {}", cfg.n)));
    }
    if cfg.depth > 16 || cfg.samples == 0 {
        return Err(Error::usage("depth must be at most 16 and samples positive"));
    }
    let size = 1usize << cfg.n;
    let strategies = run_indexed(cfg.strategies, opts, |i| {
        let seed = derive_seed(cfg.seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = DecisionTree::random(size, cfg.depth, &mut rng);
        let mut hits_p = 0usize;
        let mut hits_u = 0usize;
        for _ in 0..cfg.samples {
            hits_p += usize::from(tree.eval(&sample_p(cfg.n, &mut rng).f));
            hits_u += usize::from(tree.eval(&sample_u(cfg.n, &mut rng)));
        }
        let accept_p = hits_p as f64 / cfg.samples as f64;
        let accept_u = hits_u as f64 / cfg.samples as f64;
        Ok(StrategyBias {
            strategy: i,
            seed,
            accept_p,
            accept_u,
            bias: (accept_p - accept_u).abs(),
        })
    })?;
    let max_bias = strategies.iter().map(|s| s.bias).fold(0.0, f64::max);
    Ok(BiasReport {
        n: cfg.n,
        depth: cfg.depth,
        samples: cfg.samples,
        seed: cfg.seed,
        strategies,
        max_bias,
    })
}
