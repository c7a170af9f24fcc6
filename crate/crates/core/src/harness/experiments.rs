use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{derive_seed, run_indexed, RunOptions, TrialRecord};
use crate::error::{Error, Result};
use crate::f2core::{exact_log2, hadamard_encode, BitString, BooleanFunction, HadamardSubset, PropertySpec};
use crate::hadamard_tester::{
    check_epsilon, classical_test_pa, generic_test, quantum_test_pa, QueryOracle, TestOutcome, TesterConfig,
};
use crate::simon_tester::{main_program, sample_far, sample_p};

/// Which P_A tester to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TesterMode {
    Classical,
    Quantum,
    Generic,
}

impl TesterMode {
    pub fn run(self, x: &BitString, a: &HadamardSubset, cfg: &TesterConfig) -> Result<TestOutcome> {
        match self {
            TesterMode::Classical => classical_test_pa(QueryOracle::new(x), a, cfg),
            TesterMode::Quantum => quantum_test_pa(x, a, cfg),
            TesterMode::Generic => {
                let members: Vec<_> = a.messages().iter().map(hadamard_encode).collect();
                generic_test(QueryOracle::new(x), &members, cfg)
            }
        }
    }
}

impl fmt::Display for TesterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TesterMode::Classical => "classical",
            TesterMode::Quantum => "quantum",
            TesterMode::Generic => "generic",
        })
    }
}

impl FromStr for TesterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(TesterMode::Classical),
            "quantum" => Ok(TesterMode::Quantum),
            "generic" => Ok(TesterMode::Generic),
            other => Err(Error::usage(format!("unknown tester mode {other:?}"))),
        }
    }
}

/// Where a Hadamard trial gets its input.
#[derive(Clone, Debug)]
pub enum HadamardInput {
    Fixed(BitString),
    /// A fresh uniform codeword of `A` per trial.
    Member,
    /// A fresh random string more than `eps * n` from `P_A` per trial.
    Far,
}

impl HadamardInput {
    pub fn label(&self) -> &'static str {
        match self {
            HadamardInput::Fixed(_) => "fixed",
            HadamardInput::Member => "member",
            HadamardInput::Far => "far",
        }
    }

    fn draw(&self, a: &HadamardSubset, eps: f64, rng: &mut ChaCha8Rng) -> Result<BitString> {
        match self {
            HadamardInput::Fixed(x) => Ok(x.clone()),
            HadamardInput::Member => Ok(a.sample_member(rng)),
            HadamardInput::Far => sample_far_pa(a, eps, rng),
        }
    }
}

/// Rejection-samples a uniform string at distance `> eps * n` from `P_A`.
pub fn sample_far_pa<R: Rng + ?Sized>(a: &HadamardSubset, eps: f64, rng: &mut R) -> Result<BitString> {
    let n = a.input_len();
    for _ in 0..10_000 {
        let x = BitString::random(n, rng);
        if a.distance(&x) as f64 > eps * n as f64 {
            return Ok(x);
        }
    }
    Err(Error::usage(format!("no input more than {eps}-far from P_A found at n = {n}")))
}

/// A uniformly random subset of `{0,1}^log_n` of size `2^log_n / 2` (at least 1).
pub fn random_half_subset<R: Rng + ?Sized>(log_n: usize, rng: &mut R) -> HadamardSubset {
    let total = 1usize << log_n;
    let picks = index::sample(rng, total, (total / 2).max(1));
    let mut idx = picks.into_vec();
    idx.sort_unstable();
    HadamardSubset::new(log_n, idx.into_iter().map(|v| BitString::from_index(v as u64, log_n))).expect("nonempty")
}

fn timed<T>(record: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<u64>)> {
    if !record {
        return f().map(|v| (v, None));
    }
    let start = Instant::now();
    let v = f()?;
    Ok((v, Some(start.elapsed().as_nanos() as u64)))
}

/// Runs one P_A tester `trials` times; trial `i` uses seed `derive_seed(seed, i)`.
#[allow(clippy::too_many_arguments)]
pub fn run_hadamard_trials(
    experiment: &str,
    input: &HadamardInput,
    a: &HadamardSubset,
    mode: TesterMode,
    eps: f64,
    trials: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<TrialRecord>> {
    check_epsilon(eps)?;
    if let HadamardInput::Fixed(x) = input {
        if x.len() != a.input_len() {
            return Err(Error::usage(format!(
                "input has length {}, expected {}",
                x.len(),
                a.input_len()
            )));
        }
    }
    run_indexed(trials, opts, |i| {
        let trial_seed = derive_seed(seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let x = input.draw(a, eps, &mut rng)?;
        let cfg = TesterConfig::new(eps, rng.next_u64())?;
        let (out, wall) = timed(opts.record_time, || mode.run(&x, a, &cfg))?;
        Ok(TrialRecord {
            experiment: experiment.to_string(),
            input: input.label().to_string(),
            trial: i as u64,
            n: x.len(),
            eps,
            mode: mode.to_string(),
            seed: trial_seed,
            verdict: out.verdict,
            queries: out.queries,
            wall_time_ns: wall,
        })
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationConfig {
    /// Input lengths; each a power of two, at least 2.
    pub ns: Vec<usize>,
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Classical and quantum P_A testers on member and far inputs for every
/// `n` of the grid. `A` is a random half of the messages, fixed per `n`.
pub fn run_separation_hadamard(cfg: &SeparationConfig, opts: &RunOptions) -> Result<Vec<TrialRecord>> {
    check_epsilon(cfg.eps)?;
    if cfg.ns.is_empty() {
        return Err(Error::usage("empty grid of n"));
    }
    let mut records = Vec::new();
    let mut cell = 0u64;
    for (ni, &n) in cfg.ns.iter().enumerate() {
        let log_n = exact_log2(n)
            .filter(|&m| (1..=20).contains(&m))
            .ok_or_else(|| Error::usage(format!("n = {n} is not a power of two in 2..=2^20")))?;
        let mut a_rng = ChaCha8Rng::seed_from_u64(derive_seed(derive_seed(cfg.seed, 0), ni as u64));
        let a = random_half_subset(log_n, &mut a_rng);
        for input in [HadamardInput::Member, HadamardInput::Far] {
            for mode in [TesterMode::Classical, TesterMode::Quantum] {
                cell += 1;
                records.extend(run_hadamard_trials(
                    "separation",
                    &input,
                    &a,
                    mode,
                    cfg.eps,
                    cfg.trials,
                    derive_seed(cfg.seed, cell),
                    opts,
                )?);
            }
        }
    }
    Ok(records)
}

/// Where a Simon trial gets its function.
#[derive(Clone, Debug)]
pub enum SimonInput {
    Fixed(BooleanFunction),
    /// A fresh draw from the member distribution per trial.
    Member,
    /// A fresh uniform function at distance at least `min_distance` from L.
    Far { min_distance: usize },
}

impl SimonInput {
    pub fn label(&self) -> &'static str {
        match self {
            SimonInput::Fixed(_) => "fixed",
            SimonInput::Member => "member",
            SimonInput::Far { .. } => "far",
        }
    }
}

/// Runs the Simon main program `trials` times.
pub fn run_simon_trials(
    experiment: &str,
    input: &SimonInput,
    n: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<TrialRecord>> {
    check_epsilon(eps)?;
    if let SimonInput::Fixed(f) = input {
        if f.n() != n {
            return Err(Error::usage(format!("function has n = {}, expected {n}", f.n())));
        }
    }
    run_indexed(trials, opts, |i| {
        let trial_seed = derive_seed(seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let drawn;
        let f = match input {
            SimonInput::Fixed(f) => f,
            SimonInput::Member => {
                drawn = sample_p(n, &mut rng).f;
                &drawn
            }
            SimonInput::Far { min_distance } => {
                drawn = sample_far(n, *min_distance, &mut rng)?;
                &drawn
            }
        };
        let (run, wall) = timed(opts.record_time, || main_program(f, eps, &mut rng))?;
        Ok(TrialRecord {
            experiment: experiment.to_string(),
            input: input.label().to_string(),
            trial: i as u64,
            n,
            eps,
            mode: "quantum".to_string(),
            seed: trial_seed,
            verdict: run.verdict,
            queries: run.oracle_calls,
            wall_time_ns: wall,
        })
    })
}
