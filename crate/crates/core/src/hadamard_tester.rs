//! Testers for `P_A`, the Hadamard codewords of a message set `A`.
//!
//! Three testers share one query-accounting oracle: the classical
//! candidate-extraction tester (`log n + k` reads), the quantum tester
//! (`k` BLR rounds followed by one Bernstein-Vazirani query, `3k + 1`
//! oracle calls, independent of `n`), and a generic consistency tester for
//! any explicit property of size `s`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2core::{exact_log2, hadamard_encode, BitString, HadamardSubset};
use crate::{Distribution, State};

/// Slack for ceilings of quotients that are integers in exact arithmetic.
const CEIL_SLACK: f64 = 1e-9;

pub(crate) fn ceil_clean(v: f64) -> usize {
    (v - CEIL_SLACK).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TesterConfig {
    pub epsilon: f64,
    /// Number of BLR rounds (quantum) or random spot checks (classical).
    pub blr_rounds: usize,
    pub seed: u64,
}

impl TesterConfig {
    /// Default rounds `k = ceil(2 / epsilon)`.
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(TesterConfig {
            epsilon,
            blr_rounds: default_rounds(epsilon),
            seed,
        })
    }

    pub fn with_rounds(mut self, rounds: usize) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::usage("at least one round is required"));
        }
        self.blr_rounds = rounds;
        Ok(self)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::usage(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

pub fn default_rounds(epsilon: f64) -> usize {
    ceil_clean(2.0 / epsilon).max(1)
}

/// One oracle access.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Query {
    /// A classical read of one position.
    Read(usize),
    /// One invocation of the XOR oracle on a superposition.
    Superposed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestOutcome {
    pub verdict: Verdict,
    pub queries: usize,
    pub transcript: Vec<Query>,
}

impl TestOutcome {
    fn from_oracle(verdict: Verdict, oracle: QueryOracle<'_>) -> Self {
        let transcript = oracle.transcript;
        TestOutcome {
            verdict,
            queries: transcript.len(),
            transcript,
        }
    }
}

/// Access to a hidden string `x` that logs every query.
#[derive(Debug)]
pub struct QueryOracle<'a> {
    x: &'a BitString,
    transcript: Vec<Query>,
}

impl<'a> QueryOracle<'a> {
    pub fn new(x: &'a BitString) -> Self {
        QueryOracle {
            x,
            transcript: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn read(&mut self, i: usize) -> bool {
        self.transcript.push(Query::Read(i));
        self.x.get(i)
    }

    /// Applies the XOR oracle for `x` (read as a truth table) to `state`.
    pub fn apply(&mut self, state: &mut State) -> Result<()> {
        state.oracle_xor_table(self.x)?;
        self.transcript.push(Query::Superposed);
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.transcript.len()
    }

    pub fn transcript(&self) -> &[Query] {
        &self.transcript
    }
}

fn require_pow2(n: usize) -> Result<usize> {
    match exact_log2(n) {
        Some(m) if m >= 1 => Ok(m),
        _ => Err(Error::usage(format!("input length {n} is not a power of two >= 2"))),
    }
}

fn check_matches(x_len: usize, a: &HadamardSubset) -> Result<usize> {
    let m = require_pow2(x_len)?;
    if m != a.log_n() {
        return Err(Error::usage(format!(
            "input of length {x_len} does not match {}-bit messages",
            a.log_n()
        )));
    }
    Ok(m)
}

/// Reads `x_{2^i}` for `i < log n` to form the candidate message, rejects
/// if it is outside `A`, then spot-checks `k` random positions against the
/// candidate's codeword.
pub fn classical_test_pa(mut oracle: QueryOracle<'_>, a: &HadamardSubset, cfg: &TesterConfig) -> Result<TestOutcome> {
    let m = check_matches(oracle.len(), a)?;
    let mut rng = cfg.rng();
    let y = BitString::from_bits((0..m).map(|i| oracle.read(1 << i)));
    if !a.contains_message(&y) {
        return Ok(TestOutcome::from_oracle(Verdict::Reject, oracle));
    }
    let yv = y.to_index() as usize;
    for _ in 0..cfg.blr_rounds {
        let i = rng.gen_range(0..oracle.len());
        if oracle.read(i) != ((yv & i).count_ones() & 1 == 1) {
            return Ok(TestOutcome::from_oracle(Verdict::Reject, oracle));
        }
    }
    Ok(TestOutcome::from_oracle(Verdict::Accept, oracle))
}

/// One linearity check `x_i xor x_j == x_{i xor j}`; returns `true` on pass.
pub fn blr_round<R: Rng + ?Sized>(oracle: &mut QueryOracle<'_>, rng: &mut R) -> Result<bool> {
    let n = oracle.len();
    require_pow2(n)?;
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    let xi = oracle.read(i);
    let xj = oracle.read(j);
    let xij = oracle.read(i ^ j);
    Ok(xi ^ xj == xij)
}

fn bv_circuit(oracle: &mut QueryOracle<'_>) -> Result<State> {
    let m = require_pow2(oracle.len())?;
    let mut state = State::init(m, 0)?;
    state.prepare_y_minus();
    state.hadamard_x();
    oracle.apply(&mut state)?;
    state.hadamard_x();
    Ok(state)
}

/// Bernstein-Vazirani with a single oracle call; returns the measured message.
pub fn bv_extract<R: Rng + ?Sized>(oracle: &mut QueryOracle<'_>, rng: &mut R) -> Result<BitString> {
    let mut state = bv_circuit(oracle)?;
    Ok(state.measure_x(rng))
}

/// Exact distribution of the Bernstein-Vazirani measurement on `x`.
pub fn bv_distribution(x: &BitString) -> Result<Distribution> {
    let mut oracle = QueryOracle::new(x);
    Ok(bv_circuit(&mut oracle)?.x_distribution())
}

/// `k` BLR rounds (reject on the first failure), then one
/// Bernstein-Vazirani query; accept iff the recovered message is in `A`.
pub fn quantum_test_pa(x: &BitString, a: &HadamardSubset, cfg: &TesterConfig) -> Result<TestOutcome> {
    check_matches(x.len(), a)?;
    let mut rng = cfg.rng();
    let mut oracle = QueryOracle::new(x);
    for _ in 0..cfg.blr_rounds {
        if !blr_round(&mut oracle, &mut rng)? {
            return Ok(TestOutcome::from_oracle(Verdict::Reject, oracle));
        }
    }
    let y = bv_extract(&mut oracle, &mut rng)?;
    let verdict = if a.contains_message(&y) {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(TestOutcome::from_oracle(verdict, oracle))
}

/// `ceil(2 (ln s + 1) / epsilon)`.
pub fn generic_budget(s: usize, epsilon: f64) -> usize {
    ceil_clean(2.0 * ((s as f64).ln() + 1.0) / epsilon)
}

/// Reads `ceil(2 (ln s + 1) / epsilon)` uniform positions and accepts iff
/// some member of `members` agrees with every answer.
pub fn generic_test(mut oracle: QueryOracle<'_>, members: &[BitString], cfg: &TesterConfig) -> Result<TestOutcome> {
    if members.is_empty() {
        return Err(Error::usage("property must have at least one member"));
    }
    let n = oracle.len();
    if n == 0 {
        return Err(Error::usage("empty input"));
    }
    if let Some(bad) = members.iter().find(|g| g.len() != n) {
        return Err(Error::usage(format!("member of length {} for input of length {n}", bad.len())));
    }
    let mut rng = cfg.rng();
    let q = generic_budget(members.len(), cfg.epsilon);
    let mut alive = vec![true; members.len()];
    for _ in 0..q {
        let i = rng.gen_range(0..n);
        let bit = oracle.read(i);
        for (g, ok) in members.iter().zip(alive.iter_mut()) {
            *ok &= g.get(i) == bit;
        }
    }
    let verdict = if alive.iter().any(|&ok| ok) {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(TestOutcome::from_oracle(verdict, oracle))
}

pub fn classical_budget(n: usize, rounds: usize) -> usize {
    exact_log2(n).expect("power of two") + rounds
}

pub fn quantum_budget(rounds: usize) -> usize {
    3 * rounds + 1
}

/// Exact single-round BLR pass probability, by enumerating all `(i, j)`.
pub fn blr_pass_probability(x: &BitString) -> f64 {
    let n = x.len();
    let mut pass = 0usize;
    for i in 0..n {
        for j in 0..n {
            if x.get(i) ^ x.get(j) == x.get(i ^ j) {
                pass += 1;
            }
        }
    }
    pass as f64 / (n * n) as f64
}

/// Exact acceptance probability of [`quantum_test_pa`] with `rounds` rounds.
pub fn quantum_acceptance_probability(x: &BitString, a: &HadamardSubset, rounds: usize) -> Result<f64> {
    check_matches(x.len(), a)?;
    let bv = bv_distribution(x)?;
    let in_a: f64 = a.messages().iter().map(|y| bv.prob(y)).sum();
    Ok(blr_pass_probability(x).powi(rounds as i32) * in_a)
}

/// Exact acceptance probability of [`classical_test_pa`].
pub fn classical_acceptance_probability(x: &BitString, a: &HadamardSubset, rounds: usize) -> Result<f64> {
    let m = check_matches(x.len(), a)?;
    let y = BitString::from_bits((0..m).map(|i| x.get(1 << i)));
    if !a.contains_message(&y) {
        return Ok(0.0);
    }
    let agree = 1.0 - x.hamming(&hadamard_encode(&y)) as f64 / x.len() as f64;
    Ok(agree.powi(rounds as i32))
}
