//! The language `L` of functions invariant under some nonzero shift
//! `x -> x xor s`, its exact oracles, and the quantum tester built from a
//! Simon-style sampling subroutine.
//!
//! [`subroutine_q`] runs the sampling circuit on the simulator;
//! [`closed_form_state`] evaluates the pre-measurement state directly, and
//! the two are cross-checked in tests. [`main_program`] repeats the
//! subroutine, growing a reduced basis of measured vectors until either a
//! long streak of zero outcomes (accept) or a full basis (reject).

use std::collections::HashMap;

use num_complex::Complex;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2core::{orthogonal_space, Basis, BitString, BooleanFunction, PropertySpec};
use crate::hadamard_tester::{ceil_clean, check_epsilon, QueryOracle, Verdict};
use crate::{Distribution, State};

/// Largest `n` for which [`exact_acceptance_probability`] branches exhaustively.
pub const EXACT_MAX_N: usize = 3;

/// `|{x : f(x) = f(x xor s)}|`.
pub fn n_s(f: &BooleanFunction, s: &BitString) -> usize {
    assert_eq!(s.len(), f.n(), "shift length differs from domain bits");
    let sv = s.to_index() as usize;
    (0..f.size()).filter(|&x| f.eval(x) == f.eval(x ^ sv)).count()
}

fn nonzero_shifts(n: usize) -> impl Iterator<Item = BitString> {
    (1u64..1 << n).map(move |v| BitString::from_index(v, n))
}

pub fn is_member(f: &BooleanFunction) -> bool {
    let size = f.size();
    nonzero_shifts(f.n()).any(|s| n_s(f, &s) == size)
}

/// `S = {s : f(x) = f(x xor s) for all x}` (including 0) and `S^perp`.
#[derive(Clone, Debug)]
pub struct PromiseSet {
    pub s: Basis,
    pub s_perp: Basis,
    pub elements: Vec<BitString>,
}

impl PromiseSet {
    pub fn is_trivial(&self) -> bool {
        self.s.is_empty()
    }
}

pub fn promise_set(f: &BooleanFunction) -> PromiseSet {
    let n = f.n();
    let size = f.size();
    let mut elements = vec![BitString::zeros(n)];
    elements.extend(nonzero_shifts(n).filter(|s| n_s(f, s) == size));
    let s = Basis::span_of(n, &elements);
    assert_eq!(elements.len(), 1 << s.len(), "promise set is not closed under xor");
    let s_perp = orthogonal_space(n, s.vectors());
    PromiseSet { s, s_perp, elements }
}

/// Exact distance to `L`: `min_{s != 0} (N - n_s) / 2`. For a fixed `s`
/// the cheapest invariant repair flips one point of each disagreeing pair.
pub fn distance_to_l(f: &BooleanFunction) -> usize {
    let size = f.size();
    nonzero_shifts(f.n())
        .map(|s| (size - n_s(f, &s)) / 2)
        .min()
        .expect("n >= 1 gives a nonzero shift")
}

/// `L` restricted to functions on `n` bits, as a property of truth tables.
#[derive(Clone, Copy, Debug)]
pub struct SimonLanguage {
    n: usize,
}

impl SimonLanguage {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(Error::usage(format!("unsupported domain size n = {n}")));
        }
        Ok(SimonLanguage { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn function(&self, x: &BitString) -> BooleanFunction {
        BooleanFunction::new(self.n, x.clone()).expect("table length checked by caller")
    }
}

impl PropertySpec for SimonLanguage {
    fn input_len(&self) -> usize {
        1 << self.n
    }

    fn contains(&self, x: &BitString) -> bool {
        is_member(&self.function(x))
    }

    fn distance(&self, x: &BitString) -> usize {
        distance_to_l(&self.function(x))
    }

    fn sample_member(&self, rng: &mut dyn RngCore) -> BitString {
        sample_p(self.n, rng).f.into_table()
    }
}

fn check_basis(f: &BooleanFunction, basis: &Basis) -> Result<()> {
    if basis.n() != f.n() {
        return Err(Error::usage(format!(
            "basis over F_2^{} for a function on {} bits",
            basis.n(),
            f.n()
        )));
    }
    basis.check()
}

fn q_circuit(oracle: &mut QueryOracle<'_>, n: usize, basis: &Basis) -> Result<State> {
    let k = basis.len();
    let mut state = State::init(n, k)?;
    state.hadamard_x();
    oracle.apply(&mut state)?;
    state.hadamard_x();
    for (j, (z, &i)) in basis.vectors().iter().zip(basis.leading()).enumerate() {
        state.cnot_x_to_z(i, j)?;
        state.xor_x_conditional(z, j)?;
        state.hadamard_z(j)?;
    }
    Ok(state)
}

/// Simulated state of the sampling circuit just before `X` is measured.
pub fn q_state(f: &BooleanFunction, basis: &Basis) -> Result<State> {
    check_basis(f, basis)?;
    let mut oracle = QueryOracle::new(f.table());
    q_circuit(&mut oracle, f.n(), basis)
}

/// One run of the sampling subroutine: a single oracle call followed by a
/// measurement of `X`.
pub fn subroutine_q<R: Rng + ?Sized>(
    oracle: &mut QueryOracle<'_>,
    basis: &Basis,
    rng: &mut R,
) -> Result<BitString> {
    let n = basis.n();
    if oracle.len() != 1 << n {
        return Err(Error::usage(format!(
            "oracle over {} positions for a basis in F_2^{n}",
            oracle.len()
        )));
    }
    basis.check()?;
    let mut state = q_circuit(oracle, n, basis)?;
    Ok(state.measure_x(rng))
}

/// Direct evaluation of the pre-measurement state:
/// `sqrt(2^k)/N * sum_x sum_{y : y[i_j] = 0} (-1)^{x.y} |y>|f(x)>|x.z_1 ... x.z_k>`.
pub fn closed_form_state(f: &BooleanFunction, basis: &Basis) -> Result<State> {
    check_basis(f, basis)?;
    let n = f.n();
    let k = basis.len();
    let size = f.size();
    let coeff = (2f64.powi(k as i32)).sqrt() / size as f64;
    let pivot_mask: usize = basis.leading().iter().map(|&i| 1usize << i).sum();
    let zs: Vec<usize> = basis.vectors().iter().map(|z| z.to_index() as usize).collect();
    let mut amp = vec![Complex::new(0.0, 0.0); 1 << (n + 1 + k)];
    for x in 0..size {
        let c: usize = zs
            .iter()
            .enumerate()
            .map(|(j, &z)| ((x & z).count_ones() as usize & 1) << j)
            .sum();
        let fx = usize::from(f.eval(x));
        for y in (0..size).filter(|y| y & pivot_mask == 0) {
            let sign = if (x & y).count_ones() & 1 == 1 { -coeff } else { coeff };
            let idx = y | (fx << n) | (c << (n + 1));
            amp[idx].re += sign;
        }
    }
    State::from_amplitudes(n, k, amp)
}

/// The cosets `D_c = {x : x.z_j = c[j] for all j}`, indexed by the integer
/// with bit `j` equal to `c[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetPartition {
    k: usize,
    cosets: Vec<Vec<usize>>,
}

impl CosetPartition {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    pub fn coset(&self, c: &BitString) -> &[usize] {
        &self.cosets[c.to_index() as usize]
    }
}

pub fn coset_partition(basis: &Basis) -> CosetPartition {
    let k = basis.len();
    let zs: Vec<usize> = basis.vectors().iter().map(|z| z.to_index() as usize).collect();
    let mut cosets = vec![Vec::new(); 1 << k];
    for x in 0..1usize << basis.n() {
        let c: usize = zs
            .iter()
            .enumerate()
            .map(|(j, &z)| ((x & z).count_ones() as usize & 1) << j)
            .sum();
        cosets[c].push(x);
    }
    CosetPartition { k, cosets }
}

pub fn is_coset_constant(f: &BooleanFunction, basis: &Basis) -> bool {
    coset_partition(basis).cosets.iter().all(|d| {
        let first = f.eval(d[0]);
        d.iter().all(|&x| f.eval(x) == first)
    })
}

/// Nearest coset-constant function, by majority vote inside each coset.
pub fn coset_majority(f: &BooleanFunction, basis: &Basis) -> BooleanFunction {
    let mut table = f.table().clone();
    for d in coset_partition(basis).cosets {
        let ones = d.iter().filter(|&&x| f.eval(x)).count();
        let value = 2 * ones > d.len();
        for x in d {
            table.set(x, value);
        }
    }
    BooleanFunction::new(f.n(), table).expect("same shape as f")
}

/// Repetitions per stage: `ceil(2 log2(n) / eps^2)`, at least 1.
pub fn repetition_bound(n: usize, epsilon: f64) -> usize {
    ceil_clean(2.0 * (n as f64).log2() / (epsilon * epsilon)).max(1)
}

/// The full trace of one run of [`main_program`].
#[derive(Clone, Debug)]
pub struct SimonRun {
    pub verdict: Verdict,
    pub oracle_calls: usize,
    /// Basis grown from the nonzero measurements.
    pub basis: Basis,
    /// Nonzero outcomes that extended the basis, in order.
    pub measured: Vec<BitString>,
    /// Subroutine calls spent in each stage.
    pub stage_calls: Vec<usize>,
}

/// Caches the outcome distribution of the sampling circuit for one basis.
///
/// The circuit output depends only on `(f, basis)`, so every call within a
/// stage draws from the same distribution; each draw stands for one fresh
/// run of the subroutine and one oracle invocation.
struct StageSampler {
    dist: Distribution,
}

impl StageSampler {
    fn new(f: &BooleanFunction, basis: &Basis) -> Result<Self> {
        Ok(StageSampler {
            dist: q_state(f, basis)?.x_distribution(),
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        BitString::from_index(self.dist.sample(rng) as u64, self.dist.n())
    }
}

/// Checks that a nonzero outcome `z` extends `basis` with a fresh pivot.
fn check_extension(basis: &Basis, z: &BitString) -> Result<()> {
    let lead = z.leading_index().expect("nonzero");
    if basis.leading().contains(&lead) {
        return Err(Error::Consistency(format!(
            "measured {z} has leading index {lead} already used by the basis"
        )));
    }
    if basis.contains(z) {
        return Err(Error::Consistency(format!("measured {z} depends on the basis")));
    }
    Ok(())
}

/// The quantum tester for `L`.
///
/// For `k = 0 .. n-1`: draw up to [`repetition_bound`] outcomes; if all are
/// zero, accept; otherwise extend the basis with the first nonzero one.
/// Reject after `n` extensions.
pub fn main_program<R: Rng + ?Sized>(f: &BooleanFunction, epsilon: f64, rng: &mut R) -> Result<SimonRun> {
    check_epsilon(epsilon)?;
    let n = f.n();
    let bound = repetition_bound(n, epsilon);
    let mut basis = Basis::empty(n);
    let mut measured = Vec::new();
    let mut stage_calls = Vec::new();
    let mut oracle_calls = 0;
    for _ in 0..n {
        let sampler = StageSampler::new(f, &basis)?;
        let mut calls = 0;
        let mut z = BitString::zeros(n);
        while calls < bound {
            z = sampler.draw(rng);
            calls += 1;
            if !z.is_zero() {
                break;
            }
        }
        oracle_calls += calls;
        stage_calls.push(calls);
        if z.is_zero() {
            return Ok(SimonRun {
                verdict: Verdict::Accept,
                oracle_calls,
                basis,
                measured,
                stage_calls,
            });
        }
        check_extension(&basis, &z)?;
        basis.insert(&z);
        measured.push(z);
    }
    Ok(SimonRun {
        verdict: Verdict::Reject,
        oracle_calls,
        basis,
        measured,
        stage_calls,
    })
}

/// Exact acceptance probability of [`main_program`], branching over every
/// nonzero outcome with its probability (`n <= 3`).
pub fn exact_acceptance_probability(f: &BooleanFunction, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if f.n() > EXACT_MAX_N {
        return Err(Error::usage(format!(
            "exact mode supports n <= {EXACT_MAX_N}, got n = {}",
            f.n()
        )));
    }
    let bound = repetition_bound(f.n(), epsilon) as i32;
    let mut memo = HashMap::new();
    accept_from(f, &Basis::empty(f.n()), bound, &mut memo)
}

fn accept_from(
    f: &BooleanFunction,
    basis: &Basis,
    bound: i32,
    memo: &mut HashMap<Vec<BitString>, f64>,
) -> Result<f64> {
    if basis.len() == f.n() {
        return Ok(0.0);
    }
    // Stage outcomes depend on the span only; the reduced basis of a span
    // is unique up to order, so sorting gives a span key.
    let mut key = basis.vectors().to_vec();
    key.sort();
    if let Some(&p) = memo.get(&key) {
        return Ok(p);
    }
    let dist = q_state(f, basis)?.x_distribution();
    let p0 = dist.prob_index(0).min(1.0);
    let all_zero = p0.powi(bound);
    let mut p = all_zero;
    let nonzero = 1.0 - p0;
    if nonzero > 1e-15 {
        for (z, pz) in dist.support(0.0) {
            if z.is_zero() {
                continue;
            }
            check_extension(basis, &z)?;
            let next = basis.rank_extend(&z).expect("checked independent");
            p += (1.0 - all_zero) * (pz / nonzero) * accept_from(f, &next, bound, memo)?;
        }
    }
    memo.insert(key, p);
    Ok(p)
}

/// An atomic event of the member distribution: the shift and the function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedSample {
    pub s: BitString,
    pub f: BooleanFunction,
}

/// Uniform nonzero `s`, then one uniform bit per pair `{x, x xor s}`.
pub fn sample_p<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PairedSample {
    let size = 1usize << n;
    let sv = rng.gen_range(1..size);
    let mut table = BitString::zeros(size);
    for x in 0..size {
        let partner = x ^ sv;
        if x < partner {
            let bit = rng.gen_bool(0.5);
            table.set(x, bit);
            table.set(partner, bit);
        }
    }
    PairedSample {
        s: BitString::from_index(sv as u64, n),
        f: BooleanFunction::new(n, table).expect("valid shape"),
    }
}

/// `N` independent uniform bits.
pub fn sample_u<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BooleanFunction {
    BooleanFunction::random(n, rng)
}

/// Draws from `U` until the sample is at least `min_distance` from `L`.
pub fn sample_far<R: Rng + ?Sized>(n: usize, min_distance: usize, rng: &mut R) -> Result<BooleanFunction> {
    for _ in 0..10_000 {
        let f = sample_u(n, rng);
        if distance_to_l(&f) >= min_distance {
            return Ok(f);
        }
    }
    Err(Error::usage(format!(
        "no function at distance >= {min_distance} from L found for n = {n}"
    )))
}
