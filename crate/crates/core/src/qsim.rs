//! Dense state-vector simulator over the workspace `X (x) Y (x) Z`.
//!
//! `X` holds `n` qubits, `Y` one qubit and `Z` holds `k` qubits. A basis
//! label is the `(n+1+k)`-bit string `x | y | z`; qubit `q` of the label is
//! bit `q` of the amplitude index, so the `X` value occupies the low `n`
//! bits exactly as a truth-table position would.

use std::fmt::Write as _;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::f2core::{BitString, BooleanFunction};
use crate::scalar::Real;

/// Largest register the simulator agrees to allocate.
pub const MAX_QUBITS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState<T: Real> {
    n: usize,
    k: usize,
    amp: Vec<Complex<T>>,
}

/// Marginal distribution of the `X` register, indexed by the integer label.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<T: Real> {
    n: usize,
    probs: Vec<T>,
}

impl<T: Real> OutcomeDistribution<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prob(&self, x: &BitString) -> T {
        assert_eq!(x.len(), self.n);
        self.probs[x.to_index() as usize]
    }

    pub fn prob_index(&self, x: usize) -> T {
        self.probs[x]
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |a, &p| a + p)
    }

    /// Outcomes with nonzero mass above `tol`, as bit strings.
    pub fn support(&self, tol: T) -> impl Iterator<Item = (BitString, T)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(move |(_, &p)| p > tol)
            .map(|(x, &p)| (BitString::from_index(x as u64, self.n), p))
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (x, p) in self.probs.iter().enumerate() {
            let p = p.to_f64().unwrap_or(0.0);
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = x;
            if u < acc {
                return x;
            }
        }
        last
    }
}

impl<T: Real> QuantumState<T> {
    /// `|0^n>|0>|0^k>`.
    pub fn init(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("X register needs at least one qubit"));
        }
        if n + 1 + k > MAX_QUBITS {
            return Err(Error::usage(format!("{} qubits exceed the simulator limit", n + 1 + k)));
        }
        let mut amp = vec![Complex::new(T::zero(), T::zero()); 1 << (n + 1 + k)];
        amp[0] = Complex::new(T::one(), T::zero());
        Ok(QuantumState { n, k, amp })
    }

    /// Builds a state from raw amplitudes; the caller is responsible for
    /// normalisation.
    pub fn from_amplitudes(n: usize, k: usize, amp: Vec<Complex<T>>) -> Result<Self> {
        if n == 0 || n + 1 + k > MAX_QUBITS || amp.len() != 1 << (n + 1 + k) {
            return Err(Error::usage(format!(
                "{} amplitudes do not fit a workspace with n = {n}, k = {k}",
                amp.len()
            )));
        }
        Ok(QuantumState { n, k, amp })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_qubits(&self) -> usize {
        self.n + 1 + self.k
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amp
    }

    /// Amplitude of `|x>|y>|z>` with integer register values.
    pub fn amplitude(&self, x: usize, y: usize, z: usize) -> Complex<T> {
        self.amp[self.index(x, y, z)]
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x | (y << self.n) | (z << (self.n + 1))
    }

    pub fn norm_sq(&self) -> T {
        self.amp.iter().fold(T::zero(), |a, c| a + c.norm_sqr())
    }

    /// Largest `|a_i - b_i|` over all amplitudes.
    pub fn max_deviation(&self, other: &QuantumState<T>) -> T {
        assert_eq!(self.amp.len(), other.amp.len(), "states of different dimension");
        self.amp
            .iter()
            .zip(&other.amp)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    fn y_qubit(&self) -> usize {
        self.n
    }

    fn z_qubit(&self, j: usize) -> Result<usize> {
        if j >= self.k {
            return Err(Error::usage(format!("Z qubit {j} out of range (k = {})", self.k)));
        }
        Ok(self.n + 1 + j)
    }

    fn x_qubit(&self, i: usize) -> Result<usize> {
        if i >= self.n {
            return Err(Error::usage(format!("X qubit {i} out of range (n = {})", self.n)));
        }
        Ok(i)
    }

    fn h(&mut self, q: usize) {
        let s = T::FRAC_1_SQRT_2();
        let bit = 1usize << q;
        for base in 0..self.amp.len() {
            if base & bit == 0 {
                let a = self.amp[base];
                let b = self.amp[base | bit];
                self.amp[base] = (a + b) * s;
                self.amp[base | bit] = (a - b) * s;
            }
        }
    }

    fn not(&mut self, q: usize) {
        let bit = 1usize << q;
        for base in 0..self.amp.len() {
            if base & bit == 0 {
                self.amp.swap(base, base | bit);
            }
        }
    }

    /// `H_{2^n}` on `X`: a single-qubit Hadamard on each `X` qubit.
    pub fn hadamard_x(&mut self) {
        for q in 0..self.n {
            self.h(q);
        }
    }

    /// `H_2` on `Z_j`.
    pub fn hadamard_z(&mut self, z_qubit: usize) -> Result<()> {
        let q = self.z_qubit(z_qubit)?;
        self.h(q);
        Ok(())
    }

    /// Puts `Y` into `(|0> - |1>)/sqrt 2` when it starts in `|0>`: NOT, then H.
    pub fn prepare_y_minus(&mut self) {
        let q = self.y_qubit();
        self.not(q);
        self.h(q);
    }

    /// `|x, y, z> -> |x, y xor f(x), z>`.
    pub fn oracle_xor(&mut self, f: &BooleanFunction) -> Result<()> {
        self.oracle_xor_table(f.table())
    }

    /// [`QuantumState::oracle_xor`] for a bare table of length `2^n`.
    pub fn oracle_xor_table(&mut self, table: &BitString) -> Result<()> {
        if table.len() != 1 << self.n {
            return Err(Error::usage(format!(
                "oracle table of length {} does not match an {}-qubit X register",
                table.len(),
                self.n
            )));
        }
        let xmask = (1usize << self.n) - 1;
        let ybit = 1usize << self.n;
        for base in 0..self.amp.len() {
            if base & ybit == 0 && table.get(base & xmask) {
                self.amp.swap(base, base | ybit);
            }
        }
        Ok(())
    }

    /// CNOT with control `X_i` and target `Z_j`.
    pub fn cnot_x_to_z(&mut self, x_qubit: usize, z_qubit: usize) -> Result<()> {
        let c = 1usize << self.x_qubit(x_qubit)?;
        let t = 1usize << self.z_qubit(z_qubit)?;
        for base in 0..self.amp.len() {
            if base & c != 0 && base & t == 0 {
                self.amp.swap(base, base | t);
            }
        }
        Ok(())
    }

    /// `|x> -> |x xor z_vec>` on `X`, on branches where `Z_j = 1`.
    pub fn xor_x_conditional(&mut self, z_vec: &BitString, z_qubit: usize) -> Result<()> {
        if z_vec.len() != self.n {
            return Err(Error::usage(format!(
                "shift vector of length {} on an {}-qubit X register",
                z_vec.len(),
                self.n
            )));
        }
        let t = 1usize << self.z_qubit(z_qubit)?;
        let shift = z_vec.to_index() as usize;
        if shift == 0 {
            return Ok(());
        }
        // Visit each pair {i, i ^ shift} once, from its lower member.
        for base in 0..self.amp.len() {
            if base & t != 0 {
                let other = base ^ shift;
                if base < other {
                    self.amp.swap(base, other);
                }
            }
        }
        Ok(())
    }

    pub fn x_distribution(&self) -> OutcomeDistribution<T> {
        let xmask = (1usize << self.n) - 1;
        let mut probs = vec![T::zero(); 1 << self.n];
        for (i, a) in self.amp.iter().enumerate() {
            probs[i & xmask] = probs[i & xmask] + a.norm_sqr();
        }
        OutcomeDistribution { n: self.n, probs }
    }

    /// `||P_0 |psi>||^2`: the probability of reading `0^n` on `X`.
    pub fn p0_norm_sq(&self) -> T {
        let xmask = (1usize << self.n) - 1;
        self.amp
            .iter()
            .enumerate()
            .filter(|(i, _)| i & xmask == 0)
            .fold(T::zero(), |a, (_, c)| a + c.norm_sqr())
    }

    /// Measures `X`, collapsing the state onto the observed label.
    pub fn measure_x<R: Rng + ?Sized>(&mut self, rng: &mut R) -> BitString {
        let dist = self.x_distribution();
        let x = dist.sample(rng);
        let p = dist.probs[x];
        let xmask = (1usize << self.n) - 1;
        let scale = T::one() / p.sqrt();
        for (i, a) in self.amp.iter_mut().enumerate() {
            if i & xmask == x {
                *a = *a * scale;
            } else {
                *a = Complex::new(T::zero(), T::zero());
            }
        }
        BitString::from_index(x as u64, self.n)
    }

    /// Text dump: one `index(label) re im` line per amplitude with
    /// magnitude above `1e-12`, label written as `x|y|z` bits in index order.
    pub fn dump(&self) -> String {
        let cutoff = T::lit(1e-12);
        let mut out = String::new();
        let xmask = (1usize << self.n) - 1;
        for (i, a) in self.amp.iter().enumerate() {
            if a.norm() <= cutoff {
                continue;
            }
            let x = BitString::from_index((i & xmask) as u64, self.n);
            let y = (i >> self.n) & 1;
            let z = BitString::from_index((i >> (self.n + 1)) as u64, self.k);
            writeln!(out, "{i}({x}|{y}|{z}) {:.12} {:.12}", a.re, a.im).expect("write to string");
        }
        out
    }
}
