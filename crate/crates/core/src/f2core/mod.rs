//! Bit-level foundations: vectors over F_2, reduced bases, truth tables,
//! the Hadamard code and exact brute-force distance oracles.
//!
//! One index convention holds crate-wide: a position `i` of a length-`2^m`
//! string is read as the `m`-bit vector whose coordinate `j` is bit `j` of
//! the integer `i`. Hadamard encoding, the classical tester's `x_{2^i}`
//! probes and the simulator's measurement labels all follow it.

mod basis;
mod bitstring;
mod boolfn;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::RngCore;

pub use basis::{orthogonal_space, reduced_bases, Basis};
pub use bitstring::BitString;
pub use boolfn::BooleanFunction;

use crate::error::{Error, Result};

/// `log2(n)` when `n` is a power of two.
pub fn exact_log2(n: usize) -> Option<usize> {
    n.is_power_of_two().then(|| n.trailing_zeros() as usize)
}

/// The Hadamard codeword of `y`: position `i` holds `y . i`.
pub fn hadamard_encode(y: &BitString) -> BitString {
    let m = y.len();
    assert!(m < 32, "hadamard code of a {m}-bit message is too long");
    let yv = y.to_index();
    BitString::from_bits((0..1u64 << m).map(|i| (yv & i).count_ones() & 1 == 1))
}

/// A property of length-`n` strings with an exact distance oracle.
///
/// Implementations guarantee `distance(x) == 0` exactly when `contains(x)`.
pub trait PropertySpec {
    fn input_len(&self) -> usize;
    fn contains(&self, x: &BitString) -> bool;
    /// Hamming distance from `x` to the nearest member.
    fn distance(&self, x: &BitString) -> usize;
    fn sample_member(&self, rng: &mut dyn RngCore) -> BitString;
}

/// `P_A`: Hadamard codewords of the messages in `A`.
#[derive(Clone, Debug)]
pub struct HadamardSubset {
    log_n: usize,
    messages: Vec<BitString>,
    lookup: HashSet<BitString>,
}

impl HadamardSubset {
    pub fn new(log_n: usize, messages: impl IntoIterator<Item = BitString>) -> Result<Self> {
        let mut messages: Vec<BitString> = messages.into_iter().collect();
        if let Some(bad) = messages.iter().find(|y| y.len() != log_n) {
            return Err(Error::usage(format!("message {bad} is not {log_n} bits long")));
        }
        messages.sort();
        messages.dedup();
        if messages.is_empty() {
            return Err(Error::usage("A must be nonempty"));
        }
        let lookup = messages.iter().cloned().collect();
        Ok(HadamardSubset {
            log_n,
            messages,
            lookup,
        })
    }

    /// A-set file: one `log n`-bit string per line (index order), blank
    /// lines and `#` comments ignored.
    pub fn parse(log_n: usize, text: &str) -> Result<Self> {
        let mut messages = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let y: BitString = line.parse().map_err(|_| Error::parse(i + 1, format!("bad bit string {line:?}")))?;
            if y.len() != log_n {
                return Err(Error::parse(i + 1, format!("expected {log_n} bits, found {}", y.len())));
            }
            messages.push(y);
        }
        Self::new(log_n, messages)
    }

    pub fn log_n(&self) -> usize {
        self.log_n
    }

    pub fn messages(&self) -> &[BitString] {
        &self.messages
    }

    pub fn contains_message(&self, y: &BitString) -> bool {
        self.lookup.contains(y)
    }
}

impl PropertySpec for HadamardSubset {
    fn input_len(&self) -> usize {
        1 << self.log_n
    }

    fn contains(&self, x: &BitString) -> bool {
        self.distance(x) == 0
    }

    fn distance(&self, x: &BitString) -> usize {
        distance_to_pa(x, &self.messages).expect("validated at construction")
    }

    fn sample_member(&self, rng: &mut dyn RngCore) -> BitString {
        hadamard_encode(self.messages.choose(rng).expect("nonempty"))
    }
}

/// `min_{y in A} Hamming(x, h(y))`, by enumeration of `A`.
pub fn distance_to_pa(x: &BitString, a: &[BitString]) -> Result<usize> {
    let first = a.first().ok_or_else(|| Error::usage("A must be nonempty"))?;
    let m = first.len();
    if x.len() != 1 << m {
        return Err(Error::usage(format!(
            "input of length {} does not match {m}-bit messages",
            x.len()
        )));
    }
    a.iter()
        .map(|y| {
            if y.len() != m {
                return Err(Error::usage("messages of mixed lengths"));
            }
            Ok(x.hamming(&hadamard_encode(y)))
        })
        .try_fold(usize::MAX, |best, d| d.map(|d| best.min(d)))
}

mod serde_impls {
    use super::{BitString, BooleanFunction};
    use serde::{Deserialize, Serialize};
    use serde::{Deserializer, Serializer};

    impl Serialize for BitString {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_str(self)
        }
    }

    impl<'de> Deserialize<'de> for BitString {
        fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
            let s = String::deserialize(d)?;
            s.parse().map_err(serde::de::Error::custom)
        }
    }

    impl Serialize for BooleanFunction {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            self.table().serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for BooleanFunction {
        fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
            let table = BitString::deserialize(d)?;
            BooleanFunction::from_table(table).map_err(serde::de::Error::custom)
        }
    }
}
