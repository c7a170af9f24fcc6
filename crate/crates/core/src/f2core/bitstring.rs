use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A fixed-length vector over F_2, packed into 64-bit words.
///
/// Bit `j` lives in word `j / 64` at bit `j % 64`. The text form lists
/// the bits in index order: character `j` is bit `j`. When a bit string
/// is identified with an integer, bit `j` carries weight `2^j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = BitString {
            len,
            words: vec![u64::MAX; word_count(len)],
        };
        b.mask_tail();
        b
    }

    /// The `len`-bit vector whose bit `j` is bit `j` of `value`.
    pub fn from_index(value: u64, len: usize) -> Self {
        assert!(len >= 64 || value >> len == 0, "value does not fit in {len} bits");
        let mut b = Self::zeros(len);
        if len > 0 {
            b.words[0] = value;
        }
        b
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if bit {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        BitString { len, words }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut b = BitString {
            len,
            words: (0..word_count(len)).map(|_| rng.gen()).collect(),
        };
        b.mask_tail();
        b
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Integer value with bit `j` weighted `2^j`. Only for lengths up to 64.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= WORD, "bit string of length {} has no u64 index", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len, "bit index {j} out of range for length {}", self.len);
        (self.words[j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, j: usize, bit: bool) {
        assert!(j < self.len, "bit index {j} out of range for length {}", self.len);
        let mask = 1u64 << (j % WORD);
        if bit {
            self.words[j / WORD] |= mask;
        } else {
            self.words[j / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, j: usize) {
        assert!(j < self.len, "bit index {j} out of range for length {}", self.len);
        self.words[j / WORD] ^= 1u64 << (j % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest index holding a one.
    pub fn leading_index(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "xor of bit strings with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn not(&self) -> BitString {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.mask_tail();
        out
    }

    /// `sum_j a[j] b[j] mod 2`.
    pub fn inner_product(&self, other: &BitString) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::usage(format!(
                "inner product of lengths {} and {}",
                self.len, other.len
            )));
        }
        Ok(self.dot(other))
    }

    /// Inner product without the length check; panics on mismatch.
    #[inline]
    pub(crate) fn dot(&self, other: &BitString) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn hamming(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len, "hamming distance of different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |j| self.get(j))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(1, format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::from_bits)
    }
}
