use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

use super::BitString;

/// Truth table of `f : {0,1}^n -> {0,1}`.
///
/// Position `x` of the table holds `f(x)`, where `x` is read as an
/// `n`-bit vector with bit `j` of the integer being coordinate `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    table: BitString,
}

impl BooleanFunction {
    pub fn new(n: usize, table: BitString) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("boolean function needs n >= 1"));
        }
        if n >= usize::BITS as usize || table.len() != 1 << n {
            return Err(Error::usage(format!(
                "truth table of length {} does not match n = {n}",
                table.len()
            )));
        }
        Ok(BooleanFunction { n, table })
    }

    /// Wraps a table whose length is a power of two `2^n`, `n >= 1`.
    pub fn from_table(table: BitString) -> Result<Self> {
        let len = table.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::usage(format!("table length {len} is not a power of two >= 2")));
        }
        Self::new(len.trailing_zeros() as usize, table)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        let table = BitString::from_bits((0..1usize << n).map(f));
        Self::new(n, table).expect("valid by construction")
    }

    pub fn constant(n: usize, value: bool) -> Self {
        let table = if value {
            BitString::ones(1 << n)
        } else {
            BitString::zeros(1 << n)
        };
        Self::new(n, table).expect("valid by construction")
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::new(n, BitString::random(1 << n, rng)).expect("valid by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N = 2^n`, the length of the table.
    pub fn size(&self) -> usize {
        self.table.len()
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        self.table.get(x)
    }

    pub fn eval_vec(&self, x: &BitString) -> bool {
        assert_eq!(x.len(), self.n);
        self.table.get(x.to_index() as usize)
    }

    pub fn table(&self) -> &BitString {
        &self.table
    }

    pub fn into_table(self) -> BitString {
        self.table
    }

    /// Hamming distance between truth tables.
    pub fn distance(&self, other: &BooleanFunction) -> usize {
        self.table.hamming(&other.table)
    }

    /// Parses the truth-table file format: `n=<int>` on the first line,
    /// then either `2^n` characters over `{0,1}` in position order or a
    /// `0x`-prefixed hex number whose bit `x` is `f(x)`.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty truth-table file"))?;
        let n: usize = header
            .trim()
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::parse(hl + 1, format!("expected `n=<int>`, found {header:?}")))?;
        if n == 0 || n > 30 {
            return Err(Error::parse(hl + 1, format!("unsupported n = {n}")));
        }
        let (bl, body) = lines
            .next()
            .ok_or_else(|| Error::parse(hl + 2, "missing truth-table body"))?;
        let body = body.trim();
        let len = 1usize << n;
        let table = if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
            parse_hex(hex, len).map_err(|m| Error::parse(bl + 1, m))?
        } else {
            if body.len() != len {
                return Err(Error::parse(
                    bl + 1,
                    format!("expected {len} table characters, found {}", body.len()),
                ));
            }
            body.parse::<BitString>().map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(bl + 1, message),
                other => other,
            })?
        };
        if let Some((extra, _)) = lines.next() {
            return Err(Error::parse(extra + 1, "unexpected trailing content"));
        }
        Self::new(n, table)
    }

    pub fn to_file_string(&self) -> String {
        format!("n={}\n{}\n", self.n, self.table)
    }
}

fn parse_hex(hex: &str, len: usize) -> std::result::Result<BitString, String> {
    if hex.is_empty() {
        return Err("empty hex literal".into());
    }
    let mut table = BitString::zeros(len);
    // Most-significant nibble first: the last digit covers positions 0..4.
    for (pos, c) in hex.chars().rev().enumerate() {
        let nib = c.to_digit(16).ok_or_else(|| format!("invalid hex digit {c:?}"))?;
        for b in 0..4 {
            if nib >> b & 1 == 1 {
                let idx = 4 * pos + b;
                if idx >= len {
                    return Err(format!("hex value exceeds {len} table bits"));
                }
                table.set(idx, true);
            }
        }
    }
    Ok(table)
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={}, {})", self.n, self.table)
    }
}

impl FromStr for BooleanFunction {
    type Err = Error;

    /// Bare table in position order, length `2^n`.
    fn from_str(s: &str) -> Result<Self> {
        Self::from_table(s.parse()?)
    }
}
