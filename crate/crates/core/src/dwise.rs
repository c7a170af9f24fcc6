//! An explicit d-wise independent sample space over GF(2^k).
//!
//! For `n = 2^k - 1` positions and `d = 2t + 1`, position `i` gets the
//! column `(1, a_i, a_i^3, ..., a_i^{2t-1})` flattened to `1 + tk` bits,
//! where `a_i = alpha^i` for a fixed primitive `alpha`. A seed `z` is a
//! `(1 + tk)`-bit vector and `xi_i(z) = z . column_i`. The sample space has
//! `2^{1+tk} = 2 (n+1)^t` points. Any `2t + 1` columns are linearly
//! independent (the dual of a BCH code with an all-ones row), which makes
//! every `d` coordinates jointly uniform.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use num_traits::{FromPrimitive, Num};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::f2core::{BitString, PropertySpec};

/// Primitive polynomials by degree, including the leading term.
const PRIMITIVE: [u32; 17] = [
    0, 0b11, 0b111, 0b1011, 0b1_0011, 0b10_0101, 0b100_0011, 0b1000_0011, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B,
    0x4443, 0x8003, 0x1100B,
];

/// GF(2^k) with elements as bit-packed polynomials over F_2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2k {
    k: u32,
    modulus: u32,
}

impl Gf2k {
    pub fn new(k: u32) -> Result<Self> {
        if !(1..=16).contains(&k) {
            return Err(Error::usage(format!("GF(2^{k}) is outside the table (1..=16)")));
        }
        Ok(Gf2k {
            k,
            modulus: PRIMITIVE[k as usize],
        })
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> u32 {
        1 << self.k
    }

    /// The class of `x`, a generator of the multiplicative group.
    pub fn generator(&self) -> u32 {
        if self.k == 1 {
            1
        } else {
            2
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    /// Carry-less multiply with reduction after each shift.
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let top = 1u32 << self.k;
        let mut a = a;
        let mut b = b;
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.pow(a, u64::from(self.order()) - 2))
    }

    /// Multiplicative order of `a`.
    pub fn element_order(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut acc = a;
        let mut ord = 1;
        while acc != 1 {
            acc = self.mul(acc, a);
            ord += 1;
        }
        Some(ord)
    }
}

#[derive(Clone, Debug)]
pub struct DWiseSpace {
    field: Gf2k,
    t: usize,
    n: usize,
    seed_bits: usize,
    columns: Vec<u64>,
}

impl DWiseSpace {
    pub fn new(k: u32, t: usize) -> Result<Self> {
        let field = Gf2k::new(k)?;
        let n = (1usize << k) - 1;
        if t == 0 || 2 * t + 1 > n {
            return Err(Error::usage(format!("need 1 <= t and d = 2t+1 <= n = {n}, got t = {t}")));
        }
        let seed_bits = 1 + t * k as usize;
        if seed_bits > 62 {
            return Err(Error::usage(format!("seed of {seed_bits} bits is too large")));
        }
        let alpha = field.generator();
        let columns = (0..n)
            .map(|i| {
                let a = field.pow(alpha, i as u64);
                let mut col = 1u64;
                for r in 0..t {
                    let v = field.pow(a, 2 * r as u64 + 1);
                    col |= u64::from(v) << (1 + r * k as usize);
                }
                col
            })
            .collect();
        Ok(DWiseSpace {
            field,
            t,
            n,
            seed_bits,
            columns,
        })
    }

    pub fn field(&self) -> &Gf2k {
        &self.field
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `d = 2t + 1`.
    pub fn d(&self) -> usize {
        2 * self.t + 1
    }

    /// Number of positions `n = 2^k - 1`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed_bits(&self) -> usize {
        self.seed_bits
    }

    /// `|Omega| = 2^{1 + tk}`.
    pub fn omega_size(&self) -> u64 {
        1 << self.seed_bits
    }

    pub fn column(&self, i: usize) -> BitString {
        BitString::from_index(self.columns[i], self.seed_bits)
    }

    /// `xi_i(z)` for a seed index `z < |Omega|` and 0-based position `i < n`.
    pub fn xi(&self, z: u64, i: usize) -> Result<bool> {
        if z >= self.omega_size() {
            return Err(Error::usage(format!("seed {z} outside |Omega| = {}", self.omega_size())));
        }
        if i >= self.n {
            return Err(Error::usage(format!("position {i} outside 0..{}", self.n)));
        }
        Ok(self.xi_unchecked(z, i))
    }

    #[inline]
    fn xi_unchecked(&self, z: u64, i: usize) -> bool {
        (z & self.columns[i]).count_ones() & 1 == 1
    }

    /// The packed string `xi(z)`: bit `i` is `xi_i(z)`.
    fn packed(&self, z: u64) -> u64 {
        (0..self.n).fold(0, |acc, i| acc | (u64::from(self.xi_unchecked(z, i)) << i))
    }

    pub fn string(&self, z: u64) -> Result<BitString> {
        self.xi(z, 0)?;
        Ok(BitString::from_index(self.packed(z), self.n))
    }

    fn all_packed(&self) -> Vec<u64> {
        (0..self.omega_size()).map(|z| self.packed(z)).collect()
    }

    fn check_work(&self, max_r: usize) -> Result<()> {
        let subsets: u128 = (0..=max_r.min(self.n)).map(|r| binomial(self.n, r)).sum();
        if subsets * u128::from(self.omega_size()) > 2_000_000_000 {
            return Err(Error::usage(format!(
                "exhaustive check over {subsets} subsets and {} seeds is too large",
                self.omega_size()
            )));
        }
        Ok(())
    }
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn gather(bits: u64, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &p)| acc | (((bits >> p) & 1) as usize) << j)
}

/// The range `{xi(z) : z in Omega}` as an explicit property.
#[derive(Clone, Debug)]
pub struct DWiseProperty {
    space: DWiseSpace,
    members: Vec<BitString>,
    lookup: HashSet<BitString>,
}

impl DWiseProperty {
    /// Distinct members, sorted.
    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    pub fn space(&self) -> &DWiseSpace {
        &self.space
    }
}

impl PropertySpec for DWiseProperty {
    fn input_len(&self) -> usize {
        self.space.n
    }

    fn contains(&self, x: &BitString) -> bool {
        self.lookup.contains(x)
    }

    fn distance(&self, x: &BitString) -> usize {
        self.members.iter().map(|m| m.hamming(x)).min().expect("0^n is always a member")
    }

    fn sample_member(&self, rng: &mut dyn RngCore) -> BitString {
        let z = rng.gen_range(0..self.space.omega_size());
        BitString::from_index(self.space.packed(z), self.space.n)
    }
}

/// Largest `n` materialised by [`enumerate_property`].
pub const ENUMERATE_MAX_N: usize = 20;
const ENUMERATE_MAX_SEEDS: u64 = 1 << 22;

pub fn enumerate_property(space: &DWiseSpace) -> Result<DWiseProperty> {
    if space.n > ENUMERATE_MAX_N || space.omega_size() > ENUMERATE_MAX_SEEDS {
        return Err(Error::usage(format!(
            "refusing to materialise n = {} with |Omega| = {}",
            space.n,
            space.omega_size()
        )));
    }
    let mut members: Vec<BitString> = space
        .all_packed()
        .into_iter()
        .map(|v| BitString::from_index(v, space.n))
        .collect();
    members.sort();
    members.dedup();
    let lookup = members.iter().cloned().collect();
    Ok(DWiseProperty {
        space: space.clone(),
        members,
        lookup,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DWiseReport {
    /// Every subset of at most `d` positions is exactly balanced.
    Independent { subsets_checked: usize },
    Violation {
        positions: Vec<usize>,
        pattern: BitString,
        count: u64,
        expected_fraction: (u64, u64),
    },
}

impl DWiseReport {
    pub fn passed(&self) -> bool {
        matches!(self, DWiseReport::Independent { .. })
    }
}

/// For every subset of `r <= d` positions, checks that every pattern in
/// `{0,1}^r` is hit by exactly `|Omega| / 2^r` seeds.
pub fn verify_dwise(space: &DWiseSpace, d: usize) -> Result<DWiseReport> {
    space.check_work(d)?;
    let strings = space.all_packed();
    let omega = space.omega_size();
    let mut checked = 0;
    for r in 1..=d.min(space.n) {
        let mut hist = vec![0u64; 1 << r];
        for positions in (0..space.n).combinations(r) {
            hist.iter_mut().for_each(|h| *h = 0);
            for &s in &strings {
                hist[gather(s, &positions)] += 1;
            }
            checked += 1;
            if let Some((pat, &count)) = hist.iter().enumerate().find(|(_, &c)| c << r != omega) {
                return Ok(DWiseReport::Violation {
                    pattern: BitString::from_index(pat as u64, r),
                    positions,
                    count,
                    expected_fraction: (omega, 1 << r),
                });
            }
        }
    }
    Ok(DWiseReport::Independent {
        subsets_checked: checked,
    })
}

/// Passes iff every pattern on every `d` positions is realised by some seed.
pub fn classical_lb_witness(space: &DWiseSpace, d: usize) -> Result<bool> {
    if d > space.n {
        return Err(Error::usage(format!("d = {d} exceeds n = {}", space.n)));
    }
    space.check_work(d)?;
    if d >= 40 {
        return Ok(false);
    }
    let strings: Vec<BitString> = (0..space.omega_size())
        .map(|z| space.string(z).expect("seed in range"))
        .collect();
    for positions in (0..space.n).combinations(d) {
        let mut seen = HashSet::new();
        for s in &strings {
            seen.insert(positions.iter().map(|&p| s.get(p)).collect::<Vec<_>>());
        }
        if seen.len() != 1 << d {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A multilinear monomial `prod_{i in vars} x_i` over 0-based positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    vars: BTreeSet<usize>,
}

impl Monomial {
    pub fn new(vars: impl IntoIterator<Item = usize>) -> Self {
        Monomial {
            vars: vars.into_iter().collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.vars.iter().copied()
    }

    fn mask(&self) -> u64 {
        self.vars.iter().fold(0, |m, &v| m | 1 << v)
    }
}

/// Expectations of a monomial under the range and under uniform bits.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialGap<T> {
    pub e_p: T,
    pub e_uniform: T,
    pub gap: T,
}

/// `E_P[m]` over seeds (with multiplicity), `E_uniform[m] = 2^-deg`, and
/// their difference.
pub fn monomial_gap<T>(space: &DWiseSpace, m: &Monomial) -> Result<MonomialGap<T>>
where
    T: Num + FromPrimitive + Clone,
{
    if let Some(v) = m.vars().find(|&v| v >= space.n) {
        return Err(Error::usage(format!("monomial variable {v} outside 0..{}", space.n)));
    }
    if space.omega_size() > ENUMERATE_MAX_SEEDS {
        return Err(Error::usage("sample space too large to enumerate"));
    }
    let mask = m.mask();
    let hits = (0..space.omega_size())
        .filter(|&z| space.packed(z) & mask == mask)
        .count() as u64;
    let lift = |v: u64| T::from_u64(v).expect("representable count");
    let e_p = lift(hits) / lift(space.omega_size());
    let e_uniform = T::one() / lift(1 << m.degree());
    let gap = e_p.clone() - e_uniform.clone();
    Ok(MonomialGap { e_p, e_uniform, gap })
}

/// Per-degree summary of monomial gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeGaps {
    pub degree: usize,
    pub monomials: usize,
    pub nonzero: usize,
    pub max_abs_gap: f64,
}

/// Gaps of every monomial of degree `0..=max_degree`.
pub fn gap_table(space: &DWiseSpace, max_degree: usize) -> Result<Vec<DegreeGaps>> {
    space.check_work(max_degree)?;
    (0..=max_degree.min(space.n))
        .map(|deg| {
            let mut row = DegreeGaps {
                degree: deg,
                monomials: 0,
                nonzero: 0,
                max_abs_gap: 0.0,
            };
            for vars in (0..space.n).combinations(deg) {
                let g: MonomialGap<num_rational::Rational64> = monomial_gap(space, &Monomial::new(vars))?;
                row.monomials += 1;
                if g.gap != num_rational::Rational64::from_integer(0) {
                    row.nonzero += 1;
                    let v = *g.gap.numer() as f64 / *g.gap.denom() as f64;
                    row.max_abs_gap = row.max_abs_gap.max(v.abs());
                }
            }
            Ok(row)
        })
        .collect()
}

/// Draws a uniform seed.
pub fn random_seed<R: Rng + ?Sized>(space: &DWiseSpace, rng: &mut R) -> u64 {
    rng.gen_range(0..space.omega_size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_laws_small() {
        for k in 1..=4 {
            let f = Gf2k::new(k).unwrap();
            let q = f.order();
            for a in 0..q {
                assert_eq!(f.mul(a, 1), a);
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn inverses_up_to_degree_8() {
        for k in 1..=8 {
            let f = Gf2k::new(k).unwrap();
            assert_eq!(f.inv(0), None);
            for a in 1..f.order() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn table_polynomials_are_primitive() {
        for k in 1..=16 {
            let f = Gf2k::new(k).unwrap();
            assert_eq!(f.element_order(f.generator()), Some(f.order() - 1), "k = {k}");
        }
        assert!(Gf2k::new(17).is_err());
    }

    #[test]
    fn xi_basics() {
        let s = DWiseSpace::new(3, 1).unwrap();
        assert_eq!(s.n(), 7);
        assert_eq!(s.d(), 3);
        assert_eq!(s.omega_size(), 16);
        for i in 0..7 {
            assert!(!s.xi(0, i).unwrap());
            let ones = (0..16).filter(|&z| s.xi(z, i).unwrap()).count();
            assert_eq!(ones, 8);
        }
        assert!(s.xi(16, 0).is_err());
        assert!(s.xi(0, 7).is_err());
        let cols: HashSet<_> = (0..7).map(|i| s.column(i)).collect();
        assert_eq!(cols.len(), 7);
    }

    #[test]
    fn omega_formula() {
        for (k, t) in [(3, 1), (4, 1), (4, 2), (5, 2), (6, 3)] {
            let s = DWiseSpace::new(k, t).unwrap();
            let n = s.n() as u64;
            assert_eq!(s.omega_size(), 2 * (n + 1).pow(t as u32));
        }
        assert!(DWiseSpace::new(2, 2).is_err());
    }

    #[test]
    fn property_members() {
        let s = DWiseSpace::new(3, 1).unwrap();
        let p = enumerate_property(&s).unwrap();
        assert!(p.members().len() <= 16);
        assert!(p.contains(&BitString::zeros(7)));
        let mut r = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = p.sample_member(&mut r);
            assert!(p.contains(&m));
            assert_eq!(p.distance(&m), 0);
        }
        for v in 0..128u64 {
            let x = BitString::from_index(v, 7);
            assert_eq!(p.contains(&x), p.distance(&x) == 0);
        }
    }

    #[test]
    fn three_wise_exact_counts() {
        let s = DWiseSpace::new(3, 1).unwrap();
        let report = verify_dwise(&s, 3).unwrap();
        assert_eq!(report, DWiseReport::Independent { subsets_checked: 7 + 21 + 35 });
        match verify_dwise(&s, 4).unwrap() {
            DWiseReport::Violation { positions, .. } => assert_eq!(positions.len(), 4),
            other => panic!("expected a 4-wise violation, got {other:?}"),
        }
    }

    #[test]
    fn larger_spaces_independent() {
        assert!(verify_dwise(&DWiseSpace::new(4, 1).unwrap(), 3).unwrap().passed());
        assert!(verify_dwise(&DWiseSpace::new(4, 2).unwrap(), 5).unwrap().passed());
        assert!(!verify_dwise(&DWiseSpace::new(4, 2).unwrap(), 6).unwrap().passed());
    }

    #[test]
    fn witness() {
        let s = DWiseSpace::new(3, 1).unwrap();
        assert!(classical_lb_witness(&s, 3).unwrap());
        assert!(!classical_lb_witness(&s, 7).unwrap());
        for (k, t) in [(3, 1), (4, 1), (4, 2)] {
            let s = DWiseSpace::new(k, t).unwrap();
            for d in 1..=s.d() + 1 {
                if verify_dwise(&s, d).unwrap().passed() {
                    assert!(classical_lb_witness(&s, d).unwrap());
                }
            }
        }
    }

    #[test]
    fn monomial_gaps() {
        let s = DWiseSpace::new(3, 1).unwrap();
        let empty: MonomialGap<Rational64> = monomial_gap(&s, &Monomial::default()).unwrap();
        assert_eq!(empty.e_p, Rational64::from_integer(1));
        assert_eq!(empty.gap, Rational64::from_integer(0));
        for deg in 1..=3 {
            for vars in (0..7).combinations(deg) {
                let g: MonomialGap<Rational64> = monomial_gap(&s, &Monomial::new(vars)).unwrap();
                assert_eq!(g.gap, Rational64::from_integer(0));
            }
        }
        let nonzero = (0..7)
            .combinations(4)
            .any(|v| monomial_gap::<Rational64>(&s, &Monomial::new(v)).unwrap().gap != Rational64::from_integer(0));
        assert!(nonzero);
        let fg: MonomialGap<f64> = monomial_gap(&s, &Monomial::new([0, 1])).unwrap();
        assert_eq!(fg.e_uniform, 0.25);
    }

    #[test]
    fn gap_table_shape() {
        let s = DWiseSpace::new(4, 1).unwrap();
        let rows = gap_table(&s, 4).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[..4].iter().all(|r| r.nonzero == 0));
        assert_eq!(rows[3].monomials, 455);
        assert!(rows[4].nonzero > 0);
    }
}
