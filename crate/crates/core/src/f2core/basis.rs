use crate::error::{Error, Result};

use super::BitString;

/// Linearly independent vectors over F_2 in reduced echelon form.
///
/// Each vector's leading index is its lowest set bit. Leading indices are
/// pairwise distinct and every vector is zero at every other vector's
/// leading index. Insertion order is preserved: vector `j` is the `j`-th
/// extension, which the Simon tester maps onto work qubit `Z_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    n: usize,
    vectors: Vec<BitString>,
    leading: Vec<usize>,
}

impl Basis {
    /// The empty basis of the zero subspace of `F_2^n`.
    pub fn empty(n: usize) -> Self {
        Basis {
            n,
            vectors: Vec::new(),
            leading: Vec::new(),
        }
    }

    /// Accepts an explicit ordered list only if it already satisfies the
    /// reduced discipline.
    pub fn from_vectors(n: usize, vectors: Vec<BitString>) -> Result<Self> {
        let mut leading = Vec::with_capacity(vectors.len());
        for v in &vectors {
            if v.len() != n {
                return Err(Error::usage(format!("basis vector {v} is not of length {n}")));
            }
            match v.leading_index() {
                Some(i) => leading.push(i),
                None => return Err(Error::usage("basis contains the zero vector")),
            }
        }
        let basis = Basis { n, vectors, leading };
        basis.check()?;
        Ok(basis)
    }

    /// Builds a reduced basis of `span(vectors)` by repeated extension,
    /// silently skipping dependent inputs.
    pub fn span_of<'a, I: IntoIterator<Item = &'a BitString>>(n: usize, vectors: I) -> Self {
        let mut basis = Basis::empty(n);
        for v in vectors {
            basis.insert(v);
        }
        basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vectors (the dimension of the span).
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[BitString] {
        &self.vectors
    }

    pub fn leading(&self) -> &[usize] {
        &self.leading
    }

    /// `z` minus its components along the basis pivots.
    pub fn reduce(&self, z: &BitString) -> BitString {
        let mut r = z.clone();
        for (v, &p) in self.vectors.iter().zip(&self.leading) {
            if r.get(p) {
                r.xor_assign(v);
            }
        }
        r
    }

    pub fn contains(&self, z: &BitString) -> bool {
        self.reduce(z).is_zero()
    }

    /// The extended basis if `z` is independent of `self`, else `None`.
    pub fn rank_extend(&self, z: &BitString) -> Option<Basis> {
        let mut out = self.clone();
        out.insert(z).then_some(out)
    }

    /// In-place form of [`Basis::rank_extend`]; returns whether `z` was new.
    pub fn insert(&mut self, z: &BitString) -> bool {
        assert_eq!(z.len(), self.n, "vector length differs from basis dimension");
        let r = self.reduce(z);
        let Some(p) = r.leading_index() else {
            return false;
        };
        for v in &mut self.vectors {
            if v.get(p) {
                v.xor_assign(&r);
            }
        }
        self.vectors.push(r);
        self.leading.push(p);
        debug_assert!(self.check().is_ok());
        true
    }

    /// Verifies the reduced discipline.
    pub fn check(&self) -> Result<()> {
        for (j, (v, &p)) in self.vectors.iter().zip(&self.leading).enumerate() {
            if v.leading_index() != Some(p) {
                return Err(Error::usage(format!("vector {j} has leading index {:?}, recorded {p}", v.leading_index())));
            }
            for (l, &q) in self.leading.iter().enumerate() {
                if l != j && (q == p || v.get(q)) {
                    return Err(Error::usage(format!(
                        "vector {j} ({v}) is not reduced against pivot {q} of vector {l}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Every element of the span, in the order of the combination mask
    /// (bit `j` of the mask selects vector `j`).
    pub fn span(&self) -> Vec<BitString> {
        let k = self.len();
        assert!(k < 32, "span of dimension {k} is too large to enumerate");
        (0u64..1 << k)
            .map(|mask| {
                let mut acc = BitString::zeros(self.n);
                for (j, v) in self.vectors.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        acc.xor_assign(v);
                    }
                }
                acc
            })
            .collect()
    }
}

/// Every distinct ordered reduced basis reachable by successive
/// [`Basis::insert`] calls from the empty basis of `F_2^n`, the empty basis
/// included.
pub fn reduced_bases(n: usize) -> Vec<Basis> {
    assert!(n <= 4, "enumerating bases of F_2^{n} is too expensive");
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut stack = vec![Basis::empty(n)];
    while let Some(b) = stack.pop() {
        if !seen.insert(b.vectors.clone()) {
            continue;
        }
        for v in 1..1u64 << n {
            if let Some(next) = b.rank_extend(&BitString::from_index(v, n)) {
                stack.push(next);
            }
        }
        out.push(b);
    }
    out.sort_by(|a, b| (a.len(), &a.vectors).cmp(&(b.len(), &b.vectors)));
    out
}

/// Reduced basis of `{z : z . s = 0 for all s in vectors}` inside `F_2^n`.
pub fn orthogonal_space(n: usize, vectors: &[BitString]) -> Basis {
    let span = Basis::span_of(n, vectors);
    let mut is_pivot = vec![false; n];
    for &p in span.leading() {
        is_pivot[p] = true;
    }
    let mut perp = Basis::empty(n);
    for free in (0..n).filter(|&i| !is_pivot[i]) {
        // A span vector v_j sees w only through coordinates `free` and p_j.
        let mut w = BitString::zeros(n);
        w.set(free, true);
        for (v, &p) in span.vectors().iter().zip(span.leading()) {
            if v.get(free) {
                w.set(p, true);
            }
        }
        let fresh = perp.insert(&w);
        debug_assert!(fresh);
    }
    perp
}
