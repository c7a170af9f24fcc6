use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dwise::{verify_dwise, DWiseSpace};
use crate::error::Result;
use crate::f2core::{hadamard_encode, reduced_bases, BitString, BooleanFunction};
use crate::hadamard_tester::{blr_pass_probability, bv_distribution};
use crate::simon_tester::{closed_form_state, distance_to_l, is_coset_constant, is_member, q_state};

/// Outcome of one invariant suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, failures: usize, cases: usize) -> LemmaCheck {
    LemmaCheck {
        name,
        passed: failures == 0,
        detail: format!("{failures} counterexamples in {cases} cases"),
    }
}

/// Runs the structural invariant suites at small sizes.
pub fn verify_lemmas() -> Result<Vec<LemmaCheck>> {
    let mut out = Vec::new();

    let (mut bad, mut cases) = (0, 0);
    for m in [2usize, 3, 4] {
        for v in 0..1u64 << m {
            let y = BitString::from_index(v, m);
            let x = hadamard_encode(&y);
            cases += 1;
            if bv_distribution(&x)?.prob(&y) < 1.0 - 1e-9 || blr_pass_probability(&x) != 1.0 {
                bad += 1;
            }
        }
    }
    out.push(check("codewords-extract-and-pass-blr", bad, cases));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let (mut bad, mut cases) = (0, 0);
    for n in 2..=4 {
        let bases = reduced_bases(n);
        for j in 0..40 {
            let f = BooleanFunction::random(n, &mut rng);
            let basis = &bases[(j * 7 + n) % bases.len()];
            let dev = q_state(&f, basis)?.max_deviation(&closed_form_state(&f, basis)?);
            cases += 1;
            if dev >= 1e-10 {
                bad += 1;
            }
        }
    }
    out.push(check("pre-measurement-state-closed-form", bad, cases));

    let n = 3;
    let bases = reduced_bases(n);
    let (mut bad_p0, mut bad_member, mut bad_dist) = (0, 0, 0);
    for t in 0..1u64 << (1 << n) {
        let f = BooleanFunction::new(n, BitString::from_index(t, 1 << n))?;
        let mut min_k = n;
        for b in &bases {
            let constant = is_coset_constant(&f, b);
            let p0 = q_state(&f, b)?.p0_norm_sq();
            if constant != ((p0 - 1.0).abs() < 1e-9) {
                bad_p0 += 1;
            }
            if constant {
                min_k = min_k.min(b.len());
            }
        }
        if (min_k < n) != is_member(&f) {
            bad_member += 1;
        }
        if distance_to_l(&f) != brute_distance_to_l(&f) {
            bad_dist += 1;
        }
    }
    out.push(check("zero-outcome-iff-coset-constant", bad_p0, 256 * bases.len()));
    out.push(check("member-iff-small-coset-dimension", bad_member, 256));
    out.push(check("distance-to-l-matches-enumeration", bad_dist, 256));

    let space = DWiseSpace::new(3, 1)?;
    let report = verify_dwise(&space, 3)?;
    out.push(LemmaCheck {
        name: "three-wise-independence-k3-t1",
        passed: report.passed(),
        detail: format!("{report:?}"),
    });
    Ok(out)
}

fn brute_distance_to_l(f: &BooleanFunction) -> usize {
    let size = f.size();
    (0..1u64 << size)
        .map(|t| BooleanFunction::new(f.n(), BitString::from_index(t, size)).expect("shape"))
        .filter(is_member)
        .map(|g| f.distance(&g))
        .min()
        .expect("constants are members")
}
