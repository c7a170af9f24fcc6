//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::error::Error as StdError;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpt::dwise::{monomial_gap, DWiseSpace, Monomial};
use qpt::f2core::{hadamard_encode, reduced_bases, BitString, Basis, BooleanFunction, HadamardSubset, PropertySpec};
use qpt::hadamard_tester::{
    bv_distribution, bv_extract, classical_test_pa, default_rounds, generic_test, quantum_acceptance_probability,
    quantum_test_pa, QueryOracle, TesterConfig,
};
use qpt::harness::{
    persist, random_half_subset, run_bias_experiment, run_separation_hadamard, run_simon_trials, BiasConfig,
    RunOptions, SeparationConfig, SimonInput,
};
use qpt::simon_tester::{
    closed_form_state, distance_to_l, is_coset_constant, main_program, q_state, repetition_bound, sample_p,
    sample_u,
};
use qpt::ExactGap;

type Outcome = Result<(bool, String), Box<dyn StdError>>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(-1)^x` Walsh coefficient at `y`, by direct summation.
fn walsh(x: &BitString, y: u64) -> i64 {
    (0..x.len() as u64)
        .map(|i| {
            let sign = x.get(i as usize) ^ ((y & i).count_ones() & 1 == 1);
            if sign {
                -1
            } else {
                1
            }
        })
        .sum()
}

/// Fraction of pairs `(i, j)` with `x_i ^ x_j == x_{i^j}`.
fn blr_pass(x: &BitString) -> f64 {
    let n = x.len();
    let mut good = 0u64;
    for i in 0..n {
        for j in 0..n {
            good += u64::from(x.get(i) ^ x.get(j) == x.get(i ^ j));
        }
    }
    good as f64 / (n * n) as f64
}

/// Mismatched pairs `{x, x^s}`, minimised over nonzero `s`.
fn pair_distance(f: &BooleanFunction) -> usize {
    (1..f.size())
        .map(|s| (0..f.size()).filter(|&x| x < x ^ s && f.eval(x) != f.eval(x ^ s)).count())
        .min()
        .unwrap_or(0)
}

/// Direct check that `f` is constant on every class of equal inner products.
fn coset_constant_oracle(f: &BooleanFunction, basis: &Basis) -> bool {
    let sig = |x: usize| -> Vec<bool> {
        let xv = BitString::from_index(x as u64, f.n());
        basis.vectors().iter().map(|z| z.inner_product(&xv).unwrap()).collect()
    };
    (0..f.size()).all(|a| (0..f.size()).all(|b| sig(a) != sig(b) || f.eval(a) == f.eval(b)))
}

fn has_shift(f: &BooleanFunction) -> bool {
    (1..f.size()).any(|s| (0..f.size()).all(|x| f.eval(x) == f.eval(x ^ s)))
}

fn random_basis(n: usize, r: &mut ChaCha8Rng) -> Basis {
    let k = r.gen_range(0..=n);
    let mut b = Basis::empty(n);
    while b.len() < k {
        b.insert(&BitString::random(n, r));
    }
    b
}

fn far_corpus(a: &HadamardSubset, eps: f64, count: usize, r: &mut ChaCha8Rng) -> Vec<BitString> {
    let n = a.input_len();
    let threshold = (eps * n as f64).floor() as usize + 1;
    let mut out = Vec::new();
    // barely-far corruptions of codewords, then uniform strings
    while out.len() < count / 2 {
        let y = BitString::from_index(r.gen_range(0..n as u64), a.log_n());
        let mut x = hadamard_encode(&y);
        for p in rand::seq::index::sample(r, n, threshold) {
            x.flip(p);
        }
        if a.distance(&x) as f64 > eps * n as f64 {
            out.push(x);
        }
    }
    while out.len() < count {
        let x = BitString::random(n, r);
        if a.distance(&x) as f64 > eps * n as f64 {
            out.push(x);
        }
    }
    out
}

fn c1_bv_exact() -> Outcome {
    let start = Instant::now();
    let mut worst = 1.0f64;
    let mut wrong = 0;
    for m in 2..=5usize {
        for v in 0..1u64 << m {
            let y = BitString::from_index(v, m);
            let x = hadamard_encode(&y);
            worst = worst.min(bv_distribution(&x)?.prob(&y));
            let mut oracle = QueryOracle::new(&x);
            if bv_extract(&mut oracle, &mut rng(v))? != y || oracle.count() != 1 {
                wrong += 1;
            }
        }
    }
    let t = start.elapsed();
    Ok((
        worst >= 1.0 - 1e-9 && wrong == 0 && t < Duration::from_secs(10),
        format!("min mass {worst:.12}, {wrong} wrong extractions, {t:.2?}"),
    ))
}

fn c2_soundness() -> Outcome {
    let eps = 0.1;
    let k = default_rounds(eps);
    let mut r = rng(2);
    let mut worst_q = 1.0f64;
    let mut worst_c = 1.0f64;
    let mut oracle_gap = 0.0f64;
    let mut inputs = 0;
    for m in [4usize, 5] {
        let a = random_half_subset(m, &mut r);
        for x in far_corpus(&a, eps, 100, &mut r) {
            inputs += 1;
            let fourier: f64 = a
                .messages()
                .iter()
                .map(|y| (walsh(&x, y.to_index()) as f64 / x.len() as f64).powi(2))
                .sum();
            let oracle = blr_pass(&x).powi(k as i32) * fourier;
            let p = quantum_acceptance_probability(&x, &a, k)?;
            oracle_gap = oracle_gap.max((p - oracle).abs());
            worst_q = worst_q.min(1.0 - p);
            let rejects = (0..1000u64)
                .filter(|&s| {
                    let cfg = TesterConfig::new(eps, s).unwrap();
                    !classical_test_pa(QueryOracle::new(&x), &a, &cfg).unwrap().verdict.is_accept()
                })
                .count();
            worst_c = worst_c.min(rejects as f64 / 1000.0);
        }
    }
    Ok((
        worst_q >= 2.0 / 3.0 && worst_c >= 2.0 / 3.0 && oracle_gap < 1e-9,
        format!(
            "{inputs} inputs; min quantum rejection {worst_q:.4}, min classical rejection {worst_c:.3}, \
             analytic vs brute-force gap {oracle_gap:.1e}"
        ),
    ))
}

fn c3_one_sided() -> Outcome {
    let eps = 0.1;
    let mut r = rng(3);
    let mut rejections = 0;
    let mut runs = 0;
    for m in 2..=5usize {
        let a = random_half_subset(m, &mut r);
        let members: Vec<_> = a.messages().iter().map(hadamard_encode).collect();
        for seed in 0..100u64 {
            let x = &members[seed as usize % members.len()];
            let cfg = TesterConfig::new(eps, seed)?;
            let verdicts = [
                classical_test_pa(QueryOracle::new(x), &a, &cfg)?.verdict,
                quantum_test_pa(x, &a, &cfg)?.verdict,
                generic_test(QueryOracle::new(x), &members, &cfg)?.verdict,
            ];
            runs += 3;
            rejections += verdicts.iter().filter(|v| !v.is_accept()).count();
        }
    }
    for n in 3..=5usize {
        for seed in 0..100u64 {
            let mut rr = rng(seed ^ ((n as u64) << 32));
            let f = sample_p(n, &mut rr).f;
            runs += 1;
            if !main_program(&f, 0.125, &mut rr)?.verdict.is_accept() {
                rejections += 1;
            }
        }
    }
    Ok((rejections == 0, format!("{rejections} member rejections in {runs} runs")))
}

fn c4_query_table() -> Outcome {
    let eps = 0.1;
    let k = default_rounds(eps);
    let cfg = SeparationConfig {
        ns: vec![8, 16, 32, 64],
        eps,
        trials: 10,
        seed: 4,
    };
    let recs = run_separation_hadamard(&cfg, &RunOptions::with_workers(2))?;
    let mut ok = k == 20;
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let cell = |mode: &str| -> Vec<usize> {
            recs.iter()
                .filter(|r| r.n == n && r.mode == mode && r.input == "member")
                .map(|r| r.queries)
                .collect()
        };
        let q = cell("quantum");
        let c = cell("classical");
        let log_n = n.trailing_zeros() as usize;
        ok &= q.iter().all(|&v| v == 3 * k + 1) && c.iter().all(|&v| v == log_n + k);
        rows.push(format!("n={n}: quantum {} classical {}", q[0], c[0]));
    }
    // transcript lengths match the counters
    let a = random_half_subset(4, &mut rng(40));
    let x = hadamard_encode(&a.messages()[0]);
    let out = quantum_test_pa(&x, &a, &TesterConfig::new(eps, 1)?)?;
    ok &= out.transcript.len() == out.queries;
    Ok((ok, rows.join("; ")))
}

fn c5_closed_form() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut r = rng(5);
    for n in 2..=4usize {
        for _ in 0..100 {
            let f = BooleanFunction::random(n, &mut r);
            let b = random_basis(n, &mut r);
            worst = worst.max(q_state(&f, &b)?.max_deviation(&closed_form_state(&f, &b)?));
        }
    }
    let t = start.elapsed();
    Ok((
        worst < 1e-10 && t < Duration::from_secs(30),
        format!("max deviation {worst:.2e} over 300 configurations, {t:.2?}"),
    ))
}

fn c6_exhaustive_n3() -> Outcome {
    let start = Instant::now();
    let n = 3;
    let bases = reduced_bases(n);
    let mut bad_p0 = 0;
    let mut bad_member = 0;
    for t in 0..256u64 {
        let f = BooleanFunction::new(n, BitString::from_index(t, 8))?;
        let mut min_k = usize::MAX;
        for b in &bases {
            let constant = coset_constant_oracle(&f, b);
            if constant != is_coset_constant(&f, b) {
                bad_p0 += 1;
            }
            let p0 = q_state(&f, b)?.p0_norm_sq();
            if ((p0 - 1.0).abs() < 1e-9) != constant {
                bad_p0 += 1;
            }
            if constant {
                min_k = min_k.min(b.len());
            }
        }
        if (min_k < n) != has_shift(&f) {
            bad_member += 1;
        }
    }
    let t = start.elapsed();
    Ok((
        bad_p0 == 0 && bad_member == 0 && t < Duration::from_secs(120),
        format!(
            "{} bases x 256 functions: {bad_p0} zero-outcome and {bad_member} membership counterexamples, {t:.2?}",
            bases.len()
        ),
    ))
}

fn c7_simon_members() -> Outcome {
    let eps = 0.125;
    let mut rejected = 0;
    let mut runs = 0;
    for n in 3..=5usize {
        let mut r = rng(70 + n as u64);
        for _ in 0..50 {
            let f = sample_p(n, &mut r).f;
            let seed = r.gen();
            let recs = run_simon_trials(
                "members",
                &SimonInput::Fixed(f),
                n,
                eps,
                200,
                seed,
                &RunOptions::with_workers(0),
            )?;
            runs += recs.len();
            rejected += recs.iter().filter(|x| !x.verdict.is_accept()).count();
        }
    }
    Ok((rejected == 0, format!("{rejected} rejections in {runs} runs over 150 members")))
}

fn c8_simon_far() -> Outcome {
    let eps = 0.125;
    let mut worst = 1.0f64;
    let mut over_budget = 0;
    let mut inputs = 0;
    let mut bound_ok = true;
    for n in [4usize, 5] {
        let size = 1usize << n;
        let l_max = (2.0 * (n as f64).log2() / (eps * eps) - 1e-9).ceil() as usize;
        bound_ok &= repetition_bound(n, eps) == l_max;
        let mut r = rng(80 + n as u64);
        let mut found = 0;
        while found < 20 {
            let f = sample_u(n, &mut r);
            let d = pair_distance(&f);
            if d != distance_to_l(&f) {
                return Ok((false, format!("distance oracle disagrees on {f:?}")));
            }
            if d * 8 < size {
                continue;
            }
            found += 1;
            inputs += 1;
            let recs = run_simon_trials("far", &SimonInput::Fixed(f), n, eps, 300, r.gen(), &RunOptions::with_workers(0))?;
            let rej = recs.iter().filter(|x| !x.verdict.is_accept()).count() as f64 / 300.0;
            worst = worst.min(rej);
            over_budget += recs.iter().filter(|x| x.queries > n * l_max).count();
        }
    }
    Ok((
        worst >= 2.0 / 3.0 && over_budget == 0 && bound_ok,
        format!("{inputs} inputs; min rejection {worst:.3}; {over_budget} runs over n*L_max"),
    ))
}

fn c9_bias() -> Outcome {
    let cfg = BiasConfig {
        n: 6,
        depth: 5,
        strategies: 100,
        samples: 10_000,
        seed: 9,
    };
    let report = run_bias_experiment(&cfg, &RunOptions::with_workers(0))?;
    Ok((report.max_bias <= 0.1, format!("max bias {:.4}", report.max_bias)))
}

fn c10_dwise() -> Outcome {
    let start = Instant::now();
    let space = DWiseSpace::new(3, 1)?;
    let omega = space.omega_size();
    let strings: Vec<BitString> = (0..omega).map(|z| space.string(z)).collect::<Result<_, _>>()?;
    let mut ok = omega == 16;
    for a in 0..7 {
        for b in a + 1..7 {
            for c in b + 1..7 {
                let mut hist = [0; 8];
                for s in &strings {
                    hist[usize::from(s.get(a)) | usize::from(s.get(b)) << 1 | usize::from(s.get(c)) << 2] += 1;
                }
                ok &= hist.iter().all(|&h| h == 2);
            }
        }
    }
    let zero = num_rational::Rational64::from_integer(0);
    let mut low_nonzero = 0;
    let mut high_nonzero = 0;
    for mask in 1u32..128 {
        let vars: Vec<usize> = (0..7).filter(|i| mask >> i & 1 == 1).collect();
        let deg = vars.len();
        // direct expectation versus the library
        let hits = strings.iter().filter(|s| vars.iter().all(|&v| s.get(v))).count() as i64;
        let g: ExactGap = monomial_gap(&space, &Monomial::new(vars))?;
        let direct = num_rational::Rational64::new(hits, omega as i64) - num_rational::Rational64::new(1, 1 << deg);
        ok &= g.gap == direct;
        if g.gap != zero {
            if deg <= 3 {
                low_nonzero += 1;
            } else if deg == 4 {
                high_nonzero += 1;
            }
        }
    }
    let t = start.elapsed();
    ok &= low_nonzero == 0 && high_nonzero > 0 && t < Duration::from_secs(5);
    Ok((
        ok,
        format!("|Omega| = {omega}; {low_nonzero} nonzero gaps at degree <= 3, {high_nonzero} at degree 4; {t:.2?}"),
    ))
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir()?;
    let mut blobs: Vec<Vec<u8>> = Vec::new();
    let sep = SeparationConfig {
        ns: vec![8, 16, 32],
        eps: 0.1,
        trials: 40,
        seed: 11,
    };
    let bias = BiasConfig {
        n: 5,
        depth: 4,
        strategies: 12,
        samples: 500,
        seed: 11,
    };
    for workers in [1, 2, 4, 8] {
        let opts = RunOptions::with_workers(workers);
        let mut recs = run_separation_hadamard(&sep, &opts)?;
        recs.extend(run_simon_trials("far", &SimonInput::Far { min_distance: 2 }, 4, 0.125, 40, 11, &opts)?);
        let path = dir.path().join(format!("{workers}.jsonl"));
        persist(&recs, &path)?;
        let mut bytes = std::fs::read(&path)?;
        bytes.extend(serde_json::to_vec(&run_bias_experiment(&bias, &opts)?)?);
        blobs.push(bytes);
    }
    let same = blobs.windows(2).all(|w| w[0] == w[1]);
    Ok((same, format!("{} byte outputs for workers 1, 2, 4, 8 identical: {same}", blobs[0].len())))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("bernstein-vazirani exactness", c1_bv_exact),
        ("hadamard tester soundness", c2_soundness),
        ("one-sided error", c3_one_sided),
        ("query-count separation table", c4_query_table),
        ("pre-measurement state closed form", c5_closed_form),
        ("exhaustive coset and membership iff at n=3", c6_exhaustive_n3),
        ("simon tester accepts members", c7_simon_members),
        ("simon tester rejects far inputs", c8_simon_far),
        ("decision-tree bias surrogate", c9_bias),
        ("three-wise independence k=3 t=1", c10_dwise),
        ("determinism across worker counts", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!ok);
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
