use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qpt::dwise::{classical_lb_witness, enumerate_property, gap_table, verify_dwise, DWiseReport, DWiseSpace};
use qpt::f2core::{exact_log2, HadamardSubset};
use qpt::harness::{
    derive_seed, export_csv, persist, run_bias_experiment, run_hadamard_trials, run_separation_hadamard,
    run_simon_trials, summarize, verify_lemmas, write_jsonl, BiasConfig, ExperimentSummary, HadamardInput,
    RunOptions, SeparationConfig, SimonInput, TesterMode, TrialRecord,
};
use qpt::simon_tester::{exact_acceptance_probability, sample_far, sample_p, EXACT_MAX_N};
use qpt::{BitString, BooleanFunction};

#[derive(Parser)]
#[command(name = "qpt", version, about = "Classical and quantum property testers with a seeded experiment harness")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed.
    #[arg(long, global = true, env = "QPT_SEED", default_value_t = 0)]
    seed: u64,
    /// Trials per configuration.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// JSON Lines output (for `dwise gen`, the property file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CSV projection of the trial records.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Machine-readable stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Record per-trial wall time (output is then no longer bit-reproducible).
    #[arg(long, global = true)]
    wall_time: bool,
}

impl Global {
    fn opts(&self) -> RunOptions {
        RunOptions {
            workers: self.workers,
            record_time: self.wall_time,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a tester on one input family.
    #[command(subcommand)]
    Test(TestCmd),
    /// The d-wise independent sample space.
    #[command(subcommand)]
    Dwise(DwiseCmd),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputChoice {
    /// Input file: a bare bit string or an `n=` truth-table file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Draw a fresh member per trial.
    #[arg(long)]
    sample_member: bool,
    /// Draw a fresh far input per trial.
    #[arg(long)]
    sample_far: bool,
}

#[derive(Subcommand)]
enum TestCmd {
    /// Test membership in P_A, the Hadamard codewords of A.
    Hadamard {
        /// Input length (a power of two).
        #[arg(long)]
        n: usize,
        /// One log2(n)-bit message per line.
        #[arg(long)]
        a_file: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "quantum")]
        mode: TesterMode,
        #[command(flatten)]
        input: InputChoice,
    },
    /// Test membership in the Simon-invariant language.
    Simon {
        /// Number of input bits of f.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.125)]
        eps: f64,
        #[command(flatten)]
        input: InputChoice,
        /// Minimum distance from L for far samples (default floor(eps 2^n) + 1).
        #[arg(long)]
        min_distance: Option<usize>,
        /// Report the exact acceptance probability instead of sampling (n <= 3).
        #[arg(long)]
        exact: bool,
    },
}

#[derive(Subcommand)]
enum DwiseCmd {
    /// Write the distinct strings of the sample space, one per line.
    Gen {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: usize,
    },
    /// Exhaustively check d-wise independence.
    Verify {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        d: usize,
    },
    /// Expectation gaps of all monomials up to a degree.
    Gap {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        max_degree: usize,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Classical vs quantum query counts for P_A across n.
    Separation {
        /// Comma-separated powers of two.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Distinguishing bias of random decision trees between P and U.
    Bias {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 100)]
        strategies: usize,
        /// Samples per distribution per strategy.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run the structural invariant suites.
    Lemmas,
}

fn read_bits(path: &Path) -> Result<BitString> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with("n=") {
        return Ok(BooleanFunction::parse_file(&text)?.into_table());
    }
    let bits: String = text.split_whitespace().collect();
    bits.parse().with_context(|| format!("{} is not a bit string", path.display()))
}

fn emit_records(g: &Global, records: &[TrialRecord]) -> Result<()> {
    if let Some(path) = &g.out {
        persist(records, path)?;
    }
    if let Some(path) = &g.csv {
        export_csv(records, path)?;
    }
    print_summaries(g, &summarize(records))
}

fn print_summaries(g: &Global, summaries: &[ExperimentSummary]) -> Result<()> {
    if g.json {
        println!("{}", serde_json::to_string(summaries)?);
        return Ok(());
    }
    println!(
        "{:<12} {:<7} {:>6} {:>6} {:<10} {:>6} {:>8} {:>17} {:>7} {:>5}",
        "experiment", "input", "n", "eps", "mode", "trials", "accept", "95% ci", "mean q", "max q"
    );
    for s in summaries {
        println!(
            "{:<12} {:<7} {:>6} {:>6} {:<10} {:>6} {:>8.4} {:>17} {:>7.2} {:>5}",
            s.experiment,
            s.input,
            s.n,
            s.eps,
            s.mode,
            s.trials,
            s.accept_freq,
            format!("[{:.3}, {:.3}]", s.ci_low, s.ci_high),
            s.mean_queries,
            s.max_queries
        );
    }
    Ok(())
}

fn test_hadamard(g: &Global, n: usize, a_file: &Path, eps: f64, mode: TesterMode, input: &InputChoice) -> Result<()> {
    let log_n = exact_log2(n).with_context(|| format!("--n {n} is not a power of two"))?;
    ensure!((1..=20).contains(&log_n), "--n must lie in 2..=2^20");
    let text = fs::read_to_string(a_file).with_context(|| format!("reading {}", a_file.display()))?;
    let a = HadamardSubset::parse(log_n, &text).with_context(|| format!("parsing {}", a_file.display()))?;
    let source = match &input.input {
        Some(path) => HadamardInput::Fixed(read_bits(path)?),
        None if input.sample_member => HadamardInput::Member,
        None => HadamardInput::Far,
    };
    let records = run_hadamard_trials("hadamard", &source, &a, mode, eps, g.trials, g.seed, &g.opts())?;
    emit_records(g, &records)
}

fn test_simon(
    g: &Global,
    n: usize,
    eps: f64,
    input: &InputChoice,
    min_distance: Option<usize>,
    exact: bool,
) -> Result<()> {
    ensure!((1..=10).contains(&n), "--n must lie in 1..=10");
    let min_distance = min_distance.unwrap_or((eps * (1usize << n) as f64).floor() as usize + 1);
    let source = match &input.input {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SimonInput::Fixed(BooleanFunction::parse_file(&text).with_context(|| format!("parsing {}", path.display()))?)
        }
        None if input.sample_member => SimonInput::Member,
        None => SimonInput::Far { min_distance },
    };
    if exact {
        return simon_exact(g, n, eps, &source);
    }
    let records = run_simon_trials("simon", &source, n, eps, g.trials, g.seed, &g.opts())?;
    emit_records(g, &records)
}

fn simon_exact(g: &Global, n: usize, eps: f64, source: &SimonInput) -> Result<()> {
    ensure!(n <= EXACT_MAX_N, "--exact supports n <= {EXACT_MAX_N}");
    let functions: Vec<BooleanFunction> = match source {
        SimonInput::Fixed(f) => vec![f.clone()],
        _ => (0..g.trials)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(g.seed, i as u64));
                match source {
                    SimonInput::Far { min_distance } => sample_far(n, *min_distance, &mut rng),
                    _ => Ok(sample_p(n, &mut rng).f),
                }
            })
            .collect::<qpt::Result<_>>()?,
    };
    let mut rows = Vec::new();
    for f in &functions {
        ensure!(f.n() == n, "function has n = {}, expected {n}", f.n());
        let p = exact_acceptance_probability(f, eps)?;
        rows.push(json!({ "n": n, "eps": eps, "function": f.table().to_string(), "accept_probability": p }));
    }
    if let Some(path) = &g.out {
        write_jsonl(path, &rows)?;
    }
    for row in &rows {
        if g.json {
            println!("{row}");
        } else {
            println!("f = {}  Pr[accept] = {:.12}", row["function"].as_str().unwrap_or(""), row["accept_probability"]);
        }
    }
    Ok(())
}

fn dwise(g: &Global, cmd: &DwiseCmd) -> Result<bool> {
    match *cmd {
        DwiseCmd::Gen { k, t } => {
            let space = DWiseSpace::new(k, t)?;
            let property = enumerate_property(&space)?;
            let path = g.out.as_ref().context("dwise gen needs --out <path>")?;
            let mut body = format!("# k={k} t={t} n={} omega={}\n", space.n(), space.omega_size());
            for m in property.members() {
                body.push_str(&m.to_string());
                body.push('\n');
            }
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            if g.json {
                println!(
                    "{}",
                    json!({ "k": k, "t": t, "n": space.n(), "omega": space.omega_size(), "members": property.members().len() })
                );
            } else {
                println!(
                    "wrote {} distinct strings of length {} (|Omega| = {}) to {}",
                    property.members().len(),
                    space.n(),
                    space.omega_size(),
                    path.display()
                );
            }
            Ok(true)
        }
        DwiseCmd::Verify { k, t, d } => {
            let space = DWiseSpace::new(k, t)?;
            let report = verify_dwise(&space, d)?;
            let witness = classical_lb_witness(&space, d)?;
            let detail = match &report {
                DWiseReport::Independent { subsets_checked } => {
                    json!({ "independent": true, "subsets_checked": subsets_checked })
                }
                DWiseReport::Violation {
                    positions,
                    pattern,
                    count,
                    expected_fraction,
                } => json!({
                    "independent": false,
                    "positions": positions,
                    "pattern": pattern.to_string(),
                    "count": count,
                    "expected": expected_fraction.0 / expected_fraction.1,
                }),
            };
            if g.json {
                println!("{}", json!({ "k": k, "t": t, "d": d, "omega": space.omega_size(), "report": detail, "all_patterns_seen": witness }));
            } else {
                match &report {
                    DWiseReport::Independent { subsets_checked } => {
                        println!("{d}-wise independent: {subsets_checked} subsets of size <= {d} exactly balanced")
                    }
                    DWiseReport::Violation {
                        positions,
                        pattern,
                        count,
                        expected_fraction,
                    } => println!(
                        "not {d}-wise independent: positions {positions:?} show pattern {pattern} {count} times, expected {}",
                        expected_fraction.0 / expected_fraction.1
                    ),
                }
                println!("every pattern on every {d} positions realised: {witness}");
            }
            Ok(report.passed())
        }
        DwiseCmd::Gap { k, t, max_degree } => {
            let space = DWiseSpace::new(k, t)?;
            let rows = gap_table(&space, max_degree)?;
            if g.json {
                let rows: Vec<_> = rows
                    .iter()
                    .map(|r| json!({ "degree": r.degree, "monomials": r.monomials, "nonzero": r.nonzero, "max_abs_gap": r.max_abs_gap }))
                    .collect();
                println!("{}", serde_json::Value::Array(rows));
            } else {
                println!("{:>6} {:>10} {:>8} {:>12}", "degree", "monomials", "nonzero", "max |gap|");
                for r in &rows {
                    println!("{:>6} {:>10} {:>8} {:>12.6}", r.degree, r.monomials, r.nonzero, r.max_abs_gap);
                }
            }
            Ok(true)
        }
    }
}

fn experiment(g: &Global, cmd: &ExperimentCmd) -> Result<()> {
    match cmd {
        ExperimentCmd::Separation { ns, eps } => {
            let cfg = SeparationConfig {
                ns: ns.clone(),
                eps: *eps,
                trials: g.trials,
                seed: g.seed,
            };
            let records = run_separation_hadamard(&cfg, &g.opts())?;
            emit_records(g, &records)
        }
        ExperimentCmd::Bias {
            n,
            depth,
            strategies,
            samples,
        } => {
            if g.csv.is_some() {
                bail!("--csv applies to trial records; the bias experiment writes JSON Lines only");
            }
            let cfg = BiasConfig {
                n: *n,
                depth: *depth,
                strategies: *strategies,
                samples: *samples,
                seed: g.seed,
            };
            let report = run_bias_experiment(&cfg, &g.opts())?;
            if let Some(path) = &g.out {
                write_jsonl(path, &report.strategies)?;
            }
            if g.json {
                println!("{}", serde_json::to_string(&report)?);
            } else {
                println!(
                    "n = {n}, depth = {depth}, {strategies} strategies, {samples} samples each: max bias {:.4}",
                    report.max_bias
                );
            }
            Ok(())
        }
    }
}

fn lemmas(g: &Global) -> Result<bool> {
    let checks = verify_lemmas()?;
    if g.json {
        println!("{}", serde_json::to_string(&checks)?);
    } else {
        for c in &checks {
            println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Test(TestCmd::Hadamard {
            n,
            a_file,
            eps,
            mode,
            input,
        }) => test_hadamard(g, *n, a_file, *eps, *mode, input).map(|_| true),
        Command::Test(TestCmd::Simon {
            n,
            eps,
            input,
            min_distance,
            exact,
        }) => test_simon(g, *n, *eps, input, *min_distance, *exact).map(|_| true),
        Command::Dwise(cmd) => dwise(g, cmd),
        Command::Experiment(cmd) => experiment(g, cmd).map(|_| true),
        Command::Verify(VerifyCmd::Lemmas) => lemmas(g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
