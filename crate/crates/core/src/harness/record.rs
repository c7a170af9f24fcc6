use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard_tester::Verdict;

/// One tester invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    /// Which input family the trial used (`member`, `far`, `fixed`, ...).
    pub input: String,
    pub trial: u64,
    pub n: usize,
    pub eps: f64,
    pub mode: String,
    pub seed: u64,
    pub verdict: Verdict,
    /// Equals the length of the tester's query transcript.
    pub queries: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ns: Option<u64>,
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (i, row) in rows.iter().enumerate() {
        serde_json::to_writer(&mut w, row).map_err(|source| Error::Record { line: i + 1, source })?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads one value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| Error::Record { line: i + 1, source })?);
    }
    Ok(out)
}

pub fn persist(records: &[TrialRecord], path: &Path) -> Result<()> {
    write_jsonl(path, records)
}

pub fn load(path: &Path) -> Result<Vec<TrialRecord>> {
    read_jsonl(path)
}

/// CSV projection with columns experiment, n, eps, mode, seed, verdict, queries.
pub fn export_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "n", "eps", "mode", "seed", "verdict", "queries"])?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.n.to_string(),
            r.eps.to_string(),
            r.mode.clone(),
            r.seed.to_string(),
            r.verdict.to_string(),
            r.queries.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
