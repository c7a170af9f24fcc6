use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qpt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpt"))
        .args(args)
        .current_dir(dir)
        .env_remove("QPT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn hadamard_members_accept_with_fixed_query_count() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "1010\n0111\n").unwrap();
    for (mode, queries) in [("classical", 4 + 20), ("quantum", 61)] {
        let o = qpt(
            dir.path(),
            &["test", "hadamard", "--n", "16", "--a-file", "a.txt", "--mode", mode, "--sample-member", "--trials", "30", "--json"],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v[0]["accept_freq"], 1.0);
        assert_eq!(v[0]["max_queries"], queries);
        assert_eq!(v[0]["min_queries"], queries);
    }
}

#[test]
fn fixed_input_from_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "10\n").unwrap();
    // codeword of the message with coordinate 0 set
    fs::write(dir.path().join("x.txt"), "0101\n").unwrap();
    let o = qpt(
        dir.path(),
        &["test", "hadamard", "--n", "4", "--a-file", "a.txt", "--mode", "generic", "--input", "x.txt", "--trials", "5", "--json"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["accepts"], 5);
}

#[test]
fn bad_a_file_names_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "101\n1x1\n").unwrap();
    let o = qpt(dir.path(), &["test", "hadamard", "--n", "8", "--a-file", "a.txt", "--sample-far"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn input_choice_is_required_and_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!qpt(dir.path(), &["test", "simon", "--n", "3"]).status.success());
    assert!(!qpt(dir.path(), &["test", "simon", "--n", "3", "--sample-far", "--sample-member"]).status.success());
}

#[test]
fn simon_exact_member_is_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.txt"), "n=3\n0x3c\n").unwrap();
    let o = qpt(dir.path(), &["test", "simon", "--n", "3", "--input", "f.txt", "--exact", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((v["accept_probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn separation_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let jsonl = format!("r{i}.jsonl");
        let csv = format!("r{i}.csv");
        let o = qpt(
            dir.path(),
            &["experiment", "separation", "--ns", "8,16", "--trials", "15", "--seed", "5", "--workers", workers, "--out", &jsonl, "--csv", &csv],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push((fs::read(dir.path().join(&jsonl)).unwrap(), fs::read(dir.path().join(&csv)).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
    let lines = String::from_utf8(outs[0].0.clone()).unwrap().lines().count();
    assert_eq!(lines, 2 * 4 * 15);
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpt"));
        cmd.args(["test", "simon", "--n", "4", "--sample-far", "--trials", "8", "--out", "o.jsonl"])
            .args(extra)
            .current_dir(dir.path())
            .env_remove("QPT_SEED");
        if let Some(s) = env {
            cmd.env("QPT_SEED", s);
        }
        assert!(cmd.output().unwrap().status.success());
        fs::read_to_string(dir.path().join("o.jsonl")).unwrap()
    };
    assert_eq!(run(Some("77"), &[]), run(None, &["--seed", "77"]));
    assert_ne!(run(Some("77"), &[]), run(Some("78"), &[]));
}

#[test]
fn dwise_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpt(dir.path(), &["dwise", "gen", "--k", "3", "--t", "1", "--out", "p.txt"]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("p.txt")).unwrap();
    let strings: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(strings.len(), 16);
    assert!(strings.iter().all(|s| s.len() == 7));

    assert!(qpt(dir.path(), &["dwise", "verify", "--k", "3", "--t", "1", "--d", "3"]).status.success());
    assert_eq!(qpt(dir.path(), &["dwise", "verify", "--k", "3", "--t", "1", "--d", "4"]).status.code(), Some(1));

    let o = qpt(dir.path(), &["dwise", "gap", "--k", "3", "--t", "1", "--max-degree", "4", "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[3]["nonzero"], 0);
    assert!(rows[4]["nonzero"].as_u64().unwrap() > 0);
}

#[test]
fn bias_and_lemmas() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpt(dir.path(), &["experiment", "bias", "--n", "5", "--depth", "0", "--strategies", "5", "--samples", "100", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["max_bias"], 0.0);
    let o = qpt(dir.path(), &["verify", "lemmas", "--json"]);
    assert!(o.status.success());
    let checks: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(checks.as_array().unwrap().iter().all(|c| c["passed"] == true));
}
