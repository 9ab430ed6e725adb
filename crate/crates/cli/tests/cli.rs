//! End-to-end runs of the `plcpz` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn plcpz(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plcpz"))
        .args(args)
        .env_remove("PLCPZ_MEM")
        .env_remove("PLCPZ_BLOCK")
        .env("PLCPZ_TMP", dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = plcpz(dir, args);
    assert!(
        out.status.success(),
        "plcpz {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn round_trip_with_every_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (text, coded) = (path(d, "t.txt"), path(d, "t.plz"));
    ok(d, &["gen-corpus", "--kind", "repetitive", "--len", "200K", "--seed", "3", "-o", &text]);
    ok(d, &["--mem", "1M", "--block", "4K", "compress", &text, "-o", &coded]);
    let original = std::fs::read(&text).unwrap();
    assert_eq!(original.len(), 200 * 1024);
    for strategy in ["oracle", "pj", "compact-then-pj"] {
        let back = path(d, &format!("back-{strategy}"));
        ok(d, &["--mem", "1M", "--block", "4K", "decompress", &coded, "--strategy", strategy, "-o", &back]);
        assert_eq!(std::fs::read(&back).unwrap(), original, "strategy {strategy}");
    }
}

#[test]
fn compress_with_a_saved_index_gives_the_same_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = path(d, "t.txt");
    ok(d, &["gen-corpus", "--kind", "random", "--alphabet", "3", "--len", "20K", "-o", &text]);
    ok(d, &["index", &text, "-o", &path(d, "t.idx")]);
    ok(d, &["compress", &text, "-o", &path(d, "a.plz")]);
    ok(d, &["compress", &text, "--index", &path(d, "t.idx"), "-o", &path(d, "b.plz")]);
    assert_eq!(std::fs::read(path(d, "a.plz")).unwrap(), std::fs::read(path(d, "b.plz")).unwrap());
}

#[test]
fn stats_of_the_running_example() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = path(d, "ex.txt");
    std::fs::write(&text, "ababbabababbabbaababa").unwrap();
    let out = ok(d, &["stats", &text, "--theta", "2"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["references"], 4);
    assert_eq!(v["total_factors"], 9);
    assert_eq!(v["n"], 22);

    let coded = path(d, "ex.plz");
    ok(d, &["compress", &text, "-o", &coded]);
    let out = ok(d, &["stats", "--coded", &coded]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["references"], 4);
    assert_eq!(v["graph"]["multi_dependent"], 2);
    assert_eq!(v["graph"]["self_overlapping"], 1);
}

#[test]
fn lower_bound_corpus_has_the_expected_peak_list() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = path(d, "lb.txt");
    ok(d, &["gen-corpus", "--kind", "lower-bound", "--m", "100", "-o", &text]);
    assert_eq!(std::fs::metadata(&text).unwrap().len(), 10_000);
    let out = ok(d, &["stats", &text]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["max_peak_list"], 98);
}

#[test]
fn theta_sweep_and_metrics_lines() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = path(d, "t.txt");
    let metrics = path(d, "m.jsonl");
    ok(d, &["gen-corpus", "--kind", "repetitive", "--len", "50K", "-o", &text]);
    let out = ok(d, &["--metrics", &metrics, "theta-sweep", &text, "--from", "2", "--to", "4"]);
    let rows: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["theta"], 2);

    ok(d, &["--metrics", &metrics, "compress", &text, "-o", &path(d, "t.plz")]);
    ok(d, &["--metrics", &metrics, "decompress", &path(d, "t.plz"), "-o", &path(d, "t.out")]);
    let events: Vec<String> = std::fs::read_to_string(&metrics)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["event"].as_str().unwrap().to_string())
        .collect();
    for e in ["theta_sweep", "compress", "pj_round", "pj"] {
        assert!(events.iter().any(|x| x == e), "missing {e} in {events:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = |args: &[&str]| plcpz(d, args).status.code();

    // Configuration: budget too small for its block size.
    let text = path(d, "t.txt");
    std::fs::write(&text, "abcabcabc").unwrap();
    assert_eq!(code(&["--mem", "8K", "--block", "4K", "compress", &text]), Some(2));
    // I/O: missing input.
    assert_eq!(code(&["compress", &path(d, "missing")]), Some(3));
    // Input: NUL byte in the text.
    let nul = path(d, "nul.txt");
    std::fs::write(&nul, b"ab\0ab").unwrap();
    assert_eq!(code(&["compress", &nul]), Some(4));
    // Decode: not a coded file.
    assert_eq!(code(&["decompress", &text]), Some(5));
    // Cycle: two references copying from each other.
    let cyc = path(d, "cyc.plz");
    let mut bytes = b"PLCPZ001".to_vec();
    bytes.extend_from_slice(&5u64.to_le_bytes());
    bytes.extend_from_slice(&1u64.to_le_bytes());
    for (src, len) in [(3u64, 2u64), (1, 2)] {
        bytes.push(1);
        bytes.extend_from_slice(&src.to_le_bytes());
        bytes.extend_from_slice(&len.to_le_bytes());
    }
    bytes.push(0);
    bytes.extend_from_slice(&1u64.to_le_bytes());
    bytes.push(0);
    std::fs::write(&cyc, bytes).unwrap();
    for strategy in ["oracle", "pj", "compact-then-pj"] {
        assert_eq!(code(&["decompress", &cyc, "--strategy", strategy]), Some(6), "{strategy}");
    }
    // Bad arguments are rejected by the parser.
    assert_eq!(code(&["compress", "--theta"]), Some(2));
}
