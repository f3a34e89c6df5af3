use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fixrank(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixrank"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn records(dir: &Path) -> Vec<Value> {
    fs::read_to_string(dir.join("records.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn count_rank_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = fixrank(&["count-rank", "--n", "2", "--m", "1", "--k", "1", "--t", "2,3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(dir.path());
    assert_eq!(m["status"], "ok");
    assert_eq!(m["record_count"], 2);
    let r = records(dir.path());
    assert_eq!(r[0]["exact_count"], 12);
    assert_eq!(r[0]["schema_version"], 1);
    assert_eq!(r[0]["command"], "count-rank");
    assert!(r[0]["field_fingerprint"].is_string());
    assert_eq!(r[0]["config"]["n"], 2);
}

#[test]
fn window_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = fixrank(
        &["hecke-moment", "--n", "4", "--m", "3", "--s", "1", "--primes", "2", "--cutoff", "5"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1-s/n < 1/m"));
}

#[test]
fn missing_argument_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = fixrank(&["count-rank", "--n", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cap_abort_exits_3_with_partial_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = fixrank(&["count-rank", "--n", "3", "--m", "2", "--k", "1", "--t", "1,1000000"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let m = manifest(dir.path());
    assert_eq!(m["status"], "cap_abort");
    assert_eq!(records(dir.path()).len(), 1);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "hecke-moment",
        "--n",
        "3",
        "--m",
        "2",
        "--s",
        "2",
        "--primes",
        "3,7",
        "--cutoff",
        "10",
        "--mode",
        "sampled:50",
        "--mc-samples",
        "500",
        "--seed",
        "7",
        "--radius",
        "1.2",
    ];
    let read = || fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
    assert_eq!(fixrank(&args, dir.path()).status.code(), Some(0));
    let first = read();
    assert_eq!(fixrank(&args, dir.path()).status.code(), Some(0));
    assert!(first == read(), "records differ between identical runs");
    let mut other = args.to_vec();
    other[16] = "8";
    assert_eq!(fixrank(&other, dir.path()).status.code(), Some(0));
    assert!(first != read(), "seed has no effect");
}

#[test]
fn csv_output_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "n = 2\nm = 1\nk = 1\nt = [2.0]\nformat = \"csv\"\n").unwrap();
    let out = dir.path().join("out");
    let o = fixrank(&["count-rank", "--n", "9", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("records.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.ends_with("schema_version,config_hash"));
    assert_eq!(manifest(&out)["config"]["n"], 2);
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "bogus = 1\n").unwrap();
    let o = fixrank(&["field-info", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fixrank"))
        .args(["field-info", "--field", "Qi"])
        .env("FIXRANK_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(dir.path())["command"], "field-info");
}
