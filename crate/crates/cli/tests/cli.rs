use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use popsi::synth::{generate, SyntheticConfig};
use tempfile::TempDir;

fn popsi(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popsi"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = popsi(dir, args);
    assert!(
        out.status.success(),
        "popsi {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Writes a synthetic multi-behavior log with tokens `u<i>`, `i<j>`.
fn write_log(dir: &Path, seed: u64) -> PathBuf {
    write_sized_log(dir, seed, 120, 90)
}

fn write_sized_log(dir: &Path, seed: u64, users: usize, items: usize) -> PathBuf {
    let t = generate(&SyntheticConfig { users, items, seed, ..Default::default() }).unwrap().tensor;
    let labels = ["purchase", "click", "cart"];
    let mut text = String::new();
    for (n, (u, v, k)) in t.coords().into_iter().enumerate() {
        text.push_str(&format!("u{u},i{v},{},{}\n", labels[k], 1_600_000_000 + n));
    }
    let path = dir.join("log.csv");
    fs::write(&path, text).unwrap();
    path
}

fn pipeline(seed: u64) -> (TempDir, String) {
    let tmp = tempfile::tempdir().unwrap();
    write_log(tmp.path(), seed);
    ok(tmp.path(), &["ingest", "--input", "log.csv", "--out", "run"]);
    ok(tmp.path(), &["fit", "--out", "run", "--r", "8"]);
    let report = ok(tmp.path(), &["evaluate", "--out", "run"]);
    (tmp, report)
}

#[test]
fn ingest_writes_indices_and_stats() {
    let tmp = tempfile::tempdir().unwrap();
    write_log(tmp.path(), 1);
    ok(tmp.path(), &["ingest", "--input", "log.csv", "--out", "run"]);
    let run = tmp.path().join("run");
    for file in ["tensor.txt", "users.txt", "items.txt", "behaviors.txt", "stats.json", "config.txt"] {
        assert!(run.join(file).exists(), "{file}");
    }
    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["behaviors"].as_array().unwrap().len(), 3);
    assert_eq!(stats["behaviors"][0]["label"], "purchase");
    assert_eq!(stats["warnings"], 0);
    assert_eq!(fs::read_to_string(run.join("behaviors.txt")).unwrap(), "purchase\nclick\ncart\n");
    let config = fs::read_to_string(run.join("config.txt")).unwrap();
    assert!(config.contains("behaviors = purchase,click,cart"));
}

#[test]
fn empty_input_exits_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("empty.csv"), "").unwrap();
    let out = popsi(tmp.path(), &["ingest", "--input", "empty.csv", "--out", "run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no records"));
}

#[test]
fn unknown_behavior_is_a_warning() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("log.tsv"), "u1\ti1\tpurchase\nu1\ti2\tswipe\nu2\ti1\tclick\n").unwrap();
    let stdout = ok(
        tmp.path(),
        &["ingest", "--input", "log.tsv", "--delimiter", "tab", "--columns", "user,item,behavior", "--behaviors", "purchase,click"],
    );
    assert!(stdout.contains("1 warning(s)"), "{stdout}");
    let stats = fs::read_to_string(tmp.path().join("popsi-out/stats.json")).unwrap();
    assert!(stats.contains("\"unknown_behavior_lines\": 1"));
}

#[test]
fn fit_is_deterministic_and_logs_steps() {
    let tmp = tempfile::tempdir().unwrap();
    write_log(tmp.path(), 2);
    ok(tmp.path(), &["ingest", "--input", "log.csv", "--out", "a"]);
    ok(tmp.path(), &["ingest", "--input", "log.csv", "--out", "b"]);
    let log = ok(tmp.path(), &["fit", "--out", "a", "--r", "6", "--no-pop"]);
    ok(tmp.path(), &["fit", "--out", "b", "--r", "6", "--no-pop"]);
    let model = |d: &str| fs::read(tmp.path().join(d).join("model.bin")).unwrap();
    assert_eq!(model("a"), model("b"));
    assert!(log.contains("r = 6\n"));
    assert!(log.contains("step 3: popularity projection: skipped"));
    assert!(log.contains("step 4: re-orthonormalization: skipped"));
    for file in ["train.txt", "val.txt", "test.txt", "fit.log"] {
        assert!(tmp.path().join("a").join(file).exists(), "{file}");
    }
}

#[test]
fn fit_defaults_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    write_sized_log(tmp.path(), 3, 300, 200);
    ok(tmp.path(), &["ingest", "--input", "log.csv"]);
    let log = ok(tmp.path(), &["fit"]);
    assert!(log.contains("r = 200\n") && log.contains("p = 0.2\n"), "{log}");
    let model = fs::read(tmp.path().join("popsi-out/model.bin")).unwrap();
    assert!(model.windows(8).any(|w| w == 0.2f64.to_le_bytes()));
}

#[test]
fn report_has_fixed_keys_and_is_reproducible() {
    let (tmp, first) = pipeline(4);
    let (_, second) = pipeline(4);
    assert_eq!(first, second);
    assert_eq!(fs::read_to_string(tmp.path().join("run/report.json")).unwrap(), first);
    let json: serde_json::Value = serde_json::from_str(&first).unwrap();
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        ["config", "ndcg_at_20", "ndcg_at_50", "pri", "recall_at_20", "recall_at_50", "users_evaluated", "users_skipped_pri"]
    );
    assert_eq!(json["config"]["r"], 8);
    assert_eq!(json["config"]["variant"], "popsi_full");
}

#[test]
fn evaluate_rejects_mismatched_model() {
    let (small, _) = pipeline(5);
    let other = tempfile::tempdir().unwrap();
    let t = generate(&SyntheticConfig { users: 60, items: 40, seed: 5, ..Default::default() }).unwrap().tensor;
    let text: String = t.coords().into_iter().map(|(u, v, k)| format!("u{u},i{v},{}\n", ["purchase", "click", "cart"][k])).collect();
    fs::write(other.path().join("log.csv"), text).unwrap();
    ok(other.path(), &["ingest", "--input", "log.csv", "--columns", "user,item,behavior", "--out", "run"]);
    ok(other.path(), &["fit", "--out", "run", "--r", "4"]);
    fs::copy(other.path().join("run/model.bin"), small.path().join("run/model.bin")).unwrap();
    let out = popsi(small.path(), &["evaluate", "--out", "run"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}

#[test]
fn evaluate_named_variant() {
    let (tmp, _) = pipeline(6);
    let out = ok(tmp.path(), &["evaluate", "--out", "run", "--variant", "itempop", "--split", "val"]);
    assert!(out.contains("\"variant\": \"itempop\""));
    assert!(tmp.path().join("run/report_itempop.json").exists());
    assert!(!popsi(tmp.path(), &["evaluate", "--out", "run", "--variant", "nope"]).status.success());
}

#[test]
fn recommend_lists_and_errors() {
    let (tmp, _) = pipeline(7);
    let out = ok(tmp.path(), &["recommend", "--out", "run", "--user", "u3", "--k", "3"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    let scores: Vec<f64> = lines
        .iter()
        .map(|l| {
            let fields: Vec<&str> = l.split('\t').collect();
            assert_eq!(fields[0], "u3");
            assert!(fields[1].starts_with('i'));
            fields[2].parse().unwrap()
        })
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));

    let out = popsi(tmp.path(), &["recommend", "--out", "run", "--user", "u3,ghost", "--k", "2"]);
    assert!(!out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l == "ERR unknown user ghost"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("u3\t")).count(), 2);

    let out = popsi(tmp.path(), &["recommend", "--out", "run", "--user", "u3", "--k", "5000"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).lines().count() < 90);
    assert!(String::from_utf8_lossy(&out.stderr).contains("requested items are available"));
}

#[test]
fn sweep_rows_dedup_and_failures() {
    let (tmp, _) = pipeline(8);
    let out = ok(tmp.path(), &["sweep", "--out", "run", "--sweep-r", "4,8,4,100000", "--sweep-p", "0.1,0.2,0.3"]);
    let csv = fs::read_to_string(tmp.path().join("run/sweep.csv")).unwrap();
    assert_eq!(out, csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "param,value,ndcg_at_50,pri");
    assert_eq!(lines.len(), 1 + 3 + 3);
    assert!(lines[1].starts_with("r,4,"));
    assert_eq!(lines[3], "r,100000,,");
    assert!(lines[4].starts_with("p,0.1,"));
    assert!(lines[1].split(',').nth(2).unwrap().parse::<f64>().is_ok());

    assert!(!popsi(tmp.path(), &["sweep", "--out", "run"]).status.success());
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    write_log(tmp.path(), 9);
    fs::write(tmp.path().join("my.conf"), "# run settings\ninput = log.csv\nout = runs/x\nr = 7\np = 0.3\n").unwrap();
    ok(tmp.path(), &["--config", "my.conf", "ingest"]);
    ok(tmp.path(), &["fit", "--config", "my.conf", "--r", "5", "--no-si"]);
    let saved = fs::read_to_string(tmp.path().join("runs/x/config.txt")).unwrap();
    assert!(saved.contains("r = 5\n") && saved.contains("p = 0.3\n") && saved.contains("use_si = false\n"));
    let report = ok(tmp.path(), &["evaluate", "--out", "runs/x"]);
    assert!(report.contains("\"variant\": \"popsi_matrix_pop\""));

    let bad = popsi(tmp.path(), &["fit", "--out", "runs/x", "--p", "1.5"]);
    assert!(!bad.status.success());
}
