use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qpuf_id(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpuf-id")).args(args).env_remove("QPUF_SEED").output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = qpuf_id(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn summary_field(dir: &Path, column: &str) -> String {
    let mut r = csv::Reader::from_path(dir.join("summary.csv")).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    r.records().next().unwrap().unwrap()[idx].to_string()
}

fn dir_str(d: &Path) -> &str {
    d.to_str().unwrap()
}

#[test]
fn exact_hrv_run_accepts_always() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["run", "hrv-swap", "--mode", "exact", "--trials", "100", "--out", dir_str(tmp.path())]);
    assert_eq!(summary_field(tmp.path(), "rate"), "1.0");
    assert_eq!(summary_field(tmp.path(), "accepted"), "100");
    assert!(tmp.path().join("manifest.json").exists());
}

#[test]
fn lrv_run_meets_completeness() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&[
        "run",
        "lrv",
        "--n",
        "4",
        "--N",
        "64",
        "--tau",
        "16",
        "--trials",
        "2000",
        "--transcripts",
        "2",
        "--out",
        dir_str(tmp.path()),
    ]);
    let rate: f64 = summary_field(tmp.path(), "rate").parse().unwrap();
    assert!(rate >= 0.99);
    let transcripts = fs::read_to_string(tmp.path().join("transcripts.jsonl")).unwrap();
    assert_eq!(transcripts.lines().count(), 2);
}

#[test]
fn missing_config_field_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.toml");
    fs::write(&cfg, "n = 4\nK = 16\nN = 8\nM = 1\nkappa = 0.5\np = 0.5\nmode = \"sampled\"\nseed = 1\n").unwrap();
    let out = qpuf_id(&["run", "lrv", "--config", cfg.to_str().unwrap(), "--out", dir_str(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_values_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qpuf_id(&["run", "lrv", "--N", "6", "--out", dir_str(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    let out = qpuf_id(&["run", "hrv-nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_file_and_seed_comes_from_env() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.toml");
    fs::write(&cfg, "n = 3\nK = 8\nN = 4\nM = 2\ntau = 1.0\nkappa = 0.5\np = 0.5\nmode = \"sampled\"\nseed = 7\n")
        .unwrap();
    let a = tmp.path().join("a");
    ok(&["run", "hrv-gswap", "--config", cfg.to_str().unwrap(), "--M", "3", "--trials", "3", "--out", dir_str(&a)]);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["M"], 3);
    assert_eq!(m["config"]["n"], 3);
    assert_eq!(m["seed"], 7);

    let b = tmp.path().join("b");
    let out = Command::new(env!("CARGO_BIN_EXE_qpuf-id"))
        .args(["run", "hrv-swap", "--trials", "2", "--out", dir_str(&b)])
        .env("QPUF_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 99);
}

#[test]
fn figure3_sweep_is_reproducible_and_dominated() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&["analyze", "sweep-figure3", "--tau", "1", "--Nmax", "64", "--out", dir_str(d)]);
    }
    let bytes = fs::read(a.join("sweep-figure3.csv")).unwrap();
    assert_eq!(bytes, fs::read(b.join("sweep-figure3.csv")).unwrap());
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    for n in (4..=64).step_by(4) {
        let get = |id: &str| -> f64 {
            rows.iter().find(|x| x[0] == n.to_string() && &x[5] == id).unwrap()[6].parse().unwrap()
        };
        assert!(get("global_sum") >= get("independent_exact"));
    }
}

#[test]
fn resources_target_has_table_rows() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["analyze", "resources", "--epsilon", "1e-6", "--M", "4", "--out", dir_str(tmp.path())]);
    let text = fs::read_to_string(tmp.path().join("resources.csv")).unwrap();
    assert!(text.starts_with("N,tau,p,M,epsilon,formula_id,value,flag\n"));
    assert!(text.contains("lrv:classical_rounds,1.0,ok"));
    assert_eq!(text.lines().count(), 1 + 12);
}

#[test]
fn every_analyze_target_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for t in ["bounds", "sweep-figure6", "sweep-figure7", "sweep-figure8", "avg-uniform-p"] {
        ok(&["analyze", t, "--out", dir_str(tmp.path())]);
        assert!(tmp.path().join(format!("{t}.csv")).exists());
    }
}

#[test]
fn replay_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&[
        "attack",
        "lrv",
        "classical-independent",
        "--N",
        "8",
        "--tau",
        "0",
        "--trials",
        "500",
        "--seed",
        "3",
        "--out",
        dir_str(&a),
    ]);
    ok(&["replay", a.join("manifest.json").to_str().unwrap(), "--out", dir_str(&b)]);
    assert_eq!(fs::read(a.join("summary.csv")).unwrap(), fs::read(b.join("summary.csv")).unwrap());
    assert_eq!(fs::read(a.join("attack.json")).unwrap(), fs::read(b.join("attack.json")).unwrap());
}

#[test]
fn haar_responder_prints_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "attack",
        "hrv-swap",
        "haar-responder",
        "--N",
        "1",
        "--M",
        "20",
        "--trials",
        "2000",
        "--out",
        dir_str(tmp.path()),
    ]);
    assert!(stdout.contains("swap_soundness: 9.536743e-7"), "{stdout}");
    assert_eq!(summary_field(tmp.path(), "accepted"), "0");
}

#[test]
fn trap_experiment_reports_accuracy() {
    let tmp = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "attack",
        "lrv",
        "quantum-collective",
        "--n",
        "6",
        "--d",
        "6",
        "--rounds",
        "800",
        "--out",
        dir_str(tmp.path()),
    ]);
    assert!(stdout.contains("per-round guess accuracy"));
    let acc: f64 = summary_field(tmp.path(), "accuracy").parse().unwrap();
    assert!(acc < 0.6);
}

#[test]
fn oracle_prints_report() {
    let stdout = ok(&["oracle", "--N", "4", "--tau", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!((v["pass_probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let out = qpuf_id(&["oracle", "--N", "20"]);
    assert_eq!(out.status.code(), Some(1));
}
