use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use innerlab::config::{load_config, ExperimentConfig};

fn innerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_innerlab"))
        .args(args)
        .env("INNERLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const QUICK: &str = r#"{
  "blaschke": "f2",
  "coefficients": {"kind": "explicit", "values": [[1, 0], [0.5, 0]]},
  "seed": 3,
  "checks": ["l2_sandwich", "vmoa_decay"]
}"#;

#[test]
fn eval_monomial_iterate() {
    let o = innerlab(&["eval", "--f", "f1", "--z", "0.5", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0.00390625+0i");
}

#[test]
fn eval_reads_a_product_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f1.json", r#"{"zeros": [[0, 0], [0, 0]], "rotation": [1, 0]}"#);
    let o = innerlab(&["eval", "--f", f.to_str().unwrap(), "--z", "0.5", "--n", "3"]);
    assert_eq!(stdout(&o).trim(), "0.00390625+0i");
    let o = innerlab(&["eval", "--f", "f2", "--z", "-0.5", "--n", "0"]);
    assert_eq!(stdout(&o).trim(), "-0.5+0i");
}

#[test]
fn eval_rejects_bad_input() {
    assert_eq!(innerlab(&["eval", "--f", "f1", "--z", "1.5", "--n", "1"]).status.code(), Some(2));
    assert_eq!(innerlab(&["eval", "--f", "f1", "--z", "abc"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", r#"{"zeros": [[0.5, 0], [0.1, 0]], "rotation": [1, 0]}"#);
    let o = innerlab(&["eval", "--f", f.to_str().unwrap(), "--z", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("f(0) must be 0"));
    let missing = dir.path().join("nope.json");
    assert_eq!(innerlab(&["eval", "--f", missing.to_str().unwrap(), "--z", "0.1"]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    let o = innerlab(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = innerlab(&["verify", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn invalid_configs_exit_2_with_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"blaschke": {"zeros": [[0.5, 0], [0.2, 0]], "rotation": [0.9, 0]},
            "coefficients": {"kind": "explicit", "values": []}, "seed": 1}"#,
    );
    let o = innerlab(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("f(0) must be 0"), "{err}");
    assert!(err.contains("rotation must have modulus 1"), "{err}");
    let cfg = write(dir.path(), "unknown.json", &QUICK.replace("vmoa_decay", "no_such_check"));
    assert_eq!(innerlab(&["verify", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    assert_eq!(innerlab(&["verify", "--config", missing.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn verify_writes_deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "quick.json", QUICK);
    let run = |tag: &str| {
        let json = dir.path().join(format!("{tag}.json"));
        let csv = dir.path().join(format!("{tag}.csv"));
        let plots = dir.path().join(format!("{tag}_plots"));
        let o = innerlab(&[
            "verify",
            "--suite",
            "all",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            json.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
            "--plot-dir",
            plots.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
        (fs::read(json).unwrap(), fs::read_to_string(csv).unwrap(), plots)
    };
    let (j1, c1, plots) = run("a");
    let (j2, c2, _) = run("b");
    assert_eq!(j1, j2);
    assert_eq!(c1, c2);
    assert!(c1.starts_with("check_id,pass,margin,runtime\n"));
    assert!(!c1.contains('\r'));
    assert_eq!(c1.lines().count(), 3);
    let reports: serde_json::Value = serde_json::from_slice(&j1).unwrap();
    let ids: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["check_id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["l2_sandwich", "vmoa_decay"]);
    let series = fs::read_to_string(plots.join("vmoa_decay__max_variance_by_j.dat")).unwrap();
    assert_eq!(series.lines().count(), 9);
    assert!(series.lines().all(|l| l.split(' ').count() == 2));
}

#[test]
fn report_renders_saved_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "quick.json", QUICK);
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    innerlab(&["verify", "--config", cfg.to_str().unwrap(), "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    let again = dir.path().join("again.csv");
    let o = innerlab(&["report", "--in", json.to_str().unwrap(), "--csv", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read(csv).unwrap(), fs::read(again).unwrap());
    let garbage = write(dir.path(), "garbage.json", "{}");
    assert_eq!(innerlab(&["report", "--in", garbage.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = QUICK.replace(
        r#""seed": 3,"#,
        r#""seed": 3, "check_params": {"vmoa_decay": {"final_fraction": 0.0}},"#,
    );
    let cfg = write(dir.path(), "strict.json", &text);
    let o = innerlab(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "quick.json", QUICK);
    let target = dir.path().join("missing/dir/r.json");
    let o = innerlab(&["verify", "--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn series_and_norms_emit_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = repo_file("configs/quick.json");
    let out = dir.path().join("fields");
    let o = innerlab(&["series", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for n in 1..=3 {
        let text = fs::read_to_string(out.join(format!("partial_sum_n{n}.csv"))).unwrap();
        assert!(text.starts_with("angle,re,im\n"));
        assert_eq!(text.lines().count(), 1 + 1024);
    }
    let bin = dir.path().join("bin");
    innerlab(&["series", "--config", cfg.to_str().unwrap(), "--format", "binary", "--out-dir", bin.to_str().unwrap()]);
    assert_eq!(fs::metadata(bin.join("partial_sum_n3.bin")).unwrap().len(), 1024 * 24);

    let norms = dir.path().join("norms.json");
    let o = innerlab(&["norms", "--config", cfg.to_str().unwrap(), "--out", norms.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(norms).unwrap()).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|n| n["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"l2_squared_gram"));
    assert!(names.contains(&"bmoa_squared"));
}

#[test]
fn shipped_configs_load() {
    let default = load_config(&repo_file("configs/default.json")).unwrap();
    assert_eq!(default, ExperimentConfig::default());
    load_config(&repo_file("configs/quick.json")).unwrap();
}
