use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wrist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wrist")).args(args).output().expect("binary runs")
}

fn out_dir(tmp: &Path, name: &str) -> String {
    tmp.join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn reproduce_paper_passes_and_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(tmp.path(), "rp");
    let o = wrist(&["--mode", "reproduce-paper", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains(" 0 fail"));
    let csv = fs::read_to_string(Path::new(&out).join("reproduction.csv")).unwrap();
    assert!(csv.lines().any(|l| l.contains("MoCA/Td") && l.contains("Pass")));
}

#[test]
fn shuffled_column_fails_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "mode = \"reproduce-paper\"\nreproduce.shuffle_column = \"jndt_mnm\"\nnormality_resamples = 200\n")
        .unwrap();
    let o = wrist(&["--config", cfg.to_str().unwrap(), "--out", &out_dir(tmp.path(), "neg")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("weber") && l.contains("Kt") && l.contains("FAIL")));
}

#[test]
fn analyze_on_bundled_matches_reproduce_core() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, r) = (out_dir(tmp.path(), "a"), out_dir(tmp.path(), "r"));
    assert!(wrist(&["--mode", "analyze", "--out", &a]).status.success());
    assert!(wrist(&["--mode", "reproduce-paper", "--out", &r]).status.success());
    for f in ["correlation_spearman.csv", "correlation_pearson.csv", "pairwise.csv", "descriptives.csv"] {
        assert_eq!(fs::read(Path::new(&a).join(f)).unwrap(), fs::read(Path::new(&r).join(f)).unwrap(), "{f}");
    }
}

#[test]
fn empty_and_malformed_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let o = wrist(&["--mode", "analyze", "--input", empty.to_str().unwrap(), "--out", &out_dir(tmp.path(), "x")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("parse error"), "{}", stderr(&o));

    let no_col = tmp.path().join("nocol.csv");
    fs::write(&no_col, "pid,age\n1,30\n").unwrap();
    let o = wrist(&["--mode", "validate", "--input", no_col.to_str().unwrap(), "--out", &out_dir(tmp.path(), "y")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("`gender`"), "{}", stderr(&o));

    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "seed = 3\n\nruns = \"many\"\n").unwrap();
    let o = wrist(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn validate_reports_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("t.csv");
    let text = wrist_testbed::participant::bundled_participants_csv().replacen(",26,4.40,", ",40,4.40,", 1);
    fs::write(&table, text).unwrap();
    let out = out_dir(tmp.path(), "v");
    let o = wrist(&["--mode", "validate", "--input", table.to_str().unwrap(), "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    let v = fs::read_to_string(Path::new(&out).join("violations.csv")).unwrap();
    assert!(v.contains("1,moca,"), "{v}");
}

#[test]
fn simulate_then_analyze() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sim.toml");
    fs::write(&cfg, "participants = 6\nnormality_resamples = 500\n").unwrap();
    let sim = out_dir(tmp.path(), "sim");
    let o = wrist(&["--mode", "simulate", "--config", cfg.to_str().unwrap(), "--seed", "12", "--out", &sim]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let table = Path::new(&sim).join("participants.csv");
    assert!(Path::new(&sim).join("sessions/p06/blocks.csv").exists());

    let an = out_dir(tmp.path(), "an");
    let o = wrist(&[
        "--mode",
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--input",
        table.to_str().unwrap(),
        "--out",
        &an,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = fs::read_to_string(Path::new(&an).join("correlation_spearman.csv")).unwrap();
    assert_eq!(m.lines().count(), 1 + 45);
}

#[test]
fn montecarlo_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_dir(tmp.path(), "mc");
    let o = wrist(&["--mode", "montecarlo", "--runs", "60", "--seed", "4", "--out", &out]);
    assert!(o.status.success(), "{}", stdout(&o));
    let csv = fs::read_to_string(Path::new(&out).join("montecarlo.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().skip(1).all(|l| l.contains(",60,")));
}
