use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use qcommit_cli::SCENARIOS;
use serde_json::Value;

fn qcommit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcommit")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn records(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("exp.toml");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn list_prints_six_scenarios() {
    let o = qcommit(&["list"]);
    assert_eq!(code(&o), 0);
    let out = text(&o.stdout);
    assert_eq!(out.lines().count(), 6);
    for name in ["honest-default", "flip-sweep", "entangle-demo", "purification-nogo", "oracle-degradation", "causal-violation"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name} missing from\n{out}");
    }
}

#[test]
fn every_shipped_scenario_meets_its_expectations_in_time() {
    let tmp = tempfile::tempdir().unwrap();
    for s in &SCENARIOS {
        let dir = tmp.path().join(s.name);
        let start = Instant::now();
        let o = qcommit(&["run", s.name, "--out", dir.to_str().unwrap()]);
        let elapsed = start.elapsed();
        let expected = if s.name == "causal-violation" { 3 } else { 0 };
        assert_eq!(code(&o), expected, "{}: {}{}", s.name, text(&o.stdout), text(&o.stderr));
        assert!(elapsed < Duration::from_secs(60), "{} took {elapsed:?}", s.name);
        let recs = records(&dir.join("report.jsonl"));
        assert!(recs.iter().all(|r| r["schema"].as_str().is_some_and(|v| v.starts_with("qcommit."))));
        assert!(recs.iter().filter(|r| r["kind"] == "check").all(|r| r["check"]["passed"] == true), "{}", s.name);
        assert!(dir.join("summary.txt").is_file());
    }
}

#[test]
fn honest_default_reports_unit_cheat_sum() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qcommit(&["run", "honest-default", "--trials", "300", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let recs = records(&tmp.path().join("report.jsonl"));
    let points: Vec<&Value> = recs.iter().filter(|r| r["kind"] == "point").collect();
    assert!(!points.is_empty());
    assert!(points.iter().all(|p| p["point"]["p_sum"] == 1.0));
    assert_eq!(recs.last().unwrap()["status"], "ok");
    let log = std::fs::read_to_string(tmp.path().join("transcript.jsonl")).unwrap();
    assert!(log.lines().any(|l| l.contains("\"kind\":\"verdict\"") && l.contains("accepted")));
}

#[test]
fn same_seed_gives_identical_machine_output() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |sub: &str, seed: &str| {
        let dir = tmp.path().join(sub);
        let o = qcommit(&["run", "flip-sweep", "--trials", "2000", "--seed", seed, "--format", "machine", "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", text(&o.stdout));
        assert!(!dir.join("summary.txt").exists());
        (std::fs::read(dir.join("report.jsonl")).unwrap(), std::fs::read(dir.join("transcript.jsonl")).unwrap())
    };
    let a = run("a", "11");
    let b = run("b", "11");
    let c = run("c", "12");
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
}

#[test]
fn missing_seed_is_a_config_error_naming_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "scenario = \"x\"\nexperiment = \"sessions\"\n");
    for verb in ["run", "validate"] {
        let o = qcommit(&[verb, &cfg]);
        assert_eq!(code(&o), 2);
        assert!(text(&o.stderr).contains("seed"), "{}", text(&o.stderr));
    }
}

#[test]
fn invalid_field_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "scenario = \"x\"\nexperiment = \"sessions\"\nseed = 1\n[protocol]\nm = 8\nn0 = 16\n");
    let o = qcommit(&["validate", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("protocol.n0"), "{}", text(&o.stderr));
}

#[test]
fn unknown_scenario_lists_valid_names() {
    let o = qcommit(&["run", "honest-defalt"]);
    assert_eq!(code(&o), 2);
    let err = text(&o.stderr);
    assert!(SCENARIOS.iter().all(|s| err.contains(s.name)), "{err}");
}

#[test]
fn unreadable_config_is_an_io_error() {
    let o = qcommit(&["run", "/nonexistent/exp.toml"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn causal_violation_aborts_with_the_injected_message() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qcommit(&["run", "causal-violation", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(text(&o.stdout).contains("oracle-confirm/B1"));
    let recs = records(&tmp.path().join("report.jsonl"));
    let abort = recs.iter().find(|r| r["kind"] == "abort").expect("abort record");
    let v = abort["data"]["violations"].as_array().unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0]["Superluminal"]["tag"], "oracle-confirm/B1");
    assert!(!recs.iter().any(|r| r["kind"] == "point"));
}

#[test]
fn breached_expectation_exits_four() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "scenario = \"x\"\nexperiment = \"sessions\"\nseed = 1\ntrials = 50\n[protocol]\nm = 2\nn0 = 8\n\
         [analysis]\ninformation = \"off\"\n[expect]\naccept_rate = 0.5\n",
    );
    let o = qcommit(&["run", &cfg]);
    assert_eq!(code(&o), 4, "{}", text(&o.stdout));
    assert!(text(&o.stdout).contains("[FAIL] accept-rate"));
}

#[test]
fn validate_reports_planned_schedule() {
    let o = qcommit(&["validate", "honest-default"]);
    assert_eq!(code(&o), 0);
    assert!(text(&o.stdout).contains("honest-default: ok"));
    let o = qcommit(&["validate", "causal-violation"]);
    assert_eq!(code(&o), 0);
    assert!(text(&o.stdout).contains("schedule will abort"));
}

#[test]
fn machine_format_without_out_goes_to_stdout() {
    let o = qcommit(&["run", "purification-nogo", "--format", "machine"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<Value> = text(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["kind"], "run");
    assert!(lines.iter().filter(|r| r["kind"] == "tradeoff").count() >= 2);
}

#[test]
fn explicit_moving_site_layout_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "scenario = \"moving\"\nexperiment = \"sessions\"\nseed = 9\ntrials = 100\n\
         [protocol]\nm = 2\nn0 = 8\n\
         [[spacetime.sites]]\nname = \"B0\"\nparty = \"bob\"\nposition = 0.0\n\
         [[spacetime.sites]]\nname = \"A1\"\nparty = \"alice\"\nposition = 1.0\n\
         [[spacetime.sites]]\nname = \"B1\"\nparty = \"bob\"\nposition = 3.0\nvelocity = 0.5\n\
         [expect]\naccept_rate = 1.0\np_sum = 1.0\n",
    );
    let o = qcommit(&["run", &cfg, "--format", "summary"]);
    assert_eq!(code(&o), 0, "{}{}", text(&o.stdout), text(&o.stderr));
}
