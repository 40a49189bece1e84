//! Machine-readable records, the human summary and the files they go to.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::Format;
use crate::experiment::{RunOutput, RUN_SCHEMA};
use crate::CliError;

pub const REPORT_FILE: &str = "report.jsonl";
pub const TRANSCRIPT_FILE: &str = "transcript.jsonl";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Every machine record of a run: header, report, harness records, checks, status.
/// Contains nothing that depends on the wall clock or the output location.
pub fn machine_records(out: &RunOutput) -> String {
    let mut config = out.resolved.config.clone();
    config.output = Default::default();
    let mut s = json!({
        "schema": RUN_SCHEMA, "kind": "run", "scenario": config.scenario, "experiment": config.experiment,
        "seed": config.seed, "trials": config.trials, "config": config,
    })
    .to_string();
    s.push('\n');
    if let Some(r) = &out.report {
        s.push_str(&r.to_jsonl());
    }
    for r in &out.records {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    for c in &out.checks {
        s.push_str(&json!({ "schema": RUN_SCHEMA, "kind": "check", "check": c }).to_string());
        s.push('\n');
    }
    let status = out.status();
    s.push_str(&json!({ "schema": RUN_SCHEMA, "kind": "status", "status": status, "exit_code": status.exit_code() }).to_string());
    s.push('\n');
    s
}

pub fn summary(out: &RunOutput) -> String {
    let c = &out.resolved.config;
    let mut s = String::new();
    let _ = writeln!(s, "scenario {} ({:?}), seed {}, {} trials", c.scenario, c.experiment, c.seed, c.trials);
    if !c.description.is_empty() {
        let _ = writeln!(s, "{}", c.description);
    }
    let p = &out.resolved.params;
    let _ = writeln!(s, "M = {}, N0 = {}, strategy {}\n", p.m, p.n0, out.resolved.strategy.name());
    if !out.violations.is_empty() {
        let _ = writeln!(s, "ABORTED: schedule is causally invalid");
        for v in &out.violations {
            let _ = writeln!(s, "  - {v}");
        }
        s.push('\n');
    }
    if let Some(t) = &out.session_tally {
        let (lo, hi) = t.accept_rate.ci();
        let _ = writeln!(
            s,
            "sessions: {} accepted, {} rejected, {} aborted of {}; acceptance {:.6} [{lo:.6}, {hi:.6}]; {} accepted reveals match the committed bit\n",
            t.accepted, t.rejected, t.aborted, t.trials, t.accept_rate.value, t.matched
        );
    }
    if let Some(d) = &out.degradation {
        let _ = writeln!(
            s,
            "oracle flip {}, leak {}: honest acceptance {:.6} (degradation {:.6}, {} lost at testing); \
             {}-flip pass {:.6} vs {:.6} ideal; Bob's advantage {:.6}\n",
            d.knobs.flip_probability,
            d.knobs.leak_probability,
            d.honest_accept.value,
            d.degradation,
            d.honest_test_rejections,
            d.flip_k,
            d.flip_pass.value,
            d.flip_pass_ideal,
            d.bob_tv.value
        );
    }
    if let Some(r) = &out.report {
        s.push_str(&r.summary());
        s.push('\n');
    }
    if !out.checks.is_empty() {
        let _ = writeln!(s, "expectations:");
        for c in &out.checks {
            let _ = writeln!(s, "  [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    let status = out.status();
    let _ = writeln!(s, "status: {} (exit {})", serde_json::to_value(status).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default(), status.exit_code());
    s
}

/// Writes the files selected by `format` into `dir`; returns their paths.
pub fn write_outputs(out: &RunOutput, dir: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = vec![];
    let mut put = |name: &str, body: &str| -> Result<(), CliError> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
        Ok(())
    };
    if format.machine() {
        put(REPORT_FILE, &machine_records(out))?;
        if !out.transcripts.is_empty() {
            put(TRANSCRIPT_FILE, &out.transcripts)?;
        }
    }
    if format.summary() {
        put(SUMMARY_FILE, &summary(out))?;
    }
    Ok(files)
}
