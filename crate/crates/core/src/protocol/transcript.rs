use serde::{Deserialize, Serialize};
use serde_json::json;

use super::session::{RevealCheck, Stage};
use super::{Declaration, EncodingRule, OracleKnobs, PlannedSchedule, ProtocolParams, SecurityBounds, Steps};
use crate::adversary::Strategy;
use crate::quantum::SpinLabel;
use crate::spacetime::{Event, Schedule, Violation};

/// Schema tag carried by every transcript log record.
pub const TRANSCRIPT_SCHEMA: &str = "qcommit.transcript/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Outcome {
    Accepted,
    Rejected { stage: Stage, particle: Option<usize> },
    Aborted { stage: Stage, reason: String },
    /// Run ended before a verdict was reached.
    Incomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestedReveal {
    pub particle: usize,
    pub pair: (u8, u8),
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevealClaim {
    pub bit: u8,
    pub labels: Vec<SpinLabel>,
}

/// Full record of one reduction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub n0: usize,
    pub m: usize,
    pub seed: u64,
    pub bounds: SecurityBounds,
    pub oracle: OracleKnobs,
    pub strategy: Strategy,
    pub committed_bits: Vec<u8>,
    pub oracle_commitments: usize,
    pub spin_labels: Vec<SpinLabel>,
    /// Tested particle indices, ascending; `n0 − m` of them.
    pub challenge: Vec<usize>,
    /// Tested particles checked before the verdict (all of them unless one failed).
    pub tested: Vec<TestedReveal>,
    pub untested: Vec<usize>,
    pub declarations: Vec<Declaration>,
    /// Bit Alice's declarations are aimed at.
    pub final_bit: Option<u8>,
    /// Number of declarations that misstate the true basis, for bit 0 and bit 1.
    pub declaration_errors: [usize; 2],
    /// Oracle sessions whose bits leaked to Bob before the reveal.
    pub leaked: Vec<(usize, u8)>,
    pub reveal: Option<RevealClaim>,
    /// Present iff a reveal was attempted.
    pub reveal_check: Option<RevealCheck>,
    /// Whether any suspended (untested) oracle commitment was ever opened.
    pub suspended_opened: bool,
    pub outcome: Outcome,
    pub violations: Vec<Violation>,
    pub t_c: f64,
    pub schedule: Schedule,
    pub steps: Steps,
    pub notes: Vec<String>,
}

impl SessionTranscript {
    pub(crate) fn new(params: &ProtocolParams, strategy: &Strategy, plan: &PlannedSchedule, bits: Vec<u8>) -> Self {
        Self {
            n0: params.n0,
            m: params.m,
            seed: params.seed,
            bounds: params.bounds,
            oracle: params.oracle,
            strategy: *strategy,
            spin_labels: EncodingRule::standard().encode_all(&bits),
            committed_bits: bits,
            oracle_commitments: 0,
            challenge: vec![],
            tested: vec![],
            untested: vec![],
            declarations: vec![],
            final_bit: None,
            declaration_errors: [0, 0],
            leaked: vec![],
            reveal: None,
            reveal_check: None,
            suspended_opened: false,
            outcome: Outcome::Incomplete,
            violations: vec![],
            t_c: plan.schedule.t_c,
            schedule: plan.schedule.clone(),
            steps: plan.steps.clone(),
            notes: vec![],
        }
    }

    pub fn accepted(&self) -> bool {
        self.outcome == Outcome::Accepted
    }

    pub fn revealed_bit(&self) -> Option<u8> {
        self.accepted().then(|| self.reveal.as_ref().map(|r| r.bit)).flatten()
    }

    pub fn commitment_point(&self) -> Event {
        self.schedule.commitment_point
    }

    pub fn verdict_event(&self) -> Event {
        self.schedule.messages[self.steps.reveal].receive
    }

    /// Line-delimited log: one record per message, then one per protocol stage.
    pub fn to_jsonl(&self) -> String {
        let mut lines = Vec::new();
        let mut push = |v: serde_json::Value| lines.push(v.to_string());
        push(json!({
            "schema": TRANSCRIPT_SCHEMA, "kind": "session",
            "n0": self.n0, "m": self.m, "seed": self.seed, "strategy": self.strategy,
        }));
        for (i, m) in self.schedule.messages.iter().enumerate() {
            push(json!({
                "schema": TRANSCRIPT_SCHEMA, "kind": "message", "index": i, "tag": m.tag,
                "from": m.from.0, "to": m.to.0, "emit": m.emit, "receive": m.receive,
            }));
        }
        let stage = |name: &str, at: Event, body: serde_json::Value| {
            json!({ "schema": TRANSCRIPT_SCHEMA, "kind": "stage", "stage": name, "at": at, "data": body })
        };
        let msg = |i: usize| self.schedule.messages[i].receive;
        push(stage(
            "commit",
            msg(*self.steps.oracle_confirm.last().unwrap_or(&0)),
            json!({ "bits": self.committed_bits, "oracle_commitments": self.oracle_commitments, "t_c": self.t_c }),
        ));
        if !self.violations.is_empty() {
            push(stage("validate", self.schedule.messages.first().map_or(self.commitment_point(), |m| m.emit), json!({ "violations": self.violations })));
        }
        if self.oracle_commitments > 0 {
            push(stage("spins", msg(self.steps.spins), json!({ "labels": self.spin_labels })));
            push(stage("challenge", msg(self.steps.challenge), json!({ "subset": self.challenge })));
            let t_r = self.steps.oracle_revealed.iter().map(|&i| msg(i)).fold(msg(self.steps.challenge), |a, b| if b.t > a.t { b } else { a });
            push(stage("tested", t_r, json!({ "reveals": self.tested })));
        }
        if !self.declarations.is_empty() {
            push(stage(
                "declarations",
                self.commitment_point(),
                json!({ "untested": self.untested, "declarations": self.declarations }),
            ));
            push(stage(
                "suspension",
                self.steps.heartbeats.last().map_or(self.commitment_point(), |&i| msg(i)),
                json!({ "rounds": self.steps.heartbeats.len(), "leaked": self.leaked }),
            ));
        }
        if let Some(r) = &self.reveal {
            push(stage("reveal", self.verdict_event(), json!({ "claim": r, "check": self.reveal_check })));
        }
        push(json!({
            "schema": TRANSCRIPT_SCHEMA, "kind": "verdict", "outcome": self.outcome,
            "final_bit": self.final_bit, "notes": self.notes,
        }));
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}
