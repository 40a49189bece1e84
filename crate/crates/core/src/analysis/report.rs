//! Per-point binding evaluation and the security report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::cheat::{cheat_sum_after_declarations, CheatSum, StrategyClass, CLASS_NOTE};
use super::detection::DetectionRow;
use super::information::BobInformation;
use super::soundness::SoundnessRow;
use super::stats::{Estimate, Provenance};
use super::sweep::TradeoffRow;
use crate::error::{Error, Result};
use crate::protocol::{OracleKnobs, SecurityBounds, SessionTranscript};
use crate::spacetime::{in_past_cone, Event, Party};

pub const REPORT_SCHEMA: &str = "qcommit.report/1";

/// An event at which `p(Q) = p0(Q) + p1(Q)` is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationPoint {
    pub label: String,
    pub event: Event,
}

impl EvaluationPoint {
    pub fn new(label: impl Into<String>, event: Event) -> Self {
        Self { label: label.into(), event }
    }
}

/// Points checked by default: just after `P`, every later message arrival at
/// Bob's reference site, and the verdict.
pub fn default_points(t: &SessionTranscript) -> Vec<EvaluationPoint> {
    let p = t.commitment_point();
    let mut out = vec![EvaluationPoint::new("after-commitment", Event { t: p.t + 1e-6, x: p.x })];
    for &i in &t.steps.heartbeats {
        let m = &t.schedule.messages[i];
        out.push(EvaluationPoint::new(m.tag.clone(), m.receive));
    }
    out.push(EvaluationPoint::new("reveal", t.verdict_event()));
    out
}

/// `1 + 2^{1 − M/2}`.
pub fn binding_bound(m: usize) -> f64 {
    1.0 + 2f64.powf(1.0 - m as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEvaluation {
    pub label: String,
    pub event: Event,
    pub p0: Estimate,
    pub p1: Estimate,
    pub p_sum: f64,
    pub bound: f64,
    pub within_bound: bool,
    /// Alice has no action left outside the past cone of the point.
    pub vacuous: bool,
    /// Alice's scheduled transmissions not yet in the past cone of the point.
    pub free_alice_actions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledCheatSum {
    pub label: String,
    pub cheat: CheatSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub label: String,
    pub strategy_class: StrategyClass,
    pub bounds: SecurityBounds,
    pub oracle: OracleKnobs,
    pub points: Vec<PointEvaluation>,
    pub bob_information: Option<BobInformation>,
    pub detection: Vec<DetectionRow>,
    pub cheat_sums: Vec<LabelledCheatSum>,
    pub tradeoff: Vec<TradeoffRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub soundness: Vec<SoundnessRow>,
    pub notes: Vec<String>,
}

impl SecurityReport {
    pub fn new(label: impl Into<String>, strategy_class: StrategyClass, bounds: SecurityBounds, oracle: OracleKnobs) -> Self {
        Self {
            label: label.into(),
            strategy_class,
            bounds,
            oracle,
            points: vec![],
            bob_information: None,
            detection: vec![],
            cheat_sums: vec![],
            tradeoff: vec![],
            soundness: vec![],
            notes: vec![
                CLASS_NOTE.into(),
                "oracle accepts classical bits only; entangling spins with suspended commitments is outside the model".into(),
                "ε is carried for reference; ε′ is modelled by the oracle flip probability, ε″ by its leak probability".into(),
            ],
        }
    }

    pub fn all_within_bound(&self) -> bool {
        self.points.iter().all(|p| p.within_bound)
    }

    /// Probabilities in `[0, 1]`, TV in `[0, 1]`, an interval on every sampled number.
    pub fn check_invariants(&self) -> Result<()> {
        let mut estimates: Vec<(&str, &Estimate)> = vec![];
        for p in &self.points {
            estimates.push(("p0", &p.p0));
            estimates.push(("p1", &p.p1));
        }
        for c in &self.cheat_sums {
            estimates.push(("p0", &c.cheat.p0));
            estimates.push(("p1", &c.cheat.p1));
        }
        for d in &self.detection {
            if let Some(e) = &d.monte_carlo {
                estimates.push(("detection", e));
            }
        }
        if let Some(b) = &self.bob_information {
            estimates.push(("tv_distance", &b.tv_distance));
            estimates.push(("mutual_information_bits", &b.mutual_information_bits));
        }
        for r in &self.soundness {
            estimates.push(("sampled_pass", &r.sampled_pass));
            estimates.push(("sampled_undetected", &r.sampled_undetected));
        }
        for (name, e) in estimates {
            if !(0.0..=1.0).contains(&e.value) {
                return Err(Error::Stage(format!("{name} = {} outside [0, 1]", e.value)));
            }
            if let Provenance::MonteCarlo { ci_low, ci_high, trials, .. } = e.provenance {
                if trials == 0 || ci_low.partial_cmp(&ci_high).is_none_or(|o| o.is_gt()) {
                    return Err(Error::Stage(format!("{name} lacks a confidence interval")));
                }
            }
        }
        Ok(())
    }

    /// Line-delimited records, each carrying the schema tag.
    pub fn to_jsonl(&self) -> String {
        let mut lines = vec![json!({
            "schema": REPORT_SCHEMA, "kind": "report", "label": self.label,
            "strategy_class": self.strategy_class, "class_description": self.strategy_class.description(),
            "bounds": self.bounds, "oracle": self.oracle,
        })];
        for p in &self.points {
            lines.push(json!({ "schema": REPORT_SCHEMA, "kind": "point", "point": p }));
        }
        if let Some(b) = &self.bob_information {
            lines.push(json!({ "schema": REPORT_SCHEMA, "kind": "bob-information", "bob_information": b }));
        }
        for d in &self.detection {
            lines.push(json!({ "schema": REPORT_SCHEMA, "kind": "detection", "row": d }));
        }
        for c in &self.cheat_sums {
            lines.push(json!({ "schema": REPORT_SCHEMA, "kind": "cheat-sum", "label": c.label, "cheat": c.cheat }));
        }
        for r in &self.tradeoff {
            lines.push(json!({ "schema": REPORT_SCHEMA, "kind": "tradeoff", "row": r }));
        }
        for r in &self.soundness {
            lines.push(json!({ "schema": REPORT_SCHEMA, "kind": "soundness", "row": r }));
        }
        lines.push(json!({ "schema": REPORT_SCHEMA, "kind": "notes", "notes": self.notes }));
        let mut out = lines.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n");
        out.push('\n');
        out
    }

    /// Human-readable rendering; never parsed back.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "report: {}", self.label);
        let _ = writeln!(s, "strategy class: {} ({})", kebab(&self.strategy_class), self.strategy_class.description());
        let _ = writeln!(
            s,
            "bounds: ε = {}, ε′ = {}, ε″ = {}; oracle flip = {}, leak = {}",
            self.bounds.epsilon,
            self.bounds.epsilon_prime,
            self.bounds.epsilon_double_prime,
            self.oracle.flip_probability,
            self.oracle.leak_probability
        );
        if !self.points.is_empty() {
            let _ = writeln!(s, "\n{:<22} {:>10} {:>12} {:>12} {:>12} {:>10}  verdict", "point", "t", "p0", "p1", "p_sum", "bound");
            for p in &self.points {
                let _ = writeln!(
                    s,
                    "{:<22} {:>10.4} {:>12} {:>12} {:>12.9} {:>10.6}  {}{}",
                    p.label,
                    p.event.t,
                    fmt_estimate(&p.p0),
                    fmt_estimate(&p.p1),
                    p.p_sum,
                    p.bound,
                    if p.within_bound { "ok" } else { "EXCEEDED" },
                    if p.vacuous { " (vacuous: no free Alice actions)" } else { "" }
                );
            }
        }
        if let Some(b) = &self.bob_information {
            let _ = writeln!(
                s,
                "\nBob's information: TV = {}, MI = {} bits",
                fmt_estimate(&b.tv_distance),
                fmt_estimate(&b.mutual_information_bits)
            );
        }
        if !self.detection.is_empty() {
            let _ = writeln!(s, "\n{:>3} {:>14} {:>14} {:>26}", "k", "exact 2^-k", "sampled", "99% interval");
            for d in &self.detection {
                let (est, ci) = match &d.monte_carlo {
                    Some(e) => (format!("{:.6}", e.value), format!("[{:.6}, {:.6}]", e.ci().0, e.ci().1)),
                    None => ("-".into(), "-".into()),
                };
                let _ = writeln!(s, "{:>3} {:>14.8} {:>14} {:>26}", d.k, d.exact, est, ci);
            }
        }
        for c in &self.cheat_sums {
            let _ = writeln!(
                s,
                "\ncheat sum [{}] ({}): p0 = {}, p1 = {}, p_sum = {:.9}",
                c.label,
                kebab(&c.cheat.class),
                fmt_estimate(&c.cheat.p0),
                fmt_estimate(&c.cheat.p1),
                c.cheat.p_sum
            );
        }
        if !self.tradeoff.is_empty() {
            let _ = writeln!(s, "\n{:>8} {:>10} {:>10} {:>12} {:>12}", "θ", "F", "ε_bob", "p_sum", "attack");
            for r in &self.tradeoff {
                let _ = writeln!(s, "{:>8.4} {:>10.6} {:>10.6} {:>12.9} {:>12.9}", r.theta, r.fidelity, r.epsilon_bob, r.p_sum, r.p_sum_attack);
            }
        }
        if !self.soundness.is_empty() {
            let _ = writeln!(s, "
cut-and-choose against conjugate-basis particles (pass / passed with a bad particle untested):");
            let _ = writeln!(s, "{:>5} {:>12} {:>26} {:>12} {:>26}", "bad", "exact pass", "sampled", "exact miss", "sampled");
            for r in &self.soundness {
                let _ = writeln!(
                    s,
                    "{:>5} {:>12.8} {:>26} {:>12.8} {:>26}",
                    r.bad,
                    r.exact_pass,
                    fmt_estimate(&r.sampled_pass),
                    r.exact_undetected,
                    fmt_estimate(&r.sampled_undetected)
                );
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "\nnotes:");
            for n in &self.notes {
                let _ = writeln!(s, "  - {n}");
            }
        }
        s
    }
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

fn fmt_estimate(e: &Estimate) -> String {
    match e.provenance {
        Provenance::Exact => format!("{:.9}", e.value),
        Provenance::MonteCarlo { ci_low, ci_high, .. } => format!("{:.6} [{:.6}, {:.6}]", e.value, ci_low, ci_high),
    }
}

/// Evaluates `p(Q)` at each point from what Alice can still do outside the
/// past cone of `Q`.
pub fn evaluate_relativistic(t: &SessionTranscript, points: &[EvaluationPoint]) -> Result<SecurityReport> {
    if !t.violations.is_empty() {
        return Err(Error::Causal(t.violations.clone()));
    }
    let p = t.commitment_point();
    let class = StrategyClass::of(&t.strategy);
    let mut report = SecurityReport::new(format!("relativistic evaluation, {} run", t.strategy.name()), class, t.bounds, t.oracle);
    report.notes.push("p(Q) is evaluated at the listed message events only".into());
    let alice_emits: Vec<Event> = t
        .schedule
        .messages
        .iter()
        .filter(|m| t.schedule.layout.site(m.from).is_some_and(|s| s.party == Party::Alice))
        .map(|m| m.emit)
        .collect();
    let bound = binding_bound(t.m);

    for q in points {
        if !in_past_cone(&p, &q.event) {
            return Err(Error::param("points", format!("`{}` at t = {} is not after the commitment point", q.label, q.event.t)));
        }
        let free = alice_emits.iter().filter(|e| !in_past_cone(e, &q.event)).count();
        let (p0, p1, vacuous) = if free == 0 {
            let (mut p0, mut p1) = (0.0, 0.0);
            if let (Some(r), Some(c)) = (&t.reveal, &t.reveal_check) {
                if r.bit == 0 {
                    p0 = c.pass_probability;
                } else {
                    p1 = c.pass_probability;
                }
            }
            (Estimate::exact(p0), Estimate::exact(p1), true)
        } else {
            let c = cheat_sum_after_declarations(t, class)?;
            (c.p0, c.p1, false)
        };
        let p_sum = p0.value + p1.value;
        report.points.push(PointEvaluation {
            label: q.label.clone(),
            event: q.event,
            p0,
            p1,
            p_sum,
            bound,
            within_bound: p_sum <= bound,
            vacuous,
            free_alice_actions: free,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{GuessRule, Strategy};
    use crate::protocol::{run_session, ProtocolParams, Scenario};
    use crate::rng::RandomStream;

    fn run(s: Strategy) -> SessionTranscript {
        let p = ProtocolParams::new(16, 64, 1).unwrap();
        run_session(&s, &p, &Scenario::default_line(), &RandomStream::new(1)).unwrap()
    }

    #[test]
    fn honest_reveal_point_is_one() {
        let t = run(Strategy::Honest);
        let r = evaluate_relativistic(&t, &[EvaluationPoint::new("reveal", t.verdict_event())]).unwrap();
        assert_eq!(r.points[0].p_sum, 1.0);
        assert!(r.points[0].vacuous);
        r.check_invariants().unwrap();
    }

    #[test]
    fn flip_after_commitment_within_bound() {
        let t = run(Strategy::ClassicalFlip { k: 8, target: 1, guess: GuessRule::Uniform });
        let r = evaluate_relativistic(&t, &default_points(&t)).unwrap();
        let first = &r.points[0];
        assert!(!first.vacuous && first.free_alice_actions > 0);
        assert_eq!(first.p_sum, 2.0 * 2f64.powi(-8));
        assert!(r.all_within_bound());
    }

    #[test]
    fn point_before_commitment_rejected() {
        let t = run(Strategy::Honest);
        let early = Event { t: t.commitment_point().t - 1.0, x: t.commitment_point().x };
        assert!(evaluate_relativistic(&t, &[EvaluationPoint::new("early", early)]).is_err());
    }

    #[test]
    fn jsonl_carries_schema() {
        let t = run(Strategy::Honest);
        let r = evaluate_relativistic(&t, &default_points(&t)).unwrap();
        for line in r.to_jsonl().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["schema"], REPORT_SCHEMA);
        }
        assert!(r.summary().contains("reveal"));
    }
}
