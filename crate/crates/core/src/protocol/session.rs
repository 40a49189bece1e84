use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::transcript::{Outcome, RevealClaim, SessionTranscript, TestedReveal};
use super::{plan_schedule, Declaration, EncodingRule, IdealBcccOracle, PlannedSchedule, ProtocolParams, Scenario};
use crate::adversary::{classical_flip_attack, entangled_commit, GuessRule, Strategy};
use crate::error::{Error, Result};
use crate::quantum::{measure, outcome_probabilities, spin_state, MeasurementBasis, SpinLabel, StateVector};
use crate::rng::RandomStream;
use crate::spacetime::{validate_schedule, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Commit,
    AwaitingSpins,
    Challenge,
    Testing,
    Declarations,
    Suspended,
    Reveal,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestVerdict {
    Accept,
    /// First tested particle whose outcome contradicted the revealed pair.
    Reject(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RevealVerdict {
    Accept,
    Reject { particle: usize },
    WrongLength { expected: usize, got: usize },
}

/// Result of checking a reveal, with the exact Born probability that the
/// claim would pass Bob's measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevealCheck {
    pub verdict: RevealVerdict,
    pub pass_probability: f64,
}

impl RevealCheck {
    pub fn accepted(&self) -> bool {
        self.verdict == RevealVerdict::Accept
    }
}

/// A run after the oracle commitments, owned by Bob's reference site.
#[derive(Debug, Clone)]
pub struct Session {
    pub params: ProtocolParams,
    pub plan: PlannedSchedule,
    pub oracle: IdealBcccOracle,
    pub bits: Vec<u8>,
    pub stage: Stage,
    pub t_c: f64,
}

impl Session {
    /// Encodes and "transmits" the spins, checking they leave after `t_c`.
    pub fn transmit_spins(&mut self, rule: &EncodingRule) -> Result<Vec<StateVector>> {
        if self.stage != Stage::AwaitingSpins {
            return Err(Error::Stage(format!("spins sent in stage {:?}", self.stage)));
        }
        let m = self.plan.message(self.plan.steps.spins);
        if m.emit.t <= self.t_c {
            return Err(Error::Causal(vec![Violation::BeforeCommitment {
                message: self.plan.steps.spins,
                tag: m.tag.clone(),
                emit_t: m.emit.t,
                t_c: self.t_c,
            }]));
        }
        self.stage = Stage::Challenge;
        send_spin_sequence(&self.bits, rule)
    }
}

/// Commits `bits` to the oracle and fixes `t_c`; the schedule must be causal.
pub fn commit_phase(
    bits: Vec<u8>,
    mut oracle: IdealBcccOracle,
    params: &ProtocolParams,
    plan: PlannedSchedule,
) -> Result<Session> {
    if bits.len() != 2 * params.n0 {
        return Err(Error::param("bits", format!("expected {} bits, got {}", 2 * params.n0, bits.len())));
    }
    if oracle.sessions() != bits.len() {
        return Err(Error::param("oracle", format!("oracle has {} sessions for {} bits", oracle.sessions(), bits.len())));
    }
    let violations = validate_schedule(&plan.schedule);
    if !violations.is_empty() {
        return Err(Error::Causal(violations));
    }
    for (i, &b) in bits.iter().enumerate() {
        oracle.commit(i, b)?;
    }
    let t_c = plan.schedule.t_c;
    Ok(Session { params: params.clone(), plan, oracle, bits, stage: Stage::AwaitingSpins, t_c })
}

/// Particle `i` is `spin_state(rule(bits[2i], bits[2i+1]))`.
pub fn send_spin_sequence(bits: &[u8], rule: &EncodingRule) -> Result<Vec<StateVector>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::param("bits", "an even number of bits is required"));
    }
    Ok(rule.encode_all(bits).into_iter().map(spin_state).collect())
}

/// Uniform subset of `n0 − m` particle indices, sorted ascending.
pub fn challenge(params: &ProtocolParams, rng: &mut RandomStream) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..params.n0).collect();
    let (picked, _) = idx.partial_shuffle(rng, params.tested());
    let mut subset = picked.to_vec();
    subset.sort_unstable();
    subset
}

/// Measures each tested particle in the basis its revealed pair encodes.
pub fn verify_tested(
    subset: &[usize],
    revealed: &BTreeMap<usize, (u8, u8)>,
    stored: &[StateVector],
    rule: &EncodingRule,
    rng: &mut RandomStream,
) -> Result<TestVerdict> {
    for &i in subset {
        let &(b0, b1) = revealed.get(&i).ok_or_else(|| Error::Stage(format!("no oracle reveal for tested particle {i}")))?;
        let state = stored.get(i).ok_or_else(|| Error::Stage(format!("particle {i} was never stored")))?;
        let label = rule.encode(b0, b1);
        let (outcome, _) = measure(state, label.basis(), 0, rng)?;
        if outcome != label.outcome() {
            return Ok(TestVerdict::Reject(i));
        }
    }
    Ok(TestVerdict::Accept)
}

/// Honest declarations committing to `a`: each particle's true basis is bound to `a`.
pub fn make_declarations(a: u8, untested: &[(usize, SpinLabel)]) -> Vec<Declaration> {
    untested.iter().map(|&(i, l)| Declaration::binding(i, a, l.basis())).collect()
}

/// Checks a claimed opening of `a_claimed` against the declarations.
///
/// `stored[j]` is the particle named by `declarations[j]`. Each particle is
/// measured in the basis declared for `a_claimed`; a claimed label outside
/// that basis fails without a measurement.
pub fn verify_reveal(
    a_claimed: u8,
    claimed: &[SpinLabel],
    declarations: &[Declaration],
    stored: &[StateVector],
    rng: &mut RandomStream,
) -> Result<RevealCheck> {
    if claimed.len() != declarations.len() {
        return Ok(RevealCheck {
            verdict: RevealVerdict::WrongLength { expected: declarations.len(), got: claimed.len() },
            pass_probability: 0.0,
        });
    }
    if stored.len() != declarations.len() {
        return Err(Error::Stage("stored particles do not match declarations".into()));
    }
    let mut pass_probability = 1.0;
    let mut verdict = RevealVerdict::Accept;
    for ((d, &label), state) in declarations.iter().zip(claimed).zip(stored) {
        let basis: MeasurementBasis = d.basis_for(a_claimed);
        if label.basis() != basis {
            pass_probability = 0.0;
            if verdict == RevealVerdict::Accept {
                verdict = RevealVerdict::Reject { particle: d.particle };
            }
            continue;
        }
        pass_probability *= outcome_probabilities(state, basis, 0)?[label.outcome() as usize];
        if verdict == RevealVerdict::Accept {
            let (outcome, _) = measure(state, basis, 0, rng)?;
            if outcome != label.outcome() {
                verdict = RevealVerdict::Reject { particle: d.particle };
            }
        }
    }
    Ok(RevealCheck { verdict, pass_probability })
}

/// Alice's declaration and opening plan for one strategy.
struct AlicePlan {
    bit: u8,
    declarations: Vec<Declaration>,
    claims: Vec<SpinLabel>,
    notes: Vec<String>,
}

fn alice_plan(strategy: &Strategy, untested: &[(usize, SpinLabel)], rng: &mut RandomStream) -> Result<AlicePlan> {
    let honest = |a: u8| AlicePlan {
        bit: a,
        declarations: make_declarations(a, untested),
        claims: untested.iter().map(|&(_, l)| l).collect(),
        notes: vec![],
    };
    Ok(match *strategy {
        Strategy::Honest => honest(rng.bit()),
        Strategy::EntangledCommit { alpha, beta } => {
            let joint = entangled_commit(alpha, beta)?;
            let (a, _) = measure(&joint, MeasurementBasis::Z, 1, rng)?;
            let mut plan = honest(a);
            plan.notes.push(format!("ancilla measured before declarations, outcome {a}"));
            plan
        }
        Strategy::ClassicalFlip { k, target, guess } => {
            let plan = classical_flip_attack(untested, k, target, guess, rng)?;
            AlicePlan { bit: target, declarations: plan.declarations, claims: plan.claims, notes: vec![] }
        }
        Strategy::PurificationAttack { target } => {
            let k = untested.len().div_ceil(2);
            let plan = classical_flip_attack(untested, k, target, GuessRule::Uniform, rng)?;
            AlicePlan {
                bit: target,
                declarations: plan.declarations,
                claims: plan.claims,
                notes: vec![format!(
                    "oracle inputs are classical: purification reduces to balanced declarations ({k} false for bit {target})"
                )],
            }
        }
    })
}

/// Runs commit → spins → challenge → tested verification → declarations →
/// suspension → reveal → verdict for one strategy.
///
/// Invalid parameters or strategies are errors; protocol failures (causal
/// violations, failed tests, rejected reveals) are recorded in the transcript.
pub fn run_session(
    strategy: &Strategy,
    params: &ProtocolParams,
    scenario: &Scenario,
    rng: &RandomStream,
) -> Result<SessionTranscript> {
    params.validate()?;
    strategy.validate(params)?;
    let rule = EncodingRule::standard();
    let plan = plan_schedule(params, scenario)?;
    let bits: Vec<u8> = match &params.chosen_bits {
        Some(b) => b.clone(),
        None => {
            let mut r = rng.split_named("bits");
            (0..2 * params.n0).map(|_| r.bit()).collect()
        }
    };
    let mut t = SessionTranscript::new(params, strategy, &plan, bits.clone());

    let oracle = IdealBcccOracle::new(2 * params.n0, params.oracle)?;
    let mut session = match commit_phase(bits, oracle, params, plan) {
        Ok(s) => s,
        Err(Error::Causal(v)) => {
            t.outcome = Outcome::Aborted { stage: Stage::Commit, reason: "causally invalid schedule".into() };
            t.violations = v;
            return Ok(t);
        }
        Err(e) => return Err(e),
    };
    t.t_c = session.t_c;
    t.oracle_commitments = session.oracle.committed_count();

    let stored = match session.transmit_spins(&rule) {
        Ok(s) => s,
        Err(Error::Causal(v)) => {
            t.outcome = Outcome::Aborted { stage: Stage::AwaitingSpins, reason: "spins emitted before t_c".into() };
            t.violations = v;
            return Ok(t);
        }
        Err(e) => return Err(e),
    };

    let subset = challenge(params, &mut rng.split_named("challenge"));
    let tested: std::collections::BTreeSet<usize> = subset.iter().copied().collect();
    t.challenge = subset.clone();
    t.untested = (0..params.n0).filter(|i| !tested.contains(i)).collect();
    session.stage = Stage::Testing;

    let mut oracle_rng = rng.split_named("oracle");
    let mut revealed = BTreeMap::new();
    for &i in &subset {
        let pair = (session.oracle.reveal(2 * i, &mut oracle_rng)?, session.oracle.reveal(2 * i + 1, &mut oracle_rng)?);
        revealed.insert(i, pair);
    }
    let mut test_rng = rng.split_named("testing");
    let verdict = verify_tested(&subset, &revealed, &stored, &rule, &mut test_rng)?;
    let checked = match verdict {
        TestVerdict::Reject(i) => subset.iter().position(|&j| j == i).map_or(subset.len(), |p| p + 1),
        TestVerdict::Accept => subset.len(),
    };
    t.tested = subset[..checked]
        .iter()
        .map(|&i| TestedReveal { particle: i, pair: revealed[&i], passed: verdict != TestVerdict::Reject(i) })
        .collect();
    if let TestVerdict::Reject(i) = verdict {
        t.outcome = Outcome::Rejected { stage: Stage::Testing, particle: Some(i) };
        return Ok(t);
    }

    session.stage = Stage::Declarations;
    let untested: Vec<(usize, SpinLabel)> = t.untested.iter().map(|&i| (i, t.spin_labels[i])).collect();
    let plan = alice_plan(strategy, &untested, &mut rng.split_named("alice"))?;
    t.declarations = plan.declarations.clone();
    t.final_bit = Some(plan.bit);
    t.notes.extend(plan.notes);
    for bit in 0..2u8 {
        t.declaration_errors[bit as usize] =
            untested.iter().zip(&plan.declarations).filter(|((_, l), d)| d.basis_for(bit) != l.basis()).count();
    }

    session.stage = Stage::Suspended;
    let mut leak_rng = rng.split_named("leak");
    for &i in &t.untested {
        for j in [2 * i, 2 * i + 1] {
            if let Some(b) = session.oracle.leak(j, &mut leak_rng) {
                t.leaked.push((j, b));
            }
        }
    }

    session.stage = Stage::Reveal;
    let untested_states: Vec<StateVector> = t.untested.iter().map(|&i| stored[i].clone()).collect();
    let check = verify_reveal(plan.bit, &plan.claims, &plan.declarations, &untested_states, &mut rng.split_named("reveal"))?;
    t.reveal = Some(RevealClaim { bit: plan.bit, labels: plan.claims });
    t.reveal_check = Some(check);
    t.outcome = match check.verdict {
        RevealVerdict::Accept => Outcome::Accepted,
        RevealVerdict::Reject { particle } => Outcome::Rejected { stage: Stage::Reveal, particle: Some(particle) },
        RevealVerdict::WrongLength { .. } => Outcome::Rejected { stage: Stage::Reveal, particle: None },
    };
    t.suspended_opened = t.untested.iter().any(|&i| session.oracle.is_opened(2 * i) || session.oracle.is_opened(2 * i + 1));
    session.stage = Stage::Done;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{OracleKnobs, Scenario};

    fn params(m: usize, n0: usize) -> ProtocolParams {
        ProtocolParams::new(m, n0, 9).unwrap()
    }

    #[test]
    fn commit_phase_stores_bits() {
        let p = ProtocolParams::unchecked_ratio(1, 2, 0).unwrap();
        let plan = plan_schedule(&p, &Scenario::default_line()).unwrap();
        let s = commit_phase(vec![0, 0, 1, 1], IdealBcccOracle::new(4, OracleKnobs::IDEAL).unwrap(), &p, plan).unwrap();
        assert_eq!(s.oracle.committed_count(), 4);
        assert_eq!(s.stage, Stage::AwaitingSpins);
    }

    #[test]
    fn commit_phase_rejects_wrong_length() {
        let p = ProtocolParams::unchecked_ratio(1, 2, 0).unwrap();
        let plan = plan_schedule(&p, &Scenario::default_line()).unwrap();
        let r = commit_phase(vec![0, 1, 1], IdealBcccOracle::new(4, OracleKnobs::IDEAL).unwrap(), &p, plan);
        assert!(matches!(r, Err(Error::Param { field: "bits", .. })));
    }

    #[test]
    fn spin_sequence_follows_table() {
        let rule = EncodingRule::standard();
        let up = send_spin_sequence(&[0, 0], &rule).unwrap();
        assert!(up[0].overlap(&spin_state(SpinLabel::Up)) > 1.0 - 1e-12);
        let right = send_spin_sequence(&[1, 1], &rule).unwrap();
        assert!(right[0].overlap(&spin_state(SpinLabel::Right)) > 1.0 - 1e-12);
        let two = send_spin_sequence(&[0, 1, 1, 0], &rule).unwrap();
        assert!(two[0].overlap(&spin_state(SpinLabel::Down)) > 1.0 - 1e-12);
        assert!(two[1].overlap(&spin_state(SpinLabel::Left)) > 1.0 - 1e-12);
        assert!(send_spin_sequence(&[0], &rule).is_err());
    }

    #[test]
    fn challenge_sizes() {
        let mut rng = RandomStream::new(4);
        let s = challenge(&ProtocolParams::unchecked_ratio(2, 3, 0).unwrap(), &mut rng);
        assert_eq!(s.len(), 1);
        assert!(challenge(&ProtocolParams::unchecked_ratio(3, 3, 0).unwrap(), &mut rng).is_empty());
        let s = challenge(&params(16, 64), &mut rng);
        assert_eq!(s.len(), 48);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tested_verification_paths() {
        let rule = EncodingRule::standard();
        let stored = send_spin_sequence(&[0, 0, 1, 1], &rule).unwrap();
        let mut rng = RandomStream::new(0);
        let mut revealed = BTreeMap::from([(0, (0, 0)), (1, (1, 1))]);
        assert_eq!(verify_tested(&[0, 1], &revealed, &stored, &rule, &mut rng).unwrap(), TestVerdict::Accept);
        assert_eq!(verify_tested(&[], &revealed, &stored, &rule, &mut rng).unwrap(), TestVerdict::Accept);
        revealed.insert(0, (0, 1));
        assert_eq!(verify_tested(&[0, 1], &revealed, &stored, &rule, &mut rng).unwrap(), TestVerdict::Reject(0));
        revealed.remove(&1);
        assert!(verify_tested(&[1], &revealed, &stored, &rule, &mut rng).is_err());
    }

    #[test]
    fn declaration_examples() {
        let d = make_declarations(0, &[(3, SpinLabel::Up)]);
        assert_eq!((d[0].particle, d[0].basis_for(0), d[0].basis_for(1)), (3, MeasurementBasis::Z, MeasurementBasis::X));
        let d = make_declarations(1, &[(5, SpinLabel::Left)]);
        assert_eq!((d[0].basis_for(1), d[0].basis_for(0)), (MeasurementBasis::X, MeasurementBasis::Z));
    }

    #[test]
    fn reveal_checks() {
        let labels = [SpinLabel::Up, SpinLabel::Right, SpinLabel::Left];
        let untested: Vec<(usize, SpinLabel)> = labels.iter().copied().enumerate().collect();
        let decl = make_declarations(1, &untested);
        let stored: Vec<StateVector> = labels.iter().map(|&l| spin_state(l)).collect();
        let mut rng = RandomStream::new(1);

        let ok = verify_reveal(1, &labels, &decl, &stored, &mut rng).unwrap();
        assert!(ok.accepted());
        assert!((ok.pass_probability - 1.0).abs() < 1e-12);

        let short = verify_reveal(1, &labels[..2], &decl, &stored, &mut rng).unwrap();
        assert_eq!(short.verdict, RevealVerdict::WrongLength { expected: 3, got: 2 });

        // Opening the other bit: every declared basis is conjugate to the truth.
        let other: Vec<SpinLabel> = labels.iter().map(|l| SpinLabel::from_basis_outcome(l.basis().conjugate(), 0)).collect();
        let c = verify_reveal(0, &other, &decl, &stored, &mut rng).unwrap();
        assert!((c.pass_probability - 0.125).abs() < 1e-12);

        // A label outside the declared basis fails outright.
        let bad = verify_reveal(0, &labels, &decl, &stored, &mut rng).unwrap();
        assert_eq!(bad.verdict, RevealVerdict::Reject { particle: 0 });
        assert_eq!(bad.pass_probability, 0.0);
    }

    #[test]
    fn honest_session_accepts() {
        let p = params(4, 16);
        let t = run_session(&Strategy::Honest, &p, &Scenario::default_line(), &RandomStream::new(3)).unwrap();
        assert_eq!(t.outcome, Outcome::Accepted);
        assert_eq!(t.reveal.as_ref().unwrap().bit, t.final_bit.unwrap());
        assert_eq!(t.challenge.len(), 12);
        assert_eq!(t.declarations.len(), 4);
        assert!(!t.suspended_opened);
        assert_eq!(t.declaration_errors[t.final_bit.unwrap() as usize], 0);
    }

    #[test]
    fn causal_fault_aborts_at_commit() {
        let p = params(1, 4);
        let mut sc = Scenario::default_line();
        sc.fault = Some(crate::protocol::InjectedFault { tag: "declarations".into(), speed_factor: 0.25 });
        let t = run_session(&Strategy::Honest, &p, &sc, &RandomStream::new(0)).unwrap();
        assert!(matches!(t.outcome, Outcome::Aborted { stage: Stage::Commit, .. }));
        assert_eq!(t.violations.len(), 1);
        assert!(t.reveal_check.is_none());
    }
}
