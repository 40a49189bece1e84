//! Sensitivity of the composed protocol to an imperfect oracle.

use serde::{Deserialize, Serialize};

use super::{GuessRule, Strategy};
use crate::analysis::{bob_information, detection_probability_exact, Estimate, InformationMode};
use crate::error::{Error, Result};
use crate::par::fold_trials;
use crate::protocol::{run_session, Outcome, OracleKnobs, ProtocolParams, Scenario, Stage};
use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationReport {
    pub knobs: OracleKnobs,
    pub trials: u64,
    /// Honest sessions accepted.
    pub honest_accept: Estimate,
    /// `1 − honest_accept`.
    pub degradation: f64,
    /// Honest sessions lost at tested verification.
    pub honest_test_rejections: u64,
    pub flip_k: usize,
    pub flip_pass: Estimate,
    /// Pass rate of the same attack with an ideal oracle.
    pub flip_pass_ideal: f64,
    /// Bob's pre-reveal distinguishing advantage on the bit.
    pub bob_tv: Estimate,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Default)]
struct Tally {
    accepted: u64,
    test_rejections: u64,
}

fn tally(strategy: &Strategy, params: &ProtocolParams, scenario: &Scenario, trials: u64, seed: u64) -> Result<Tally> {
    fold_trials(
        trials,
        &RandomStream::new(seed),
        Ok(Tally::default()),
        |r| {
            let t = run_session(strategy, params, scenario, r)?;
            let test = matches!(t.outcome, Outcome::Rejected { stage: Stage::Testing, .. });
            Ok(Tally { accepted: u64::from(t.accepted()), test_rejections: u64::from(test) })
        },
        |a: Result<Tally>, b: Result<Tally>| {
            let (a, b) = (a?, b?);
            Ok(Tally { accepted: a.accepted + b.accepted, test_rejections: a.test_rejections + b.test_rejections })
        },
    )
}

/// Runs honest and balanced-flip sessions with the oracle knobs in `params`
/// and reports how far acceptance, attack success and hiding move from the
/// ideal-oracle values.
pub fn flip_attack_on_reduction_with_weak_oracle(
    params: &ProtocolParams,
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Result<DegradationReport> {
    if trials == 0 {
        return Err(Error::param("trials", "at least one trial is required"));
    }
    params.validate()?;
    let knobs = params.oracle;
    let honest = tally(&Strategy::Honest, params, scenario, trials, seed)?;
    let honest_accept = if knobs.is_ideal() {
        // Every honest step is certain under an ideal oracle.
        Estimate::deterministic(honest.accepted, trials)
    } else {
        Estimate::from_counts(honest.accepted, trials)
    };

    let flip_k = params.m.div_ceil(2);
    let flip = Strategy::ClassicalFlip { k: flip_k, target: 0, guess: GuessRule::Uniform };
    let flipped = tally(&flip, params, scenario, trials, seed.wrapping_add(1))?;

    let bob_tv = bob_information(params, InformationMode::Auto, seed.wrapping_add(2))?.tv_distance;
    let mut notes = vec![];
    if knobs.is_ideal() {
        notes.push("ideal oracle: no degradation expected".into());
    }
    if knobs.flip_probability > 0.0 {
        notes.push(format!(
            "per tested particle an oracle flip of either bit breaks the test with probability ≥ 1/2; \
             {} of {trials} honest sessions failed testing",
            honest.test_rejections
        ));
    }
    if knobs.leak_probability > 0.0 {
        notes.push("leaked basis bits let Bob read the bit from the declarations".into());
    }
    Ok(DegradationReport {
        knobs,
        trials,
        degradation: 1.0 - honest_accept.value,
        honest_accept,
        honest_test_rejections: honest.test_rejections,
        flip_k,
        flip_pass: Estimate::from_counts(flipped.accepted, trials),
        flip_pass_ideal: detection_probability_exact(flip_k),
        bob_tv,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_oracle_has_no_degradation() {
        let p = ProtocolParams::new(1, 4, 0).unwrap();
        let r = flip_attack_on_reduction_with_weak_oracle(&p, &Scenario::default_line(), 500, 3).unwrap();
        assert_eq!(r.degradation, 0.0);
        assert_eq!(r.bob_tv, Estimate::exact(0.0));
    }

    #[test]
    fn flips_reduce_honest_acceptance() {
        let p = ProtocolParams::new(4, 16, 0)
            .unwrap()
            .with_oracle(OracleKnobs { flip_probability: 0.1, leak_probability: 0.0 })
            .unwrap();
        let r = flip_attack_on_reduction_with_weak_oracle(&p, &Scenario::default_line(), 2000, 3).unwrap();
        assert!(r.degradation > 0.5);
        assert!(r.honest_test_rejections > 0);
    }
}
