use serde::{Deserialize, Serialize};

use super::stats::Estimate;
use crate::adversary::{GuessRule, Strategy};
use crate::error::{Error, Result};
use crate::par::fold_trials;
use crate::protocol::{run_session, ProtocolParams, Scenario};
use crate::rng::RandomStream;

pub const MIN_TRIALS: u64 = 1_000;

/// Pass probability of a reveal with `k` false declarations under the
/// uniform guess rule.
pub fn detection_probability_exact(k: usize) -> f64 {
    match i32::try_from(k) {
        Ok(k) => 0.5f64.powi(k),
        Err(_) => 0.0,
    }
}

/// Accepted-session frequency for `strategy` on the default line layout.
pub fn detection_probability_mc(strategy: &Strategy, params: &ProtocolParams, trials: u64, seed: u64) -> Result<Estimate> {
    detection_probability_mc_in(strategy, params, &Scenario::default_line(), trials, seed)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    accepted: u64,
    nondeterministic: u64,
}

pub fn detection_probability_mc_in(
    strategy: &Strategy,
    params: &ProtocolParams,
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials < MIN_TRIALS {
        return Err(Error::param("trials", format!("{trials} < {MIN_TRIALS}")));
    }
    params.validate()?;
    strategy.validate(params)?;
    let stream = RandomStream::new(seed);
    let ideal = params.oracle.is_ideal();
    let tally = fold_trials(
        trials,
        &stream,
        Ok(Tally::default()),
        |r| {
            let t = run_session(strategy, params, scenario, r)?;
            let deterministic =
                ideal && t.reveal_check.is_some_and(|c| c.pass_probability < 1e-12 || c.pass_probability > 1.0 - 1e-12);
            Ok(Tally { accepted: u64::from(t.accepted()), nondeterministic: u64::from(!deterministic) })
        },
        |a: Result<Tally>, b: Result<Tally>| {
            let (a, b) = (a?, b?);
            Ok(Tally { accepted: a.accepted + b.accepted, nondeterministic: a.nondeterministic + b.nondeterministic })
        },
    )?;
    Ok(if tally.nondeterministic == 0 {
        Estimate::deterministic(tally.accepted, trials)
    } else {
        Estimate::from_counts(tally.accepted, trials)
    })
}

/// One row of a pass-rate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub k: usize,
    pub exact: f64,
    pub monte_carlo: Option<Estimate>,
}

/// ClassicalFlip pass rates for each `k` in `ks`, trial batch `i` seeded by `seed + k`.
pub fn detection_table(params: &ProtocolParams, ks: &[usize], trials: Option<u64>, seed: u64) -> Result<Vec<DetectionRow>> {
    ks.iter()
        .map(|&k| {
            let monte_carlo = match trials {
                Some(n) => {
                    let s = Strategy::ClassicalFlip { k, target: 0, guess: GuessRule::Uniform };
                    Some(detection_probability_mc(&s, params, n, seed.wrapping_add(k as u64))?)
                }
                None => None,
            };
            Ok(DetectionRow { k, exact: detection_probability_exact(k), monte_carlo })
        })
        .collect()
}
