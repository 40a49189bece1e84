//! Soundness of the cut-and-choose test against particles sent in the wrong basis.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::stats::Estimate;
use crate::error::{Error, Result};
use crate::par::fold_trials;
use crate::protocol::{challenge, verify_tested, EncodingRule, ProtocolParams, TestVerdict};
use crate::quantum::{spin_state, SpinLabel};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoundnessRow {
    /// Particles Alice sends in the basis conjugate to their label.
    pub bad: usize,
    pub exact_pass: f64,
    /// Bob passes the test although some untested particle is bad.
    pub exact_undetected: f64,
    pub sampled_pass: Estimate,
    pub sampled_undetected: Estimate,
}

/// `ln C(n, k)`.
fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Exact `(P(pass), P(pass ∧ some untested particle bad))`: `j` of the
/// `bad` particles land in the tested set with hypergeometric weight and
/// each survives Bob's measurement with probability 1/2.
pub fn sampling_soundness_exact(n0: usize, tested: usize, bad: usize) -> Result<(f64, f64)> {
    if tested > n0 || bad > n0 {
        return Err(Error::param("bad", format!("need tested ≤ n0 and bad ≤ n0 (n0 = {n0})")));
    }
    let total = ln_choose(n0, tested);
    let (mut pass, mut undetected) = (0.0, 0.0);
    for j in 0..=bad.min(tested) {
        if tested - j > n0 - bad {
            continue;
        }
        let w = (ln_choose(bad, j) + ln_choose(n0 - bad, tested - j) - total).exp() * 0.5f64.powi(j as i32);
        pass += w;
        if bad > j {
            undetected += w;
        }
    }
    Ok((pass.min(1.0), undetected.min(1.0)))
}

/// Runs Bob's actual challenge and tested-particle measurements on a spin
/// sequence in which `bad` uniformly placed particles are conjugate-basis states.
pub fn sampling_soundness_mc(params: &ProtocolParams, bad: usize, trials: u64, seed: u64) -> Result<SoundnessRow> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::param("trials", "at least one trial is required"));
    }
    let (exact_pass, exact_undetected) = sampling_soundness_exact(params.n0, params.tested(), bad)?;
    let rule = EncodingRule::standard();
    let counts = fold_trials(
        trials,
        &RandomStream::new(seed),
        Ok([0u64; 2]),
        |r| {
            let mut rng = r.clone();
            let bits: Vec<u8> = (0..2 * params.n0).map(|_| rng.bit()).collect();
            let labels = rule.encode_all(&bits);
            let mut order: Vec<usize> = (0..params.n0).collect();
            let (picked, _) = order.partial_shuffle(&mut rng, bad);
            let bad_set: Vec<usize> = picked.to_vec();
            let stored = (0..params.n0)
                .map(|i| {
                    let l = labels[i];
                    let sent = if bad_set.contains(&i) { SpinLabel::from_basis_outcome(l.basis().conjugate(), rng.bit()) } else { l };
                    spin_state(sent)
                })
                .collect::<Vec<_>>();
            let subset = challenge(params, &mut rng);
            let revealed: BTreeMap<usize, (u8, u8)> = subset.iter().map(|&i| (i, (bits[2 * i], bits[2 * i + 1]))).collect();
            let passed = verify_tested(&subset, &revealed, &stored, &rule, &mut rng)? == TestVerdict::Accept;
            let hidden_bad = bad_set.iter().any(|i| subset.binary_search(i).is_err());
            Ok([u64::from(passed), u64::from(passed && hidden_bad)])
        },
        |a: Result<[u64; 2]>, b: Result<[u64; 2]>| {
            let (a, b) = (a?, b?);
            Ok([a[0] + b[0], a[1] + b[1]])
        },
    )?;
    Ok(SoundnessRow {
        bad,
        exact_pass,
        exact_undetected,
        sampled_pass: Estimate::from_counts(counts[0], trials),
        sampled_undetected: Estimate::from_counts(counts[1], trials),
    })
}

/// One row per entry of `bads`, batch `i` seeded by `seed + bad`.
pub fn sampling_soundness_curve(params: &ProtocolParams, bads: &[usize], trials: u64, seed: u64) -> Result<Vec<SoundnessRow>> {
    if let Some(&b) = bads.iter().find(|&&b| b > params.n0) {
        return Err(Error::param("bad", format!("{b} exceeds n0 = {}", params.n0)));
    }
    bads.iter().map(|&b| sampling_soundness_mc(params, b, trials, seed.wrapping_add(b as u64))).collect()
}
