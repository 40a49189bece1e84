//! `p0 + p1` for a fixed strategy class.

use serde::{Deserialize, Serialize};

use super::detection::detection_probability_exact;
use super::stats::Estimate;
use crate::adversary::{purification_attack, reveal_attempt, GuessRule, Strategy, ToyBcProtocol};
use crate::error::{Error, Result};
use crate::par::fold_trials;
use crate::protocol::{run_session, ProtocolParams, Scenario, SessionTranscript};
use crate::rng::RandomStream;

/// Strategies over which a cheat sum is maximised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyClass {
    /// Alice opens the bit her declarations bind, with the true labels.
    Honest,
    /// After the declarations Alice may attempt either bit, guessing on mismatched particles.
    ClassicalFlip,
    /// Purify the commitment and steer with a purifier unitary.
    Purification,
}

impl StrategyClass {
    /// Class a reduction strategy belongs to once its declarations are sent.
    pub fn of(strategy: &Strategy) -> Self {
        match strategy {
            Strategy::Honest | Strategy::EntangledCommit { .. } => Self::Honest,
            Strategy::ClassicalFlip { .. } | Strategy::PurificationAttack { .. } => Self::ClassicalFlip,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Honest => "honest opening of the declared bit",
            Self::ClassicalFlip => "either bit opened against fixed declarations, uniform guesses where the basis is wrong",
            Self::Purification => "purified commitment steered by a purifier unitary (closed form and numerical search)",
        }
    }
}

/// Maximum over the implemented class; not the supremum over every strategy.
pub const CLASS_NOTE: &str =
    "p0, p1 are maxima over the implemented strategy class only, not over all strategies; worst case reported";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheatSum {
    pub class: StrategyClass,
    pub p0: Estimate,
    pub p1: Estimate,
    pub p_sum: f64,
    pub notes: Vec<String>,
}

impl CheatSum {
    fn new(class: StrategyClass, p0: Estimate, p1: Estimate, mut notes: Vec<String>) -> Self {
        notes.insert(0, CLASS_NOTE.into());
        Self { class, p0, p1, p_sum: p0.value + p1.value, notes }
    }

    /// Upper end of `p0 + p1` from the two intervals.
    pub fn p_sum_upper(&self) -> f64 {
        self.p0.ci().1 + self.p1.ci().1
    }

    pub fn p_sum_lower(&self) -> f64 {
        self.p0.ci().0 + self.p1.ci().0
    }
}

/// Best single attack on a finite protocol: the purification attack.
pub fn cheat_sum_toy(protocol: &ToyBcProtocol) -> Result<CheatSum> {
    let out = purification_attack(protocol)?;
    Ok(CheatSum::new(
        StrategyClass::Purification,
        Estimate::exact(out.p0),
        Estimate::exact(out.p1),
        vec![
            format!("F = {:.12}, closed form 1 + √F = {:.12}", out.fidelity, 1.0 + out.fidelity.sqrt()),
            format!("numerical unitary search p_sum = {:.12}", out.numerical_p_sum),
        ],
    ))
}

/// Exact cheat sum once the declarations in `t` are fixed.
///
/// A declaration that misstates the true basis for bit `c` costs a factor
/// 1/2 when opening `c`, so `p_c = 2^{-k_c}`.
pub fn cheat_sum_after_declarations(t: &SessionTranscript, class: StrategyClass) -> Result<CheatSum> {
    let Some(a) = t.final_bit else {
        return Ok(CheatSum::new(
            class,
            Estimate::exact(0.0),
            Estimate::exact(0.0),
            vec!["run ended before declarations; no opening is possible".into()],
        ));
    };
    let p = |c: u8| detection_probability_exact(t.declaration_errors[usize::from(c)]);
    let (p0, p1) = match class {
        StrategyClass::Honest => {
            let pa = p(a);
            if a == 0 { (pa, 0.0) } else { (0.0, pa) }
        }
        StrategyClass::ClassicalFlip => (p(0), p(1)),
        StrategyClass::Purification => {
            return Err(Error::param("class", "purification class applies to finite toy protocols only"));
        }
    };
    Ok(CheatSum::new(
        class,
        Estimate::exact(p0),
        Estimate::exact(p1),
        vec![format!("false declarations: {} for bit 0, {} for bit 1", t.declaration_errors[0], t.declaration_errors[1])],
    ))
}

#[derive(Clone, Copy, Default)]
struct Pair {
    s: [u64; 2],
    sessions: u64,
}

/// Sampled cheat sum of `strategy`: each session runs to its declarations,
/// then both openings are attempted against them (the honest class attempts
/// only the declared bit).
pub fn cheat_sum_reduction_mc(
    strategy: &Strategy,
    params: &ProtocolParams,
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Result<CheatSum> {
    if trials == 0 {
        return Err(Error::param("trials", "at least one trial is required"));
    }
    let class = StrategyClass::of(strategy);
    let guess = match strategy {
        Strategy::ClassicalFlip { guess, .. } => *guess,
        _ => GuessRule::Uniform,
    };
    let stream = RandomStream::new(seed);
    let pair = fold_trials(
        trials,
        &stream,
        Ok(Pair::default()),
        |r| {
            let t = run_session(strategy, params, scenario, r)?;
            let mut out = Pair { sessions: 1, ..Pair::default() };
            let Some(a) = t.final_bit else { return Ok(out) };
            let mut rr = r.split_named("counterfactual");
            for c in 0..2u8 {
                if class == StrategyClass::Honest && c != a {
                    continue;
                }
                if reveal_attempt(&t, c, guess, &mut rr)?.accepted() {
                    out.s[usize::from(c)] += 1;
                }
            }
            Ok(out)
        },
        |x: Result<Pair>, y: Result<Pair>| {
            let (x, y) = (x?, y?);
            Ok(Pair { s: [x.s[0] + y.s[0], x.s[1] + y.s[1]], sessions: x.sessions + y.sessions })
        },
    )?;
    let est = |s: u64| Estimate::from_counts(s, pair.sessions);
    let mut out = CheatSum::new(
        class,
        est(pair.s[0]),
        est(pair.s[1]),
        vec![format!("{} sampled sessions of strategy {}", pair.sessions, strategy.name())],
    );
    out.p_sum = (pair.s[0] + pair.s[1]) as f64 / pair.sessions as f64;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub k: usize,
    pub exact_p_sum: f64,
    pub sampled: CheatSum,
}

/// ClassicalFlip family `k = 0..=m` against bit 0; worst member first by sampled `p_sum`.
pub fn cheat_sum_flip_family(params: &ProtocolParams, scenario: &Scenario, trials: u64, seed: u64) -> Result<Vec<FamilyRow>> {
    let mut rows = (0..=params.m)
        .map(|k| {
            let s = Strategy::ClassicalFlip { k, target: 0, guess: GuessRule::Uniform };
            Ok(FamilyRow {
                k,
                exact_p_sum: detection_probability_exact(k) + detection_probability_exact(params.m - k),
                sampled: cheat_sum_reduction_mc(&s, params, scenario, trials, seed.wrapping_add(k as u64))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.sampled.p_sum.total_cmp(&a.sampled.p_sum).then(a.k.cmp(&b.k)));
    Ok(rows)
}
