//! Cheating strategies against the reduction protocol and against finite
//! quantum commitments.

mod degradation;
mod flip;
mod toy;

pub use degradation::{flip_attack_on_reduction_with_weak_oracle, DegradationReport};
pub use flip::{classical_flip_attack, entangled_commit, reveal_attempt, FlipPlan, GuessRule};
pub use toy::{numerical_max_purifier_overlap, purification_attack, PurificationOutcome, ToyBcProtocol};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::ProtocolParams;
use crate::quantum::STATE_TOL;

/// Alice's behaviour in a reduction run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy {
    Honest,
    /// Declarations false on `k` untested particles for `target`, then reveal `target`.
    ClassicalFlip { k: usize, target: u8, guess: GuessRule },
    /// Commit `α|0⟩|0⟩_A + β|1⟩|1⟩_A`, measure the ancilla, then act honestly.
    EntangledCommit { alpha: Complex64, beta: Complex64 },
    PurificationAttack { target: u8 },
}

impl Strategy {
    pub fn validate(&self, params: &ProtocolParams) -> Result<()> {
        match *self {
            Strategy::Honest => Ok(()),
            Strategy::ClassicalFlip { k, target, .. } => {
                if k > params.m {
                    return Err(Error::param("adversary.k", format!("{k} false declarations exceed m = {}", params.m)));
                }
                check_bit(target)
            }
            Strategy::EntangledCommit { alpha, beta } => {
                let n = alpha.norm_sqr() + beta.norm_sqr();
                if (n - 1.0).abs() > STATE_TOL {
                    return Err(Error::param("adversary.alpha", format!("|α|² + |β|² = {n}")));
                }
                Ok(())
            }
            Strategy::PurificationAttack { target } => check_bit(target),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Honest => "honest",
            Strategy::ClassicalFlip { .. } => "classical-flip",
            Strategy::EntangledCommit { .. } => "entangled-commit",
            Strategy::PurificationAttack { .. } => "purification-attack",
        }
    }
}

fn check_bit(b: u8) -> Result<()> {
    if b > 1 {
        return Err(Error::param("adversary.target", format!("{b} is not a bit")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let p = ProtocolParams::new(4, 16, 0).unwrap();
        assert!(Strategy::ClassicalFlip { k: 5, target: 0, guess: GuessRule::Uniform }.validate(&p).is_err());
        assert!(Strategy::ClassicalFlip { k: 4, target: 1, guess: GuessRule::Uniform }.validate(&p).is_ok());
        assert!(Strategy::PurificationAttack { target: 2 }.validate(&p).is_err());
        let bad = Strategy::EntangledCommit { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.1, 0.0) };
        assert!(bad.validate(&p).is_err());
    }
}
