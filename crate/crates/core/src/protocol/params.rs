use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three error bounds of a classical-certificate commitment: with
/// probability `1 − epsilon` the committed input's fidelity to the revealed
/// bit is within `epsilon_prime` of 1, and Bob's pre-reveal information is at
/// most `epsilon_double_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SecurityBounds {
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub epsilon_double_prime: f64,
}

impl SecurityBounds {
    pub const IDEAL: SecurityBounds = SecurityBounds { epsilon: 0.0, epsilon_prime: 0.0, epsilon_double_prime: 0.0 };

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("protocol.epsilon", self.epsilon),
            ("protocol.epsilon_prime", self.epsilon_prime),
            ("protocol.epsilon_double_prime", self.epsilon_double_prime),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::param(field, format!("{v} is outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Imperfections of the ideal oracle. Both zero is the ideal functionality.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OracleKnobs {
    /// Probability that a reveal returns the complement of the committed bit.
    pub flip_probability: f64,
    /// Probability that a suspended commitment's bit leaks to Bob before reveal.
    pub leak_probability: f64,
}

impl OracleKnobs {
    pub const IDEAL: OracleKnobs = OracleKnobs { flip_probability: 0.0, leak_probability: 0.0 };

    pub fn is_ideal(&self) -> bool {
        self.flip_probability == 0.0 && self.leak_probability == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("oracle.flip_probability", self.flip_probability), ("oracle.leak_probability", self.leak_probability)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(field, format!("{v} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Untested particles that carry the final commitment.
    pub m: usize,
    /// Spin particles sent; `2 * n0` oracle commitments are made.
    pub n0: usize,
    /// Security parameter of each oracle commitment (recorded, not simulated).
    pub n1: u32,
    pub bounds: SecurityBounds,
    pub oracle: OracleKnobs,
    pub seed: u64,
    /// Smallest accepted `n0 / m`.
    pub min_ratio: usize,
    /// Heartbeat rounds between declarations and reveal.
    pub suspension_rounds: u32,
    /// Oracle bits chosen by Alice instead of drawn uniformly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen_bits: Option<Vec<u8>>,
}

impl ProtocolParams {
    pub const DEFAULT_MIN_RATIO: usize = 4;

    pub fn new(m: usize, n0: usize, seed: u64) -> Result<Self> {
        let p = Self {
            m,
            n0,
            n1: 64,
            bounds: SecurityBounds::IDEAL,
            oracle: OracleKnobs::IDEAL,
            seed,
            min_ratio: Self::DEFAULT_MIN_RATIO,
            suspension_rounds: 2,
            chosen_bits: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Skips the `n0 ≥ min_ratio · m` check; for degenerate test cases.
    pub fn unchecked_ratio(m: usize, n0: usize, seed: u64) -> Result<Self> {
        let mut p = Self::new(1, 4, seed)?;
        p.m = m;
        p.n0 = n0;
        p.min_ratio = 1;
        p.validate()?;
        Ok(p)
    }

    pub fn with_oracle(mut self, knobs: OracleKnobs) -> Result<Self> {
        self.oracle = knobs;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("protocol.m", "must be at least 1"));
        }
        if self.min_ratio == 0 {
            return Err(Error::param("protocol.min_ratio", "must be at least 1"));
        }
        if self.n0 < self.min_ratio * self.m {
            return Err(Error::param("protocol.n0", format!("{} is below {} x m = {}", self.n0, self.min_ratio, self.min_ratio * self.m)));
        }
        if let Some(bits) = &self.chosen_bits {
            if bits.len() != 2 * self.n0 || bits.iter().any(|&b| b > 1) {
                return Err(Error::param("protocol.chosen_bits", format!("need exactly {} bits of value 0 or 1", 2 * self.n0)));
            }
        }
        self.bounds.validate()?;
        self.oracle.validate()
    }

    pub fn tested(&self) -> usize {
        self.n0 - self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_enforced() {
        assert!(ProtocolParams::new(16, 64, 1).is_ok());
        assert!(matches!(ProtocolParams::new(16, 63, 1), Err(Error::Param { field: "protocol.n0", .. })));
        assert!(ProtocolParams::new(0, 64, 1).is_err());
        assert!(ProtocolParams::unchecked_ratio(3, 3, 1).is_ok());
    }

    #[test]
    fn knob_and_bound_ranges() {
        let p = ProtocolParams::new(1, 4, 0).unwrap();
        assert!(p.clone().with_oracle(OracleKnobs { flip_probability: 1.5, leak_probability: 0.0 }).is_err());
        assert!(p.clone().with_oracle(OracleKnobs { flip_probability: 0.0, leak_probability: 1.0 }).is_ok());
        let mut q = p;
        q.bounds.epsilon = 1.0;
        assert!(q.validate().is_err());
    }
}
