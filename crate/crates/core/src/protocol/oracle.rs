use serde::{Deserialize, Serialize};

use super::OracleKnobs;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Ideal classical-certificate commitment functionality.
///
/// Holds one classical bit per session index. With both knobs at zero a
/// reveal always returns the committed bit and nothing leaks. Inputs are
/// classical bits only; there is no way to commit a superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealBcccOracle {
    bits: Vec<Option<u8>>,
    opened: Vec<bool>,
    knobs: OracleKnobs,
}

impl IdealBcccOracle {
    pub fn new(sessions: usize, knobs: OracleKnobs) -> Result<Self> {
        knobs.validate()?;
        Ok(Self { bits: vec![None; sessions], opened: vec![false; sessions], knobs })
    }

    pub fn sessions(&self) -> usize {
        self.bits.len()
    }

    pub fn knobs(&self) -> OracleKnobs {
        self.knobs
    }

    pub fn commit(&mut self, index: usize, bit: u8) -> Result<()> {
        let slot = self.bits.get_mut(index).ok_or_else(|| Error::Stage(format!("oracle session {index} does not exist")))?;
        if slot.is_some() {
            return Err(Error::Stage(format!("oracle session {index} already committed")));
        }
        if bit > 1 {
            return Err(Error::Stage(format!("oracle accepts classical bits only, got {bit}")));
        }
        *slot = Some(bit);
        Ok(())
    }

    pub fn committed_count(&self) -> usize {
        self.bits.iter().filter(|b| b.is_some()).count()
    }

    /// Opens session `index`; the result is flipped with the configured probability.
    pub fn reveal(&mut self, index: usize, rng: &mut RandomStream) -> Result<u8> {
        let bit = self
            .bits
            .get(index)
            .copied()
            .flatten()
            .ok_or_else(|| Error::Stage(format!("oracle session {index} has no commitment to reveal")))?;
        self.opened[index] = true;
        Ok(if rng.bernoulli(self.knobs.flip_probability) { 1 - bit } else { bit })
    }

    /// Pre-reveal leak of session `index` to Bob, if the leak knob fires.
    pub fn leak(&self, index: usize, rng: &mut RandomStream) -> Option<u8> {
        let bit = self.bits.get(index).copied().flatten()?;
        rng.bernoulli(self.knobs.leak_probability).then_some(bit)
    }

    pub fn is_opened(&self, index: usize) -> bool {
        self.opened.get(index).copied().unwrap_or(false)
    }
}
