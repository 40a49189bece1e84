use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{MeasurementBasis, SpinLabel};

/// Bit pair → spin label table; must be a bijection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingRule {
    /// Indexed by `2 * first + second`.
    table: [SpinLabel; 4],
}

impl Default for EncodingRule {
    fn default() -> Self {
        Self::standard()
    }
}

impl EncodingRule {
    /// (0,0)→↑, (0,1)→↓, (1,0)→←, (1,1)→→.
    pub const fn standard() -> Self {
        Self { table: [SpinLabel::Up, SpinLabel::Down, SpinLabel::Left, SpinLabel::Right] }
    }

    pub fn new(table: [SpinLabel; 4]) -> Result<Self> {
        let mut seen = table.to_vec();
        seen.sort();
        seen.dedup();
        if seen.len() != 4 {
            return Err(Error::param("encoding", "table must map the four bit pairs to four distinct labels"));
        }
        Ok(Self { table })
    }

    pub fn encode(&self, first: u8, second: u8) -> SpinLabel {
        self.table[usize::from(2 * (first & 1) + (second & 1))]
    }

    pub fn decode(&self, label: SpinLabel) -> (u8, u8) {
        let i = self.table.iter().position(|&l| l == label).expect("bijective table");
        ((i / 2) as u8, (i % 2) as u8)
    }

    /// Particle `i` carries commitments `2i` and `2i + 1`.
    pub fn encode_all(&self, bits: &[u8]) -> Vec<SpinLabel> {
        bits.chunks_exact(2).map(|p| self.encode(p[0], p[1])).collect()
    }
}

/// Alice's statement about one untested particle: if the committed bit is 0
/// the particle is an eigenstate of `basis_if_zero`, if it is 1 an eigenstate
/// of the conjugate basis.
///
/// Stating the basis for bit 0 (rather than for Alice's actual bit) keeps the
/// record itself free of the bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declaration {
    pub particle: usize,
    pub basis_if_zero: MeasurementBasis,
}

impl Declaration {
    /// Declaration binding `bit` to `basis` (and the complement to the conjugate).
    pub fn binding(particle: usize, bit: u8, basis: MeasurementBasis) -> Self {
        let basis_if_zero = if bit == 0 { basis } else { basis.conjugate() };
        Self { particle, basis_if_zero }
    }

    pub fn basis_for(&self, bit: u8) -> MeasurementBasis {
        if bit == 0 {
            self.basis_if_zero
        } else {
            self.basis_if_zero.conjugate()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_table() {
        let r = EncodingRule::standard();
        assert_eq!(r.encode(0, 0), SpinLabel::Up);
        assert_eq!(r.encode(0, 1), SpinLabel::Down);
        assert_eq!(r.encode(1, 0), SpinLabel::Left);
        assert_eq!(r.encode(1, 1), SpinLabel::Right);
        for l in SpinLabel::ALL {
            let (a, b) = r.decode(l);
            assert_eq!(r.encode(a, b), l);
        }
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(EncodingRule::new([SpinLabel::Up, SpinLabel::Up, SpinLabel::Left, SpinLabel::Right]).is_err());
    }

    #[test]
    fn declaration_binding() {
        let d = Declaration::binding(0, 0, MeasurementBasis::Z);
        assert_eq!((d.basis_for(0), d.basis_for(1)), (MeasurementBasis::Z, MeasurementBasis::X));
        let d = Declaration::binding(0, 1, MeasurementBasis::X);
        assert_eq!((d.basis_for(1), d.basis_for(0)), (MeasurementBasis::X, MeasurementBasis::Z));
    }
}
