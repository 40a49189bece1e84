use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::StateVector;

/// Pauli measurement basis: `Z` (σ_z eigenbasis) or `X` (σ_x eigenbasis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasurementBasis {
    Z,
    X,
}

impl MeasurementBasis {
    pub const fn conjugate(self) -> Self {
        match self {
            Self::Z => Self::X,
            Self::X => Self::Z,
        }
    }

    /// `Z` for 0, `X` for 1.
    pub const fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Self::Z
        } else {
            Self::X
        }
    }

    pub const fn bit(self) -> u8 {
        match self {
            Self::Z => 0,
            Self::X => 1,
        }
    }

    /// The two eigenvectors of the basis, ordered by outcome bit.
    pub(crate) fn eigenvectors(self) -> [[Complex64; 2]; 2] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Self::Z => [[one, zero], [zero, one]],
            Self::X => [[h, -h], [h, h]],
        }
    }
}

impl fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Z => f.write_str("Z"),
            Self::X => f.write_str("X"),
        }
    }
}

/// One of the four BB84 spin states.
///
/// `Up`/`Down` are the σ_z eigenstates (outcomes 0/1 in `Z`), `Left`/`Right`
/// the σ_x eigenstates (outcomes 0/1 in `X`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpinLabel {
    Up,
    Down,
    Left,
    Right,
}

impl SpinLabel {
    pub const ALL: [SpinLabel; 4] = [Self::Up, Self::Down, Self::Left, Self::Right];

    pub const fn basis(self) -> MeasurementBasis {
        match self {
            Self::Up | Self::Down => MeasurementBasis::Z,
            Self::Left | Self::Right => MeasurementBasis::X,
        }
    }

    /// Measurement outcome this eigenstate yields in its own basis.
    pub const fn outcome(self) -> u8 {
        match self {
            Self::Up | Self::Left => 0,
            Self::Down | Self::Right => 1,
        }
    }

    pub const fn from_basis_outcome(basis: MeasurementBasis, outcome: u8) -> Self {
        match (basis, outcome) {
            (MeasurementBasis::Z, 0) => Self::Up,
            (MeasurementBasis::Z, _) => Self::Down,
            (MeasurementBasis::X, 0) => Self::Left,
            (MeasurementBasis::X, _) => Self::Right,
        }
    }

    /// The orthogonal partner in the same basis.
    pub const fn flipped(self) -> Self {
        match self {
            Self::Up => Self::Down,
            Self::Down => Self::Up,
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }

    /// `2 |ψ⟩⟨ψ|`, which has integer entries for every BB84 state.
    pub const fn doubled_projector(self) -> [[i64; 2]; 2] {
        match self {
            Self::Up => [[2, 0], [0, 0]],
            Self::Down => [[0, 0], [0, 2]],
            Self::Left => [[1, -1], [-1, 1]],
            Self::Right => [[1, 1], [1, 1]],
        }
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Up => "up",
            Self::Down => "down",
            Self::Left => "left",
            Self::Right => "right",
        };
        f.write_str(s)
    }
}

/// State vector of a spin label in the computational (Z) basis.
pub fn spin_state(label: SpinLabel) -> StateVector {
    let v = label.basis().eigenvectors()[label.outcome() as usize];
    StateVector::from_normalized_unchecked(v.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, re: f64) -> bool {
        (a - Complex64::new(re, 0.0)).norm() < 1e-15
    }

    #[test]
    fn up_and_right_amplitudes() {
        let up = spin_state(SpinLabel::Up);
        assert!(close(up.amplitudes()[0], 1.0) && close(up.amplitudes()[1], 0.0));
        let right = spin_state(SpinLabel::Right);
        assert!(close(right.amplitudes()[0], FRAC_1_SQRT_2) && close(right.amplitudes()[1], FRAC_1_SQRT_2));
        let left = spin_state(SpinLabel::Left);
        assert!(close(left.amplitudes()[1], -FRAC_1_SQRT_2));
    }

    #[test]
    fn conjugate_overlap_is_half() {
        let o = spin_state(SpinLabel::Up).inner(&spin_state(SpinLabel::Right)).norm_sqr();
        assert!((o - 0.5).abs() < 1e-15);
        assert!(spin_state(SpinLabel::Left).inner(&spin_state(SpinLabel::Right)).norm() < 1e-15);
    }

    #[test]
    fn basis_table() {
        assert_eq!(SpinLabel::Up.basis(), MeasurementBasis::Z);
        assert_eq!(SpinLabel::Down.basis(), MeasurementBasis::Z);
        assert_eq!(SpinLabel::Left.basis(), MeasurementBasis::X);
        assert_eq!(SpinLabel::Right.basis(), MeasurementBasis::X);
        for b in [MeasurementBasis::Z, MeasurementBasis::X] {
            assert_eq!(b.conjugate().conjugate(), b);
            assert_ne!(b.conjugate(), b);
        }
        for l in SpinLabel::ALL {
            assert_eq!(SpinLabel::from_basis_outcome(l.basis(), l.outcome()), l);
        }
    }

    #[test]
    fn doubled_projector_matches_state() {
        for l in SpinLabel::ALL {
            let p = spin_state(l).density();
            let d = l.doubled_projector();
            for r in 0..2 {
                for c in 0..2 {
                    assert!((p.matrix()[(r, c)].re * 2.0 - d[r][c] as f64).abs() < 1e-15);
                }
            }
        }
    }
}
