use nalgebra::DVector;
use num_complex::Complex64;

use super::{qubits_for_dim, DensityMatrix, MAX_QUBITS, STATE_TOL};
use crate::error::{Error, Result};

/// Pure state of an `n`-qubit register, `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
    qubits: usize,
}

impl StateVector {
    /// Checks the length is a power of two and the norm is 1 within tolerance.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let qubits = qubits_for_dim(amplitudes.len())
            .ok_or_else(|| Error::Dimension(format!("{} amplitudes is not a power of two", amplitudes.len())))?;
        if qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubits));
        }
        let amps = DVector::from_vec(amplitudes);
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amps, qubits })
    }

    /// Like [`StateVector::new`] but rescales to unit norm first.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Self::new((v / Complex64::new(n, 0.0)).data.into())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub(crate) fn from_normalized_unchecked(amplitudes: Vec<Complex64>) -> Self {
        let qubits = qubits_for_dim(amplitudes.len()).expect("power-of-two length");
        Self { amps: DVector::from_vec(amplitudes), qubits }
    }

    pub(crate) fn from_dvector_unchecked(amps: DVector<Complex64>) -> Self {
        let qubits = qubits_for_dim(amps.len()).expect("power-of-two length");
        Self { amps, qubits }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        if qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubits));
        }
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::Dimension(format!("basis index {index} >= {dim}")));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, qubits })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub(crate) fn vector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(&self.amps * self.amps.adjoint())
    }

    /// Largest amplitude difference against `other`, ignoring nothing (not up to phase).
    pub fn distance(&self, other: &StateVector) -> f64 {
        (&self.amps - &other.amps).norm()
    }
}

/// Kronecker product `a ⊗ b`; `a` occupies the leading qubits.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let amps = a.amps.kronecker(&b.amps);
    let n = amps.norm();
    StateVector { amps: amps / Complex64::new(n, 0.0), qubits: a.qubits + b.qubits }
}
