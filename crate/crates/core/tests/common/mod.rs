#![allow(dead_code)]

pub mod oracle;

use qcommit::quantum::{Complex64, DensityMatrix, StateVector};
use qcommit::RandomStream;

/// Haar-ish random state: Gaussian-free but dense complex amplitudes, normalized.
pub fn random_state(rng: &mut RandomStream, qubits: usize) -> StateVector {
    let amps = (0..1usize << qubits).map(|_| Complex64::new(rng.uniform() - 0.5, rng.uniform() - 0.5)).collect();
    StateVector::normalized(amps).expect("non-zero amplitudes")
}

pub fn random_density(rng: &mut RandomStream, qubits: usize, terms: usize) -> DensityMatrix {
    let w: Vec<f64> = (0..terms).map(|_| rng.uniform() + 0.05).collect();
    let total: f64 = w.iter().sum();
    let ensemble: Vec<(f64, StateVector)> = w.iter().map(|x| (x / total, random_state(rng, qubits))).collect();
    DensityMatrix::mixture(&ensemble).expect("valid mixture")
}
