//! Dense linear algebra for small qubit registers.
//!
//! Qubit 0 is the most significant tensor factor: in a 2-qubit register the
//! amplitude index is `2 * q0 + q1`.

mod density;
mod linalg;
mod measure;
mod purification;
mod schmidt;
mod spin;
mod state;

pub use density::{fidelity, partial_trace, trace_distance, DensityMatrix, Reducible};
pub use linalg::{hermitian_eigen, von_neumann_entropy_bits, HermitianEigen};
pub(crate) use linalg::trace_norm_hermitian;
pub use measure::{measure, outcome_probabilities};
pub use purification::{canonical_purification, purifier_overlap, uhlmann_rotation, Unitary};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use spin::{spin_state, MeasurementBasis, SpinLabel};
pub use state::{tensor, StateVector};

pub use num_complex::Complex64;

/// Largest register handled by the dense representation.
pub const MAX_QUBITS: usize = 12;

/// Normalization, hermiticity and trace checks.
pub const STATE_TOL: f64 = 1e-9;

/// Round-trip error allowed for decompositions and reconstructions.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// Convergence tolerance for numerical optimisation.
pub const OPTIMIZATION_TOL: f64 = 1e-6;

pub(crate) fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two() && dim > 0).then(|| dim.trailing_zeros() as usize)
}
