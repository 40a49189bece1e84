//! Canonical purifications and the Uhlmann rotation between them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::linalg::hermitian_eigen;
use super::{qubits_for_dim, DensityMatrix, StateVector, MAX_QUBITS, STATE_TOL};
use crate::error::{Error, Result};

/// Eigenvalues below this count as zero when determining rank.
const RANK_CUTOFF: f64 = 1e-12;

/// A unitary acting on a register of `2^k` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(DMatrix<Complex64>);

impl Unitary {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("unitary must be square".into()));
        }
        let err = (&m.adjoint() * &m - DMatrix::identity(m.nrows(), m.nrows())).camax();
        if err > STATE_TOL {
            return Err(Error::Dimension(format!("matrix is not unitary (deviation {err:e})")));
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Applies `I ⊗ U` to a joint state whose trailing factor is this unitary's space.
    pub fn apply_to_purifier(&self, joint: &StateVector) -> Result<StateVector> {
        let p = self.dim();
        if !joint.dim().is_multiple_of(p) {
            return Err(Error::Dimension(format!("joint dimension {} not divisible by purifier {p}", joint.dim())));
        }
        let a = joint.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
        for (block, chunk) in a.chunks(p).enumerate() {
            let v = &self.0 * DVector::from_column_slice(chunk);
            out[block * p..(block + 1) * p].copy_from_slice(v.as_slice());
        }
        Ok(StateVector::from_normalized_unchecked(out))
    }
}

struct Spectral {
    sqrt_values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

fn spectral(rho: &DensityMatrix, purifier_dim: usize) -> Result<Spectral> {
    let eig = hermitian_eigen(rho.matrix());
    let rank = eig.values.iter().filter(|&&v| v > RANK_CUTOFF).count();
    if rank > purifier_dim {
        return Err(Error::Dimension(format!("purifier dimension {purifier_dim} below state rank {rank}")));
    }
    let kept = purifier_dim.min(eig.values.len());
    Ok(Spectral {
        sqrt_values: eig.values[..kept].iter().map(|v| v.max(0.0).sqrt()).collect(),
        vectors: eig.vectors.columns(0, kept).into_owned(),
    })
}

fn check_purifier(purifier_dim: usize, system_qubits: usize) -> Result<usize> {
    let pq = qubits_for_dim(purifier_dim)
        .ok_or_else(|| Error::Dimension(format!("purifier dimension {purifier_dim} is not a power of two")))?;
    if pq + system_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits(pq + system_qubits));
    }
    Ok(pq)
}

/// `Σᵢ √λᵢ |eᵢ⟩ ⊗ |i⟩` with eigenvalues in descending order; the purifier is the trailing factor.
pub fn canonical_purification(rho: &DensityMatrix, purifier_dim: usize) -> Result<StateVector> {
    check_purifier(purifier_dim, rho.qubits())?;
    let sp = spectral(rho, purifier_dim)?;
    let d = rho.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); d * purifier_dim];
    for (i, s) in sp.sqrt_values.iter().enumerate() {
        for row in 0..d {
            amps[row * purifier_dim + i] = sp.vectors[(row, i)] * *s;
        }
    }
    StateVector::normalized(amps)
}

/// Unitary `U` on the purifier maximizing `|⟨ψ₁|(I ⊗ U)|ψ₀⟩|` between canonical purifications.
///
/// The attained overlap is `√F(ρ₀, ρ₁)`.
pub fn uhlmann_rotation(rho0: &DensityMatrix, rho1: &DensityMatrix, purifier_dim: usize) -> Result<Unitary> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::Dimension(format!("states of dimension {} and {}", rho0.dim(), rho1.dim())));
    }
    check_purifier(purifier_dim, rho0.qubits())?;
    let (s0, s1) = (spectral(rho0, purifier_dim)?, spectral(rho1, purifier_dim)?);

    // ⟨ψ₁|(I⊗U)|ψ₀⟩ = Tr(U K), K_ij = √λ₀ᵢ √λ₁ⱼ ⟨f_j|e_i⟩.
    let cross = s1.vectors.adjoint() * &s0.vectors;
    let k = DMatrix::from_fn(purifier_dim, purifier_dim, |i, j| {
        if i < s0.sqrt_values.len() && j < s1.sqrt_values.len() {
            cross[(j, i)] * s0.sqrt_values[i] * s1.sqrt_values[j]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    // K = X Σ Y†, so U = Y X† gives Tr(U K) = Tr Σ.
    let svd = k.svd(true, true);
    let x = svd.u.expect("requested U");
    let y = svd.v_t.expect("requested V^T").adjoint();
    Ok(Unitary(y * x.adjoint()))
}

/// `⟨ψ₁|(I ⊗ U)|ψ₀⟩` for two joint states sharing a purifier layout.
pub fn purifier_overlap(psi0: &StateVector, psi1: &StateVector, u: &Unitary) -> Result<Complex64> {
    if psi0.dim() != psi1.dim() {
        return Err(Error::Dimension("purifications differ in dimension".into()));
    }
    Ok(psi1.inner(&u.apply_to_purifier(psi0)?))
}
