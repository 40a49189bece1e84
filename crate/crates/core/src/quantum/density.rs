use std::borrow::Cow;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::linalg::{floored_sqrt, hermitian_eigen, psd_sqrt, trace_norm_hermitian};
use super::{qubits_for_dim, StateVector, MAX_QUBITS, STATE_TOL};
use crate::error::{Error, Result};

/// Mixed state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
    qubits: usize,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity (all within [`STATE_TOL`]).
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
        }
        let qubits = qubits_for_dim(m.nrows())
            .ok_or_else(|| Error::Dimension(format!("dimension {} is not a power of two", m.nrows())))?;
        if qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubits));
        }
        let herm_err = (&m - m.adjoint()).camax();
        if herm_err > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (max deviation {herm_err:e})")));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min = hermitian_eigen(&m).values.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { m, qubits })
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        let qubits = qubits_for_dim(m.nrows()).expect("power-of-two dimension");
        Self { m, qubits }
    }

    /// Real-valued convenience constructor, row-major.
    pub fn from_real_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::Dimension(format!("expected {} entries, got {}", dim * dim, rows.len())));
        }
        Self::new(DMatrix::from_row_iterator(dim, dim, rows.iter().map(|&r| Complex64::new(r, 0.0))))
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        if qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubits));
        }
        let d = 1usize << qubits;
        Ok(Self { m: DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0), qubits })
    }

    /// Mixture `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`; weights must sum to 1.
    pub fn mixture(ensemble: &[(f64, StateVector)]) -> Result<Self> {
        let first = ensemble.first().ok_or_else(|| Error::Dimension("empty ensemble".into()))?;
        let dim = first.1.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (w, s) in ensemble {
            if s.dim() != dim {
                return Err(Error::Dimension("ensemble members differ in dimension".into()));
            }
            m += s.density().m * Complex64::new(*w, 0.0);
        }
        Self::new(m)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).values
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        psi.vector().dotc(&(&self.m * psi.vector())).re
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.m - &other.m).camax()
    }
}

/// Anything that can be viewed as a density matrix.
pub trait Reducible {
    fn as_density(&self) -> Cow<'_, DensityMatrix>;
}

impl Reducible for DensityMatrix {
    fn as_density(&self) -> Cow<'_, DensityMatrix> {
        Cow::Borrowed(self)
    }
}

impl Reducible for StateVector {
    fn as_density(&self) -> Cow<'_, DensityMatrix> {
        Cow::Owned(self.density())
    }
}

/// Reduced state on the qubits in `keep`, indexed in ascending qubit order.
pub fn partial_trace<S: Reducible + ?Sized>(state: &S, keep: &[usize]) -> Result<DensityMatrix> {
    let rho = state.as_density();
    let n = rho.qubits();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() != keep.len() {
        return Err(Error::Dimension("keep set must be nonempty and free of duplicates".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::QubitIndex { index: bad, qubits: n });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    // Full index from (kept bits, traced bits); qubit q sits at bit n-1-q.
    let scatter = |bits: usize, qs: &[usize]| -> usize {
        qs.iter()
            .enumerate()
            .map(|(pos, &q)| ((bits >> (qs.len() - 1 - pos)) & 1) << (n - 1 - q))
            .sum()
    };
    let kd = 1usize << kept.len();
    let td = 1usize << traced.len();
    let kidx: Vec<usize> = (0..kd).map(|k| scatter(k, &kept)).collect();
    let tidx: Vec<usize> = (0..td).map(|t| scatter(t, &traced)).collect();

    let m = rho.matrix();
    let out = DMatrix::from_fn(kd, kd, |r, c| tidx.iter().map(|&t| m[(kidx[r] | t, kidx[c] | t)]).sum());
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Uhlmann fidelity, squared convention: `F = (Tr √(√ρ₀ ρ₁ √ρ₀))²`.
pub fn fidelity(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::Dimension(format!("fidelity of {}- and {}-dimensional states", rho0.dim(), rho1.dim())));
    }
    let s = psd_sqrt(&rho0.m);
    let inner = &s * &rho1.m * &s;
    let values = hermitian_eigen(&inner).values;
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let root: f64 = values.iter().map(|&v| floored_sqrt(v, scale)).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// `½ ‖ρ₀ − ρ₁‖₁`.
pub fn trace_distance(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::Dimension("trace distance of states with different dimension".into()));
    }
    Ok(0.5 * trace_norm_hermitian(&(&rho0.m - &rho1.m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{spin_state, tensor, SpinLabel};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> StateVector {
        StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn validation_errors() {
        assert!(DensityMatrix::from_real_rows(2, &[0.5, 0.0, 0.0, 0.6]).is_err());
        assert!(DensityMatrix::from_real_rows(2, &[1.5, 0.0, 0.0, -0.5]).is_err());
        assert!(DensityMatrix::from_real_rows(2, &[0.5, 0.1, 0.0, 0.5]).is_err());
        assert!(DensityMatrix::from_real_rows(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let r = partial_trace(&bell(), &[0]).unwrap();
        assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-15);
    }

    #[test]
    fn product_reduces_to_factor() {
        let a = spin_state(SpinLabel::Right);
        let b = spin_state(SpinLabel::Down);
        let ab = tensor(&a, &b);
        assert!(partial_trace(&ab, &[0]).unwrap().max_abs_diff(&a.density()) < 1e-15);
        assert!(partial_trace(&ab, &[1]).unwrap().max_abs_diff(&b.density()) < 1e-15);
    }

    #[test]
    fn schmidt_form_spectrum() {
        let (a, b) = (0.6f64, 0.8f64);
        let s = StateVector::from_real(&[a, 0.0, 0.0, b]).unwrap();
        let ev = partial_trace(&s, &[1]).unwrap().eigenvalues();
        assert!((ev[0] - b * b).abs() < 1e-12 && (ev[1] - a * a).abs() < 1e-12);
    }

    #[test]
    fn keep_set_errors() {
        assert!(partial_trace(&bell(), &[]).is_err());
        assert!(partial_trace(&bell(), &[0, 0]).is_err());
        assert!(matches!(partial_trace(&bell(), &[2]), Err(Error::QubitIndex { .. })));
    }

    #[test]
    fn fidelity_anchors() {
        let z0 = spin_state(SpinLabel::Up).density();
        let plus = spin_state(SpinLabel::Right).density();
        assert!((fidelity(&z0, &z0).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity(&z0, &plus).unwrap() - 0.5).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((fidelity(&mixed, &z0).unwrap() - 0.5).abs() < 1e-12);
        assert!(fidelity(&z0, &DensityMatrix::maximally_mixed(2).unwrap()).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let up = spin_state(SpinLabel::Up).density();
        let down = spin_state(SpinLabel::Down).density();
        assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-12);
    }
}
