use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: DMatrix<Complex64>,
}

pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> HermitianEigen {
    // Symmetrize first; the solver assumes exact hermiticity.
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    HermitianEigen { values, vectors }
}

/// Eigenvalues below this multiple of the spectral radius are solver noise.
const SPECTRAL_FLOOR: f64 = 1e-14;

/// `√v` with rounding noise around zero (relative to `scale`) sent to exactly zero;
/// otherwise a 1e-16 ghost eigenvalue would contribute 1e-8.
pub(crate) fn floored_sqrt(v: f64, scale: f64) -> f64 {
    if v <= SPECTRAL_FLOOR * scale.max(f64::MIN_POSITIVE) {
        0.0
    } else {
        v.sqrt()
    }
}

/// Square root of a positive semidefinite matrix; negative rounding noise is clamped.
pub(crate) fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let HermitianEigen { values, vectors } = hermitian_eigen(m);
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let d = DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(floored_sqrt(v, scale), 0.0)));
    &vectors * DMatrix::from_diagonal(&d) * vectors.adjoint()
}

/// Von Neumann entropy in bits of a (possibly unnormalized) PSD matrix's spectrum.
pub fn von_neumann_entropy_bits(m: &DMatrix<Complex64>) -> f64 {
    hermitian_eigen(m)
        .values
        .into_iter()
        .filter(|&v| v > 1e-15)
        .map(|v| -v * v.log2())
        .sum()
}

pub(crate) fn trace_norm_hermitian(m: &DMatrix<Complex64>) -> f64 {
    hermitian_eigen(m).values.into_iter().map(f64::abs).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.25, 0.0), Complex64::new(0.1, -0.2), Complex64::new(0.1, 0.2), Complex64::new(0.75, 0.0)],
        );
        let e = hermitian_eigen(&m);
        assert!(e.values[0] >= e.values[1]);
        let d = DMatrix::from_diagonal(&DVector::from_iterator(2, e.values.iter().map(|&v| Complex64::new(v, 0.0))));
        let back = &e.vectors * d * e.vectors.adjoint();
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
        );
        let s = psd_sqrt(&m);
        assert!((&s * &s - m).norm() < 1e-12);
    }
}
