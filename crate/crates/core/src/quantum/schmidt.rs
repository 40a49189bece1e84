use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StateVector;
use crate::error::{Error, Result};

/// Coefficients below this are treated as zero and dropped.
const ZERO_COEFFICIENT: f64 = 1e-13;

/// `|ψ⟩ = Σᵢ cᵢ |lᵢ⟩|rᵢ⟩` across a bipartition of the register.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Descending, strictly positive.
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<StateVector>,
    pub right_basis: Vec<StateVector>,
    pub left_qubits: Vec<usize>,
    pub right_qubits: Vec<usize>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Rebuilds the full state in the original qubit order.
    pub fn reconstruct(&self) -> StateVector {
        let n = self.left_qubits.len() + self.right_qubits.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for ((c, l), r) in self.coefficients.iter().zip(&self.left_basis).zip(&self.right_basis) {
            for (li, la) in l.amplitudes().iter().enumerate() {
                for (ri, ra) in r.amplitudes().iter().enumerate() {
                    amps[join(li, &self.left_qubits, ri, &self.right_qubits, n)] += la * ra * *c;
                }
            }
        }
        StateVector::from_normalized_unchecked(amps)
    }
}

fn join(li: usize, left: &[usize], ri: usize, right: &[usize], n: usize) -> usize {
    let place = |bits: usize, qs: &[usize]| -> usize {
        qs.iter().enumerate().map(|(p, &q)| ((bits >> (qs.len() - 1 - p)) & 1) << (n - 1 - q)).sum()
    };
    place(li, left) | place(ri, right)
}

/// Schmidt decomposition with `left` qubits on one side and the rest on the other.
pub fn schmidt_decompose(state: &StateVector, left: &[usize]) -> Result<SchmidtDecomposition> {
    let n = state.qubits();
    let mut left_qubits = left.to_vec();
    left_qubits.sort_unstable();
    left_qubits.dedup();
    if left_qubits.len() != left.len() || left_qubits.is_empty() || left_qubits.len() >= n {
        return Err(Error::Dimension("bipartition must split the register into two nonempty parts".into()));
    }
    if let Some(&bad) = left_qubits.iter().find(|&&q| q >= n) {
        return Err(Error::QubitIndex { index: bad, qubits: n });
    }
    let right_qubits: Vec<usize> = (0..n).filter(|q| !left_qubits.contains(q)).collect();
    let (ld, rd) = (1usize << left_qubits.len(), 1usize << right_qubits.len());
    let a = state.amplitudes();
    let m = DMatrix::from_fn(ld, rd, |l, r| a[join(l, &left_qubits, r, &right_qubits, n)]);

    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^T"));
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));

    let mut out = SchmidtDecomposition {
        coefficients: vec![],
        left_basis: vec![],
        right_basis: vec![],
        left_qubits,
        right_qubits,
    };
    for i in order {
        let c = svd.singular_values[i];
        if c <= ZERO_COEFFICIENT {
            continue;
        }
        out.coefficients.push(c);
        out.left_basis.push(StateVector::from_normalized_unchecked(u.column(i).iter().copied().collect()));
        out.right_basis.push(StateVector::from_normalized_unchecked(v_t.row(i).iter().copied().collect()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{spin_state, tensor, SpinLabel};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn product_state_has_rank_one() {
        let s = tensor(&spin_state(SpinLabel::Left), &spin_state(SpinLabel::Down));
        let d = schmidt_decompose(&s, &[0]).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.coefficients[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_coefficients() {
        let s = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        let d = schmidt_decompose(&s, &[1]).unwrap();
        assert_eq!(d.rank(), 2);
        for c in &d.coefficients {
            assert!((c - FRAC_1_SQRT_2).abs() < 1e-12);
        }
        assert!(d.reconstruct().distance(&s) < 1e-12);
    }

    #[test]
    fn bad_cuts() {
        let s = StateVector::basis(2, 0).unwrap();
        assert!(schmidt_decompose(&s, &[]).is_err());
        assert!(schmidt_decompose(&s, &[0, 1]).is_err());
        assert!(schmidt_decompose(&s, &[3]).is_err());
    }
}
