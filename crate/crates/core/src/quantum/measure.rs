use nalgebra::DVector;
use num_complex::Complex64;

use super::{MeasurementBasis, StateVector};
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Projections of `state` onto the two eigenvectors of `basis` on `qubit`.
fn project(state: &StateVector, basis: MeasurementBasis, qubit: usize) -> Result<[DVector<Complex64>; 2]> {
    let n = state.qubits();
    if qubit >= n {
        return Err(Error::QubitIndex { index: qubit, qubits: n });
    }
    let stride = 1usize << (n - 1 - qubit);
    let a = state.amplitudes();
    let ev = basis.eigenvectors();
    let mut out = [DVector::zeros(a.len()), DVector::zeros(a.len())];
    for i0 in (0..a.len()).filter(|i| i & stride == 0) {
        let i1 = i0 | stride;
        for (b, e) in ev.iter().enumerate() {
            let c = e[0].conj() * a[i0] + e[1].conj() * a[i1];
            out[b][i0] = e[0] * c;
            out[b][i1] = e[1] * c;
        }
    }
    Ok(out)
}

/// Born-rule probabilities of outcomes 0 and 1.
pub fn outcome_probabilities(state: &StateVector, basis: MeasurementBasis, qubit: usize) -> Result<[f64; 2]> {
    let [p0, p1] = project(state, basis, qubit)?;
    let (p0, p1) = (p0.norm_squared(), p1.norm_squared());
    // Dividing out the rounded norm keeps certain outcomes at exactly 1.
    let total = p0 + p1;
    Ok([p0 / total, p1 / total])
}

/// Measures `qubit` in `basis`, returning the outcome bit and the collapsed state.
///
/// A branch with zero probability is never selected.
pub fn measure(
    state: &StateVector,
    basis: MeasurementBasis,
    qubit: usize,
    rng: &mut RandomStream,
) -> Result<(u8, StateVector)> {
    let branches = project(state, basis, qubit)?;
    let p0 = branches[0].norm_squared();
    let p1 = branches[1].norm_squared();
    let outcome = if p1 <= 0.0 {
        0
    } else if p0 <= 0.0 {
        1
    } else {
        u8::from(rng.uniform() * (p0 + p1) >= p0)
    };
    let [b0, b1] = branches;
    let (v, p) = if outcome == 0 { (b0, p0) } else { (b1, p1) };
    Ok((outcome, StateVector::from_dvector_unchecked(v / Complex64::new(p.sqrt(), 0.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{spin_state, SpinLabel};

    #[test]
    fn eigenstate_is_deterministic() {
        let mut rng = RandomStream::new(1);
        for l in SpinLabel::ALL {
            for _ in 0..50 {
                let (o, post) = measure(&spin_state(l), l.basis(), 0, &mut rng).unwrap();
                assert_eq!(o, l.outcome());
                assert!(post.overlap(&spin_state(l)) > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_basis_is_fair() {
        let p = outcome_probabilities(&spin_state(SpinLabel::Up), MeasurementBasis::X, 0).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn post_state_is_normalized_eigenstate() {
        let mut rng = RandomStream::new(2);
        let (o, post) = measure(&spin_state(SpinLabel::Right), MeasurementBasis::Z, 0, &mut rng).unwrap();
        assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
        let expect = SpinLabel::from_basis_outcome(MeasurementBasis::Z, o);
        assert!(post.overlap(&spin_state(expect)) > 1.0 - 1e-12);
    }

    #[test]
    fn out_of_range_qubit() {
        let mut rng = RandomStream::new(0);
        assert!(matches!(
            measure(&spin_state(SpinLabel::Up), MeasurementBasis::Z, 1, &mut rng),
            Err(Error::QubitIndex { .. })
        ));
    }
}
