use num_complex::Complex64;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{verify_reveal, Declaration, RevealCheck, SessionTranscript};
use crate::quantum::{spin_state, SpinLabel, StateVector};
use crate::rng::RandomStream;

/// How Alice picks a label in a basis she knows is wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuessRule {
    /// Either eigenstate of the declared basis with probability 1/2.
    #[default]
    Uniform,
    /// Always the outcome-0 eigenstate.
    First,
}

impl GuessRule {
    fn pick(self, basis: crate::quantum::MeasurementBasis, rng: &mut RandomStream) -> SpinLabel {
        match self {
            GuessRule::Uniform => SpinLabel::from_basis_outcome(basis, rng.bit()),
            GuessRule::First => SpinLabel::from_basis_outcome(basis, 0),
        }
    }
}

/// Declarations and opening claim of a declaration-flipping Alice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipPlan {
    pub declarations: Vec<Declaration>,
    pub claims: Vec<SpinLabel>,
    /// Positions (into the untested list) whose declaration is false for the target.
    pub falsified: Vec<usize>,
}

/// Declares `k` randomly chosen untested particles in the wrong basis for
/// `target` and builds the claim for opening `target`.
///
/// With `k = 0` this is the honest commitment to `target`.
pub fn classical_flip_attack(
    untested: &[(usize, SpinLabel)],
    k: usize,
    target: u8,
    guess: GuessRule,
    rng: &mut RandomStream,
) -> Result<FlipPlan> {
    if k > untested.len() {
        return Err(Error::param("adversary.k", format!("{k} false declarations exceed {} untested particles", untested.len())));
    }
    let mut order: Vec<usize> = (0..untested.len()).collect();
    let (chosen, _) = order.partial_shuffle(rng, k);
    let mut falsified = chosen.to_vec();
    falsified.sort_unstable();

    let mut declarations = Vec::with_capacity(untested.len());
    let mut claims = Vec::with_capacity(untested.len());
    for (pos, &(particle, label)) in untested.iter().enumerate() {
        if falsified.binary_search(&pos).is_ok() {
            let declared = label.basis().conjugate();
            declarations.push(Declaration::binding(particle, target, declared));
            claims.push(guess.pick(declared, rng));
        } else {
            declarations.push(Declaration::binding(particle, target, label.basis()));
            claims.push(label);
        }
    }
    Ok(FlipPlan { declarations, claims, falsified })
}

/// Alice's best attempt, after the declarations in `t`, to open `bit`:
/// true labels where the declared basis is right, a guess elsewhere.
pub fn reveal_attempt(t: &SessionTranscript, bit: u8, guess: GuessRule, rng: &mut RandomStream) -> Result<RevealCheck> {
    if t.declarations.len() != t.untested.len() {
        return Err(Error::Stage("transcript has no declarations".into()));
    }
    let mut claims = Vec::with_capacity(t.untested.len());
    let mut stored: Vec<StateVector> = Vec::with_capacity(t.untested.len());
    for (d, &i) in t.declarations.iter().zip(&t.untested) {
        let truth = t.spin_labels[i];
        let basis = d.basis_for(bit);
        claims.push(if basis == truth.basis() { truth } else { guess.pick(basis, rng) });
        stored.push(spin_state(truth));
    }
    verify_reveal(bit, &claims, &t.declarations, &stored, rng)
}

/// `α|00⟩ + β|11⟩` on (commit qubit, Alice's ancilla).
pub fn entangled_commit(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let zero = Complex64::new(0.0, 0.0);
    StateVector::new(vec![alpha, zero, zero, beta])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::make_declarations;
    use crate::quantum::{measure, partial_trace, DensityMatrix, MeasurementBasis};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn untested() -> Vec<(usize, SpinLabel)> {
        vec![(2, SpinLabel::Up), (5, SpinLabel::Right), (7, SpinLabel::Left), (9, SpinLabel::Down)]
    }

    #[test]
    fn zero_flips_is_honest() {
        let mut rng = RandomStream::new(1);
        let plan = classical_flip_attack(&untested(), 0, 1, GuessRule::Uniform, &mut rng).unwrap();
        assert_eq!(plan.declarations, make_declarations(1, &untested()));
        assert_eq!(plan.claims, untested().iter().map(|p| p.1).collect::<Vec<_>>());
    }

    #[test]
    fn k_declarations_are_false() {
        let mut rng = RandomStream::new(2);
        let u = untested();
        let plan = classical_flip_attack(&u, 3, 0, GuessRule::First, &mut rng).unwrap();
        let wrong = u.iter().zip(&plan.declarations).filter(|((_, l), d)| d.basis_for(0) != l.basis()).count();
        assert_eq!(wrong, 3);
        assert_eq!(plan.falsified.len(), 3);
        for (c, d) in plan.claims.iter().zip(&plan.declarations) {
            assert_eq!(c.basis(), d.basis_for(0));
        }
        assert!(classical_flip_attack(&u, 5, 0, GuessRule::Uniform, &mut rng).is_err());
    }

    #[test]
    fn entangled_commit_anchors() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let s = entangled_commit(one, zero).unwrap();
        let r = partial_trace(&s, &[0]).unwrap();
        assert!((r.purity() - 1.0).abs() < 1e-12);

        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let s = entangled_commit(h, h).unwrap();
        let r = partial_trace(&s, &[0]).unwrap();
        assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-12);
        assert!(entangled_commit(one, one).is_err());
    }

    #[test]
    fn ancilla_measurement_fixes_commit_qubit() {
        let s = entangled_commit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        let mut rng = RandomStream::new(3);
        for _ in 0..20 {
            let (a, post) = measure(&s, MeasurementBasis::Z, 1, &mut rng).unwrap();
            let (c, _) = measure(&post, MeasurementBasis::Z, 0, &mut rng).unwrap();
            assert_eq!(a, c);
        }
    }
}
