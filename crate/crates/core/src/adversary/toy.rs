//! Finite commitments with a purifying Alice.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{canonical_purification, fidelity, uhlmann_rotation, DensityMatrix, StateVector, Unitary, OPTIMIZATION_TOL};

/// Bob holds the commit state; to open bit `b` Alice hands over her
/// purifier and Bob projects onto the honest joint state `|ψ_b⟩`.
#[derive(Debug, Clone)]
pub struct ToyBcProtocol {
    commit_states: [DensityMatrix; 2],
    purifier_dim: usize,
    openings: [StateVector; 2],
}

impl ToyBcProtocol {
    /// Largest joint (system ⊗ purifier) dimension handled.
    pub const MAX_DIM: usize = 64;

    /// Purifier as large as the committed system.
    pub fn new(rho0: DensityMatrix, rho1: DensityMatrix) -> Result<Self> {
        let p = rho0.dim();
        Self::with_purifier_dim(rho0, rho1, p)
    }

    pub fn with_purifier_dim(rho0: DensityMatrix, rho1: DensityMatrix, purifier_dim: usize) -> Result<Self> {
        if rho0.dim() != rho1.dim() {
            return Err(Error::Dimension(format!("commit states of dimension {} and {}", rho0.dim(), rho1.dim())));
        }
        if rho0.dim() * purifier_dim > Self::MAX_DIM {
            return Err(Error::Dimension(format!(
                "joint dimension {} exceeds {}",
                rho0.dim() * purifier_dim,
                Self::MAX_DIM
            )));
        }
        let openings = [canonical_purification(&rho0, purifier_dim)?, canonical_purification(&rho1, purifier_dim)?];
        Ok(Self { commit_states: [rho0, rho1], purifier_dim, openings })
    }

    pub fn from_pure(psi0: &StateVector, psi1: &StateVector) -> Result<Self> {
        Self::new(psi0.density(), psi1.density())
    }

    pub fn commit_state(&self, bit: u8) -> &DensityMatrix {
        &self.commit_states[usize::from(bit & 1)]
    }

    pub fn purifier_dim(&self) -> usize {
        self.purifier_dim
    }

    pub fn honest_opening(&self, bit: u8) -> &StateVector {
        &self.openings[usize::from(bit & 1)]
    }

    /// `|ψ_b⟩⟨ψ_b|` on system ⊗ purifier.
    pub fn accept_projector(&self, bit: u8) -> DMatrix<Complex64> {
        let v = DMatrix::from_column_slice(self.honest_opening(bit).dim(), 1, self.honest_opening(bit).amplitudes());
        &v * v.adjoint()
    }

    /// Probability that Bob accepts `joint` as an opening of `bit`.
    pub fn acceptance(&self, bit: u8, joint: &StateVector) -> Result<f64> {
        let psi = self.honest_opening(bit);
        if joint.dim() != psi.dim() {
            return Err(Error::Dimension(format!("opening of dimension {} for a {}-dim test", joint.dim(), psi.dim())));
        }
        Ok(psi.overlap(joint))
    }

    pub fn fidelity(&self) -> Result<f64> {
        fidelity(&self.commit_states[0], &self.commit_states[1])
    }
}

/// Acceptance probabilities of a purifying Alice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurificationOutcome {
    pub p0: f64,
    pub p1: f64,
    pub p_sum: f64,
    pub fidelity: f64,
    /// Same attack with a unitary found by direct numerical search.
    pub numerical_p_sum: f64,
    /// Commit the honest `|ψ₀⟩`, rotate only when opening 1: `(1, F)`.
    pub rotate_after_honest: [f64; 2],
}

/// Alice commits a state halfway between `|ψ₀⟩` and `(I ⊗ U†)|ψ₁⟩`, where
/// `U` is the Uhlmann rotation, and applies `U` to her purifier if she opens
/// 1. Both openings then pass with probability `(1 + √F)/2`.
pub fn purification_attack(protocol: &ToyBcProtocol) -> Result<PurificationOutcome> {
    let u = uhlmann_rotation(protocol.commit_state(0), protocol.commit_state(1), protocol.purifier_dim())?;
    let (p0, p1) = bisector_attack(protocol, &u)?;

    let psi0 = protocol.honest_opening(0);
    let rotate_after_honest = [protocol.acceptance(0, psi0)?, protocol.acceptance(1, &u.apply_to_purifier(psi0)?)?];

    let (_, v) = numerical_max_purifier_overlap(psi0, protocol.honest_opening(1), protocol.purifier_dim())?;
    let (q0, q1) = bisector_attack(protocol, &v)?;

    Ok(PurificationOutcome {
        p0,
        p1,
        p_sum: p0 + p1,
        fidelity: protocol.fidelity()?,
        numerical_p_sum: q0 + q1,
        rotate_after_honest,
    })
}

fn bisector_attack(protocol: &ToyBcProtocol, u: &Unitary) -> Result<(f64, f64)> {
    let psi0 = protocol.honest_opening(0);
    let chi = u.adjoint().apply_to_purifier(protocol.honest_opening(1))?;
    let ip = psi0.inner(&chi);
    let phase = if ip.norm() > 1e-15 { ip.conj() / ip.norm() } else { Complex64::new(1.0, 0.0) };
    let mid: Vec<Complex64> = psi0.amplitudes().iter().zip(chi.amplitudes()).map(|(a, b)| a + b * phase).collect();
    let commit = StateVector::normalized(mid)?;
    Ok((protocol.acceptance(0, &commit)?, protocol.acceptance(1, &u.apply_to_purifier(&commit)?)?))
}

/// Maximizes `|⟨ψ₁|(I ⊗ V)|ψ₀⟩|` over unitaries `V` on the trailing
/// `purifier_dim` factor by sweeps of two-level rotations (grid, then
/// pattern-search refinement). Returns the overlap and the maximizer.
pub fn numerical_max_purifier_overlap(psi0: &StateVector, psi1: &StateVector, purifier_dim: usize) -> Result<(f64, Unitary)> {
    let p = purifier_dim;
    if psi0.dim() != psi1.dim() || p == 0 || !psi0.dim().is_multiple_of(p) {
        return Err(Error::Dimension(format!("states of dimension {}/{} with purifier {p}", psi0.dim(), psi1.dim())));
    }
    // ⟨ψ₁|(I⊗V)|ψ₀⟩ = Tr(V K), K_ij = Σ_s ψ₀[s,i] conj(ψ₁[s,j]).
    let (a0, a1) = (psi0.amplitudes(), psi1.amplitudes());
    let k = DMatrix::from_fn(p, p, |i, j| {
        (0..psi0.dim() / p).map(|s| a0[s * p + i] * a1[s * p + j].conj()).sum::<Complex64>()
    });
    let mut v = DMatrix::<Complex64>::identity(p, p);
    let mut best = (&v * &k).trace().norm();
    if p == 1 {
        return Ok((best, Unitary::new(v)?));
    }
    for _ in 0..200 {
        let start = best;
        for a in 0..p {
            for b in a + 1..p {
                let m = &v * &k;
                let rest: Complex64 = (0..p).filter(|&r| r != a && r != b).map(|r| m[(r, r)]).sum();
                let block = [m[(a, a)], m[(a, b)], m[(b, a)], m[(b, b)]];
                let (value, g) = optimize_two_level(rest, block);
                if value > best + 1e-15 {
                    best = value;
                    let (ra, rb) = (v.row(a).into_owned(), v.row(b).into_owned());
                    v.set_row(a, &(ra.clone() * g[0] + rb.clone() * g[1]));
                    v.set_row(b, &(ra * g[2] + rb * g[3]));
                }
            }
        }
        if best - start < OPTIMIZATION_TOL * 1e-6 {
            break;
        }
    }
    Ok((best, Unitary::new(v)?))
}

// G = e^{iφ} [[e^{iα}cosθ, e^{iβ}sinθ], [−e^{−iβ}sinθ, e^{−iα}cosθ]], row-major.
fn two_level(x: [f64; 4]) -> [Complex64; 4] {
    let [theta, alpha, beta, phi] = x;
    let g = Complex64::from_polar(1.0, phi);
    let (c, s) = (theta.cos(), theta.sin());
    [
        g * Complex64::from_polar(c, alpha),
        g * Complex64::from_polar(s, beta),
        -g * Complex64::from_polar(s, -beta),
        g * Complex64::from_polar(c, -alpha),
    ]
}

fn optimize_two_level(rest: Complex64, m: [Complex64; 4]) -> (f64, [Complex64; 4]) {
    // Tr(G M) restricted to the block: G_aa M_aa + G_ab M_ba + G_ba M_ab + G_bb M_bb.
    let f = |x: [f64; 4]| {
        let g = two_level(x);
        (rest + g[0] * m[0] + g[1] * m[2] + g[2] * m[1] + g[3] * m[3]).norm()
    };
    let tau = std::f64::consts::TAU;
    let (nt, na) = (9usize, 12usize);
    let mut best_x = [0.0; 4];
    let mut best = f(best_x);
    for it in 0..nt {
        let theta = it as f64 * std::f64::consts::FRAC_PI_2 / (nt - 1) as f64;
        for ia in 0..na {
            for ib in 0..na {
                for ip in 0..na {
                    let x = [theta, ia as f64 * tau / na as f64, ib as f64 * tau / na as f64, ip as f64 * tau / na as f64];
                    let val = f(x);
                    if val > best {
                        best = val;
                        best_x = x;
                    }
                }
            }
        }
    }
    let mut step = tau / na as f64;
    while step > 1e-10 {
        let mut improved = false;
        for d in 0..4 {
            for sign in [1.0, -1.0] {
                let mut x = best_x;
                x[d] += sign * step;
                let val = f(x);
                if val > best {
                    best = val;
                    best_x = x;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, two_level(best_x))
}
