//! Reference computations that share no code with the library's quantum
//! layer: explicit amplitudes, closed-form 2×2 algebra and brute force.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Amplitudes of up/down/left/right, written out by hand.
pub fn bb84(label: usize) -> [C; 2] {
    match label {
        0 => [c(1.0), c(0.0)],
        1 => [c(0.0), c(1.0)],
        2 => [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
        _ => [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
    }
}

/// Pass probability of a reveal with `k` particles declared in the wrong
/// basis: every claim string and every outcome string is enumerated.
///
/// Each mismatched particle is `|0⟩` measured in {|−⟩, |+⟩} (any mismatch is
/// equivalent by symmetry); the claim is uniform over the declared basis.
pub fn brute_force_pass_probability(k: usize) -> f64 {
    let basis = [bb84(2), bb84(3)];
    let state = bb84(0);
    let born: Vec<f64> = basis.iter().map(|e| (e[0].conj() * state[0] + e[1].conj() * state[1]).norm_sqr()).collect();
    let mut total = 0.0;
    for claim in 0u32..1 << k {
        for outcome in 0u32..1 << k {
            if claim != outcome {
                continue;
            }
            let p: f64 = (0..k).map(|i| born[((outcome >> i) & 1) as usize]).product();
            total += p / f64::from(1u32 << k);
        }
    }
    total
}

pub type M2 = [[C; 2]; 2];

pub fn m2_from_state(v: [C; 2]) -> M2 {
    [[v[0] * v[0].conj(), v[0] * v[1].conj()], [v[1] * v[0].conj(), v[1] * v[1].conj()]]
}

/// Square root of a 2×2 positive semidefinite matrix:
/// `√ρ = (ρ + √det ρ · I) / √(tr ρ + 2√det ρ)`.
pub fn sqrt_psd2(r: M2) -> M2 {
    let det = (r[0][0] * r[1][1] - r[0][1] * r[1][0]).re.max(0.0);
    let s = det.sqrt();
    let t = (r[0][0].re + r[1][1].re + 2.0 * s).sqrt();
    [[(r[0][0] + s) / t, r[0][1] / t], [r[1][0] / t, (r[1][1] + s) / t]]
}

/// `(√ρ ⊗ I) Σ_i |i⟩|i⟩`, indices `2·system + purifier`.
pub fn purification2(r: M2) -> [C; 4] {
    let s = sqrt_psd2(r);
    [s[0][0], s[0][1], s[1][0], s[1][1]]
}

/// `e^{iα}cosθ, e^{iβ}sinθ; −e^{−iβ}sinθ, e^{−iα}cosθ` (global phase dropped).
fn su2(theta: f64, alpha: f64, beta: f64) -> M2 {
    [
        [C::from_polar(theta.cos(), alpha), C::from_polar(theta.sin(), beta)],
        [-C::from_polar(theta.sin(), -beta), C::from_polar(theta.cos(), -alpha)],
    ]
}

fn overlap_with_rotation(psi0: [C; 4], psi1: [C; 4], u: M2) -> f64 {
    // ⟨ψ₁|(I ⊗ U)|ψ₀⟩
    let mut acc = c(0.0);
    for s in 0..2 {
        for j in 0..2 {
            let rotated = u[j][0] * psi0[2 * s] + u[j][1] * psi0[2 * s + 1];
            acc += psi1[2 * s + j].conj() * rotated;
        }
    }
    acc.norm()
}

/// Brute-force `max_U |⟨ψ₁|(I ⊗ U)|ψ₀⟩|` over single-qubit purifier unitaries:
/// a dense grid followed by shrinking local search.
pub fn brute_force_max_overlap(rho0: M2, rho1: M2) -> f64 {
    let (p0, p1) = (purification2(rho0), purification2(rho1));
    let f = |x: [f64; 3]| overlap_with_rotation(p0, p1, su2(x[0], x[1], x[2]));
    let n = 48;
    let mut best = (f64::MIN, [0.0; 3]);
    for i in 0..=n {
        for j in 0..n {
            for k in 0..n {
                let x = [i as f64 * PI / 2.0 / n as f64, j as f64 * TAU / n as f64, k as f64 * TAU / n as f64];
                let v = f(x);
                if v > best.0 {
                    best = (v, x);
                }
            }
        }
    }
    let mut step = TAU / n as f64;
    while step > 1e-12 {
        let mut moved = false;
        for d in 0..3 {
            for s in [-1.0, 1.0] {
                let mut x = best.1;
                x[d] += s * step;
                let v = f(x);
                if v > best.0 {
                    best = (v, x);
                    moved = true;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    best.0
}

/// Best `p0 + p1` for a purifying Alice: for two rank-one acceptance
/// projectors onto unit vectors with overlap `c`, the largest eigenvalue of
/// their sum is `1 + c`.
pub fn brute_force_cheat_sum(rho0: M2, rho1: M2) -> f64 {
    1.0 + brute_force_max_overlap(rho0, rho1)
}

/// Pearson χ² statistic for observed counts against expected probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// χ² critical value, one degree of freedom, p = 0.001.
pub const CHI2_1DOF_999: f64 = 10.828;
