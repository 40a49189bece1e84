//! Hiding against binding for the commit pair `|0⟩`, `cos θ|0⟩ + sin θ|1⟩`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::adversary::{purification_attack, ToyBcProtocol};
use crate::error::{Error, Result};
use crate::par::map_ordered;
use crate::quantum::{fidelity, trace_distance, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub theta: f64,
    /// `|⟨0|θ⟩|² = cos²θ`.
    pub fidelity: f64,
    /// Bob's optimal guessing advantage `(1/2)√(1 − F)`.
    pub epsilon_bob: f64,
    /// Same advantage from the trace distance, `(1/2)·D(ρ₀, ρ₁)`.
    pub epsilon_numeric: f64,
    /// `1 + √F`.
    pub p_sum: f64,
    /// Achieved by the purification attack.
    pub p_sum_attack: f64,
    pub p_sum_numerical: f64,
}

/// `n + 1` evenly spaced angles from 0 to π/2 inclusive.
pub fn theta_grid(n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| if i == n { FRAC_PI_2 } else { i as f64 * FRAC_PI_2 / n as f64 }).collect()
}

fn commit_pair(theta: f64) -> Result<(StateVector, StateVector)> {
    // Exact endpoints; cos(π/2) is 6e-17 in floating point.
    let (c, s) = if theta == FRAC_PI_2 { (0.0, 1.0) } else { (theta.cos(), theta.sin()) };
    Ok((StateVector::from_real(&[1.0, 0.0])?, StateVector::from_real(&[c, s])?))
}

pub fn nogo_tradeoff_sweep(thetas: &[f64]) -> Result<Vec<TradeoffRow>> {
    if let Some(&bad) = thetas.iter().find(|t| !(0.0..=FRAC_PI_2).contains(*t)) {
        return Err(Error::param("analysis.thetas", format!("θ = {bad} outside [0, π/2]")));
    }
    map_ordered(thetas.to_vec(), |theta| -> Result<TradeoffRow> {
        let (a, b) = commit_pair(theta)?;
        let f = a.overlap(&b);
        let (ra, rb) = (a.density(), b.density());
        let f_check = fidelity(&ra, &rb)?;
        if (f - f_check).abs() > 1e-9 {
            return Err(Error::Stage(format!("fidelity mismatch at θ = {theta}: {f} vs {f_check}")));
        }
        let attack = purification_attack(&ToyBcProtocol::new(ra.clone(), rb.clone())?)?;
        Ok(TradeoffRow {
            theta,
            fidelity: f,
            epsilon_bob: 0.5 * (1.0 - f).sqrt(),
            epsilon_numeric: 0.5 * trace_distance(&ra, &rb)?,
            p_sum: 1.0 + f.sqrt(),
            p_sum_attack: attack.p_sum,
            p_sum_numerical: attack.numerical_p_sum,
        })
    })
    .into_iter()
    .collect()
}
