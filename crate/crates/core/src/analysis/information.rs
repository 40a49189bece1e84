//! What Bob knows about the committed bit before the reveal.
//!
//! Bob's view is classical (challenge subset, tested pairs and their
//! measurement results, declarations) plus the quantum state of the untested
//! particles. Exact mode enumerates every bit string and challenge and
//! compares the two classical-quantum states for `a = 0` and `a = 1`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stats::{Estimate, Provenance, DEFAULT_TRIALS};
use crate::adversary::Strategy;
use crate::error::{Error, Result};
use crate::par::fold_trials;
use crate::protocol::{make_declarations, run_session, EncodingRule, ProtocolParams, Scenario};
use crate::quantum::{trace_norm_hermitian, von_neumann_entropy_bits};
use crate::quantum::SpinLabel;
use crate::rng::RandomStream;

/// Largest `n0` handled by exact enumeration.
pub const MAX_EXACT_N0: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum InformationMode {
    /// Exact when the oracle is ideal and `n0` is small enough.
    #[default]
    Auto,
    Exact,
    MonteCarlo { trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BobInformation {
    pub tv_distance: Estimate,
    pub mutual_information_bits: Estimate,
    pub notes: Vec<String>,
}

/// Hiding is only defined for uniformly drawn oracle bits; chosen bits are refused.
pub fn bob_information(params: &ProtocolParams, mode: InformationMode, seed: u64) -> Result<BobInformation> {
    params.validate()?;
    if params.chosen_bits.is_some() {
        return Err(Error::param("protocol.chosen_bits", "hiding is reported for uniformly drawn oracle bits only"));
    }
    let ideal = params.oracle.is_ideal();
    match mode {
        InformationMode::Auto if ideal && params.n0 <= MAX_EXACT_N0 => exact(params),
        InformationMode::Auto => monte_carlo(params, DEFAULT_TRIALS, seed, vec![]),
        InformationMode::Exact if !ideal => monte_carlo(
            params,
            DEFAULT_TRIALS,
            seed,
            vec!["oracle knobs are non-zero: exact enumeration replaced by Monte Carlo".into()],
        ),
        InformationMode::Exact if params.n0 > MAX_EXACT_N0 => {
            Err(Error::param("protocol.n0", format!("exact enumeration supports n0 ≤ {MAX_EXACT_N0}")))
        }
        InformationMode::Exact => exact(params),
        InformationMode::MonteCarlo { trials } => monte_carlo(params, trials, seed, vec![]),
    }
}

/// Integer matrix `Σ ⊗ 2|ψ⟩⟨ψ|`, row-major.
#[derive(Clone, PartialEq, Eq)]
struct IntMatrix {
    dim: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0; dim * dim] }
    }

    fn product_state(labels: &[SpinLabel]) -> Self {
        let mut m = Self { dim: 1, data: vec![1] };
        for l in labels {
            let p = l.doubled_projector();
            let d = m.dim * 2;
            let mut data = vec![0; d * d];
            for r in 0..m.dim {
                for c in 0..m.dim {
                    let v = m.data[r * m.dim + c];
                    if v == 0 {
                        continue;
                    }
                    for (i, row) in p.iter().enumerate() {
                        for (j, &x) in row.iter().enumerate() {
                            data[(2 * r + i) * d + 2 * c + j] = v * x;
                        }
                    }
                }
            }
            m = Self { dim: d, data };
        }
        m
    }

    fn add(&mut self, o: &Self) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b;
        }
    }

    fn to_complex(&self, scale: f64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| Complex64::new(self.data[r * self.dim + c] as f64 * scale, 0.0))
    }
}

/// Bob's classical record: challenge mask, tested pairs, declared bases for bit 0.
type ViewKey = (u64, Vec<(u8, u8)>, Vec<u8>);

fn exact(params: &ProtocolParams) -> Result<BobInformation> {
    let (n0, tested) = (params.n0, params.tested());
    let m = n0 - tested;
    let rule = EncodingRule::standard();
    let subsets: Vec<u64> = (0u64..1 << n0).filter(|s| s.count_ones() as usize == tested).collect();
    let mut views: BTreeMap<ViewKey, [IntMatrix; 2]> = BTreeMap::new();

    for bits in 0u64..1 << (2 * n0) {
        let pairs: Vec<(u8, u8)> = (0..n0).map(|i| (((bits >> (2 * i)) & 1) as u8, ((bits >> (2 * i + 1)) & 1) as u8)).collect();
        for &mask in &subsets {
            let tested_pairs: Vec<(u8, u8)> = (0..n0).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let untested: Vec<(usize, SpinLabel)> =
                (0..n0).filter(|i| mask >> i & 1 == 0).map(|i| (i, rule.encode(pairs[i].0, pairs[i].1))).collect();
            let labels: Vec<SpinLabel> = untested.iter().map(|&(_, l)| l).collect();
            let rho = IntMatrix::product_state(&labels);
            for a in 0..2u8 {
                let declared: Vec<u8> = make_declarations(a, &untested).iter().map(|d| d.basis_if_zero.bit()).collect();
                let entry = views
                    .entry((mask, tested_pairs.clone(), declared))
                    .or_insert_with(|| [IntMatrix::zeros(1 << m), IntMatrix::zeros(1 << m)]);
                entry[a as usize].add(&rho);
            }
        }
    }

    let identical = views.values().all(|[w0, w1]| w0 == w1);
    let notes = vec![format!(
        "exact enumeration over {} bit strings × {} challenges, {} distinct classical views",
        1u64 << (2 * n0),
        subsets.len(),
        views.len()
    )];
    if identical {
        return Ok(BobInformation { tv_distance: Estimate::exact(0.0), mutual_information_bits: Estimate::exact(0.0), notes });
    }

    // Each conditional state has total weight 2^{2n0} · |subsets| · 2^m.
    let z = ((1u64 << (2 * n0)) as f64) * subsets.len() as f64 * (1u64 << m) as f64;
    let (mut tv, mut s_mix, mut s0, mut s1) = (0.0, 0.0, 0.0, 0.0);
    for [w0, w1] in views.values() {
        let (r0, r1) = (w0.to_complex(1.0 / z), w1.to_complex(1.0 / z));
        tv += 0.5 * trace_norm_hermitian(&(&r0 - &r1));
        s_mix += von_neumann_entropy_bits(&((&r0 + &r1) * Complex64::new(0.5, 0.0)));
        s0 += von_neumann_entropy_bits(&r0);
        s1 += von_neumann_entropy_bits(&r1);
    }
    let holevo = (s_mix - 0.5 * (s0 + s1)).max(0.0);
    Ok(BobInformation { tv_distance: Estimate::exact(tv.min(1.0)), mutual_information_bits: Estimate::exact(holevo), notes })
}

#[derive(Clone, Copy, Default)]
struct Counts {
    // [a][statistic], statistic 0/1 from a leaked basis bit, 2 when nothing leaked.
    n: [[u64; 3]; 2],
}

fn monte_carlo(params: &ProtocolParams, trials: u64, seed: u64, mut notes: Vec<String>) -> Result<BobInformation> {
    if trials == 0 {
        return Err(Error::param("trials", "at least one trial is required"));
    }
    let scenario = Scenario::default_line();
    let stream = RandomStream::new(seed);
    let counts = fold_trials(
        trials,
        &stream,
        Ok(Counts::default()),
        |r| {
            let t = run_session(&Strategy::Honest, params, &scenario, r)?;
            let mut c = Counts::default();
            let Some(a) = t.final_bit else {
                // Rejected before declarations: the view holds nothing about a, which was never chosen.
                c.n[usize::from(r.bit())][2] += 1;
                return Ok(c);
            };
            // Basis bit of particle i is the first of its two oracle bits.
            let stat = t
                .leaked
                .iter()
                .find_map(|&(j, b)| {
                    (j % 2 == 0)
                        .then(|| t.untested.iter().position(|&i| i == j / 2))
                        .flatten()
                        .map(|pos| (t.declarations[pos].basis_if_zero.bit() ^ b) as usize)
                })
                .unwrap_or(2);
            c.n[usize::from(a)][stat] += 1;
            Ok(c)
        },
        |a: Result<Counts>, b: Result<Counts>| {
            let (mut a, b) = (a?, b?);
            for (x, y) in a.n.iter_mut().flatten().zip(b.n.iter().flatten()) {
                *x += y;
            }
            Ok(a)
        },
    )?;

    // Guess the leaked statistic, else 0; the guess is Bayes-optimal, so
    // success = (1 + TV)/2 between the two views.
    let n = counts.n;
    let successes = n[0][0] + n[0][2] + n[1][1];
    let success = Estimate::from_counts(successes, trials);
    let tv = success.affine(2.0, -1.0).clamped(0.0, 1.0);
    let (tv_lo, tv_hi) = tv.ci();

    let total = trials as f64;
    let mut mi = 0.0;
    for s in 0..3 {
        let ps = (n[0][s] + n[1][s]) as f64 / total;
        for row in &n {
            let p = row[s] as f64 / total;
            let pa = row.iter().sum::<u64>() as f64 / total;
            if p > 0.0 {
                mi += p * (p / (pa * ps)).log2();
            }
        }
    }
    // For a uniform bit, 1 − h((1 − δ)/2) ≤ I ≤ δ with δ the TV distance.
    let h = |x: f64| if x <= 0.0 || x >= 1.0 { 0.0 } else { -x * x.log2() - (1.0 - x) * (1.0 - x).log2() };
    let mi = Estimate {
        value: mi.max(0.0),
        provenance: Provenance::MonteCarlo {
            trials,
            successes,
            confidence: super::stats::CONFIDENCE,
            ci_low: 1.0 - h((1.0 - tv_lo) / 2.0),
            ci_high: tv_hi,
            std_error: tv.std_error(),
        },
    };
    notes.push(format!(
        "Monte Carlo over {trials} honest sessions; TV from the optimal guess on leaked basis bits, MI plug-in with TV-derived bounds"
    ));
    Ok(BobInformation { tv_distance: tv, mutual_information_bits: mi, notes })
}
