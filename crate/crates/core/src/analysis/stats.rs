use serde::{Deserialize, Serialize};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;
pub const CONFIDENCE: f64 = 0.99;
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Where a reported number came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    MonteCarlo {
        trials: u64,
        successes: u64,
        confidence: f64,
        ci_low: f64,
        ci_high: f64,
        std_error: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub provenance: Provenance,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, provenance: Provenance::Exact }
    }

    /// Binomial frequency with a 99% Wilson interval.
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let (lo, hi) = wilson_interval(successes, trials, Z_99);
        Self {
            value: p,
            provenance: Provenance::MonteCarlo {
                trials,
                successes,
                confidence: CONFIDENCE,
                ci_low: lo,
                ci_high: hi,
                std_error: binomial_sigma(p, trials),
            },
        }
    }

    /// Frequency from trials whose individual outcome probabilities were all
    /// exactly 0 or 1: no sampling error, so the interval collapses.
    pub fn deterministic(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Self {
            value: p,
            provenance: Provenance::MonteCarlo {
                trials,
                successes,
                confidence: CONFIDENCE,
                ci_low: p,
                ci_high: p,
                std_error: 0.0,
            },
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.provenance, Provenance::Exact)
    }

    pub fn trials(&self) -> Option<u64> {
        match self.provenance {
            Provenance::Exact => None,
            Provenance::MonteCarlo { trials, .. } => Some(trials),
        }
    }

    pub fn std_error(&self) -> f64 {
        match self.provenance {
            Provenance::Exact => 0.0,
            Provenance::MonteCarlo { std_error, .. } => std_error,
        }
    }

    pub fn ci(&self) -> (f64, f64) {
        match self.provenance {
            Provenance::Exact => (self.value, self.value),
            Provenance::MonteCarlo { ci_low, ci_high, .. } => (ci_low, ci_high),
        }
    }

    pub fn ci_width(&self) -> f64 {
        let (lo, hi) = self.ci();
        hi - lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.ci();
        lo <= x && x <= hi
    }

    /// `|value − target| < n·σ`, σ the binomial standard deviation at `target`.
    pub fn within_sigma(&self, target: f64, n: f64) -> bool {
        match self.trials() {
            None => (self.value - target).abs() < 1e-12,
            Some(t) => {
                let s = binomial_sigma(target, t);
                if s == 0.0 {
                    self.value == target
                } else {
                    (self.value - target).abs() < n * s
                }
            }
        }
    }

    /// `a·x + b` with `a > 0`, interval mapped alongside.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        let provenance = match self.provenance {
            Provenance::Exact => Provenance::Exact,
            Provenance::MonteCarlo { trials, successes, confidence, ci_low, ci_high, std_error } => Provenance::MonteCarlo {
                trials,
                successes,
                confidence,
                ci_low: a * ci_low + b,
                ci_high: a * ci_high + b,
                std_error: a * std_error,
            },
        };
        Self { value: a * self.value + b, provenance }
    }

    /// Clamps value and interval into `[lo, hi]`.
    pub fn clamped(mut self, lo: f64, hi: f64) -> Self {
        self.value = self.value.clamp(lo, hi);
        if let Provenance::MonteCarlo { ci_low, ci_high, .. } = &mut self.provenance {
            *ci_low = ci_low.clamp(lo, hi);
            *ci_high = ci_high.clamp(lo, hi);
        }
        self
    }
}

pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / trials as f64).max(0.0).sqrt()
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 50/100 at 95%: (0.4038, 0.5962).
        let (lo, hi) = wilson_interval(50, 100, 1.959_963_984_540_054);
        assert!((lo - 0.403_831).abs() < 1e-5 && (hi - 0.596_169).abs() < 1e-5);
        let (lo, hi) = wilson_interval(0, 10, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.3 && hi < 0.5);
    }

    #[test]
    fn deterministic_has_zero_width() {
        let e = Estimate::deterministic(100, 100);
        assert_eq!(e.value, 1.0);
        assert_eq!(e.ci_width(), 0.0);
        assert!(Estimate::from_counts(100, 100).ci_width() > 0.0);
    }

    #[test]
    fn affine_maps_interval() {
        let e = Estimate::from_counts(60, 100).affine(2.0, -1.0);
        assert!((e.value - 0.2).abs() < 1e-12);
        assert!(e.contains(0.2));
    }
}
