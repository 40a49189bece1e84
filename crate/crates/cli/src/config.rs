//! TOML experiment configuration. Sections mirror the library modules.

use std::path::PathBuf;

use qcommit::adversary::{GuessRule, Strategy};
use qcommit::analysis::InformationMode;
use qcommit::protocol::{InjectedFault, OracleKnobs, ProtocolParams, Scenario, SecurityBounds, Timing};
use qcommit::quantum::Complex64;
use qcommit::spacetime::{Layout, Party, Site, SiteId};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Repeated sessions of one strategy, with a relativistic report on the first.
    Sessions,
    /// Detection probability of `k` false declarations for each listed `k`.
    FlipSweep,
    /// Reveal statistics of entangled commitments.
    Entangle,
    /// Fidelity sweep of the toy commitment and the purification attack.
    Nogo,
    /// Honest and attack runs against an imperfect oracle.
    Degradation,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Summary,
    Machine,
    #[default]
    Both,
}

impl Format {
    pub fn summary(self) -> bool {
        self != Format::Machine
    }

    pub fn machine(self) -> bool {
        self != Format::Summary
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    #[serde(default)]
    pub description: String,
    pub experiment: ExperimentKind,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub spacetime: SpacetimeSection,
    #[serde(default)]
    pub adversary: AdversarySection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub expect: Expectations,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_trials() -> u64 {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub m: usize,
    pub n0: usize,
    pub n1: u32,
    pub min_ratio: usize,
    pub suspension_rounds: u32,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub epsilon_double_prime: f64,
    pub oracle_flip: f64,
    pub oracle_leak: f64,
    pub chosen_bits: Option<Vec<u8>>,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            m: 16,
            n0: 64,
            n1: 64,
            min_ratio: ProtocolParams::DEFAULT_MIN_RATIO,
            suspension_rounds: 2,
            epsilon: 0.0,
            epsilon_prime: 0.0,
            epsilon_double_prime: 0.0,
            oracle_flip: 0.0,
            oracle_leak: 0.0,
            chosen_bits: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteSpec {
    pub name: String,
    pub party: PartySpec,
    /// Position at t = 0; a bare number is an x coordinate.
    pub position: Coordinates,
    #[serde(default)]
    pub velocity: Option<Coordinates>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartySpec {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coordinates {
    X(f64),
    Xyz([f64; 3]),
}

impl Coordinates {
    fn xyz(self) -> [f64; 3] {
        match self {
            Coordinates::X(x) => [x, 0.0, 0.0],
            Coordinates::Xyz(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpacetimeSection {
    /// Site pairs of the default line layout; ignored when `sites` is given.
    pub pairs: usize,
    pub spacing: f64,
    /// Explicit layout; the first site is Bob's reference site.
    pub sites: Option<Vec<SiteSpec>>,
    pub spin_delay: f64,
    pub processing: f64,
    pub heartbeat_interval: f64,
    pub fault: Option<FaultSpec>,
}

impl Default for SpacetimeSection {
    fn default() -> Self {
        let t = Timing::default();
        Self {
            pairs: 2,
            spacing: 1.0,
            sites: None,
            spin_delay: t.spin_delay,
            processing: t.processing,
            heartbeat_interval: t.heartbeat_interval,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    pub tag: String,
    pub speed_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    #[default]
    Honest,
    ClassicalFlip,
    EntangledCommit,
    PurificationAttack,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdversarySection {
    pub strategy: StrategyKind,
    pub k: usize,
    pub target: u8,
    pub guess: GuessRule,
    /// `|α|²` of an entangled commitment; the entangle experiment takes a list.
    pub alpha2: Vec<f64>,
    /// Relative phase of `β`, radians.
    pub phase: f64,
    /// False-declaration counts for the flip sweep.
    pub ks: Vec<usize>,
}

impl Default for AdversarySection {
    fn default() -> Self {
        Self { strategy: StrategyKind::Honest, k: 1, target: 1, guess: GuessRule::Uniform, alpha2: vec![0.5], phase: 0.0, ks: (1..=8).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InformationSpec {
    #[default]
    Auto,
    Exact,
    MonteCarlo,
    /// Skip the estimate.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub information: InformationSpec,
    /// Defaults to the experiment's trial count.
    pub information_trials: Option<u64>,
    /// Cheat-sum sampling on top of the session tally.
    pub cheat_sum: bool,
    pub theta_steps: usize,
    /// Sessions written to the transcript log.
    pub transcripts: usize,
    /// Counts of conjugate-basis particles for the cut-and-choose soundness curve.
    pub soundness_bad: Vec<usize>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self { information: InformationSpec::Auto, information_trials: None, cheat_sum: true, theta_steps: 12, transcripts: 1, soundness_bad: vec![] }
    }
}

/// Self-checks; each is evaluated only when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Expectations {
    /// Exact when 1 or 0, otherwise within `sigma`.
    pub accept_rate: Option<f64>,
    pub revealed_matches_committed: Option<bool>,
    /// Every evaluated `p_sum`.
    pub p_sum: Option<f64>,
    pub within_bound: Option<bool>,
    pub detection_matches_exact: Option<bool>,
    pub soundness_matches_exact: Option<bool>,
    pub reveal_frequency_matches: Option<bool>,
    pub toy_p_sum: Option<f64>,
    pub endpoints_exact: Option<bool>,
    pub attack_matches_closed_form: Option<bool>,
    pub degraded: Option<bool>,
    pub causal_abort: Option<bool>,
    pub violation_tag: Option<String>,
    pub violations: Option<usize>,
    pub sigma: f64,
    pub tolerance: f64,
}

impl Default for Expectations {
    fn default() -> Self {
        Self {
            accept_rate: None,
            revealed_matches_committed: None,
            p_sum: None,
            within_bound: None,
            detection_matches_exact: None,
            soundness_matches_exact: None,
            reveal_frequency_matches: None,
            toy_p_sum: None,
            endpoints_exact: None,
            attack_matches_closed_form: None,
            degraded: None,
            causal_abort: None,
            violation_tag: None,
            violations: None,
            sigma: 4.0,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Everything a run needs, checked and converted to library types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub params: ProtocolParams,
    pub scenario: Scenario,
    pub strategy: Strategy,
    pub information: Option<InformationMode>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_owned()))
    }

    pub fn params(&self) -> Result<ProtocolParams, CliError> {
        let p = &self.protocol;
        let params = ProtocolParams {
            m: p.m,
            n0: p.n0,
            n1: p.n1,
            bounds: SecurityBounds { epsilon: p.epsilon, epsilon_prime: p.epsilon_prime, epsilon_double_prime: p.epsilon_double_prime },
            oracle: OracleKnobs { flip_probability: p.oracle_flip, leak_probability: p.oracle_leak },
            seed: self.seed,
            min_ratio: p.min_ratio,
            suspension_rounds: p.suspension_rounds,
            chosen_bits: p.chosen_bits.clone(),
        };
        params.validate().map_err(config_error)?;
        Ok(params)
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let s = &self.spacetime;
        let layout = match &s.sites {
            None => Layout::default_line(s.pairs, s.spacing).map_err(config_error)?,
            Some(specs) => {
                let sites = specs
                    .iter()
                    .enumerate()
                    .map(|(i, spec)| {
                        let party = match spec.party {
                            PartySpec::Alice => Party::Alice,
                            PartySpec::Bob => Party::Bob,
                        };
                        let velocity = spec.velocity.map_or([0.0; 3], Coordinates::xyz);
                        Site::new(SiteId(i as u16), spec.name.clone(), party, spec.position.xyz(), velocity)
                    })
                    .collect::<qcommit::Result<Vec<_>>>()
                    .map_err(config_error)?;
                Layout::new(sites).map_err(config_error)?
            }
        };
        for (field, v) in [("spacetime.spin_delay", s.spin_delay), ("spacetime.processing", s.processing)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::field(field, "must be a non-negative number"));
            }
        }
        if !(s.heartbeat_interval > 0.0 && s.heartbeat_interval.is_finite()) {
            return Err(CliError::field("spacetime.heartbeat_interval", "must be positive"));
        }
        let fault = match &s.fault {
            Some(f) if !(f.speed_factor > 0.0 && f.speed_factor.is_finite()) => {
                return Err(CliError::field("spacetime.fault.speed_factor", "must be positive"));
            }
            Some(f) => Some(InjectedFault { tag: f.tag.clone(), speed_factor: f.speed_factor }),
            None => None,
        };
        Ok(Scenario {
            layout,
            timing: Timing { spin_delay: s.spin_delay, processing: s.processing, heartbeat_interval: s.heartbeat_interval },
            fault,
        })
    }

    /// Single strategy named in `[adversary]`; for the entangle experiment the first `alpha2`.
    pub fn strategy(&self) -> Result<Strategy, CliError> {
        let a = &self.adversary;
        Ok(match a.strategy {
            StrategyKind::Honest => Strategy::Honest,
            StrategyKind::ClassicalFlip => Strategy::ClassicalFlip { k: a.k, target: a.target, guess: a.guess },
            StrategyKind::EntangledCommit => {
                entangled(*a.alpha2.first().ok_or_else(|| CliError::field("adversary.alpha2", "needs at least one value"))?, a.phase)?
            }
            StrategyKind::PurificationAttack => Strategy::PurificationAttack { target: a.target },
        })
    }

    pub fn information(&self) -> Option<InformationMode> {
        let trials = self.analysis.information_trials.unwrap_or(self.trials);
        match self.analysis.information {
            InformationSpec::Auto => Some(InformationMode::Auto),
            InformationSpec::Exact => Some(InformationMode::Exact),
            InformationSpec::MonteCarlo => Some(InformationMode::MonteCarlo { trials }),
            InformationSpec::Off => None,
        }
    }

    /// Parses every section into library types and checks cross-field constraints.
    pub fn resolve(self) -> Result<Resolved, CliError> {
        if self.scenario.trim().is_empty() {
            return Err(CliError::field("scenario", "must be a non-empty name"));
        }
        if self.trials == 0 {
            return Err(CliError::field("trials", "must be at least 1"));
        }
        let params = self.params()?;
        let scenario = self.scenario()?;
        let strategy = self.strategy()?;
        strategy.validate(&params).map_err(config_error)?;
        let a = &self.adversary;
        match self.experiment {
            ExperimentKind::FlipSweep => {
                if a.ks.is_empty() {
                    return Err(CliError::field("adversary.ks", "needs at least one value"));
                }
                if let Some(&k) = a.ks.iter().find(|&&k| k > params.m) {
                    return Err(CliError::field("adversary.ks", format!("{k} exceeds m = {}", params.m)));
                }
            }
            ExperimentKind::Entangle => {
                for &x in &a.alpha2 {
                    entangled(x, a.phase)?;
                }
                if a.alpha2.is_empty() {
                    return Err(CliError::field("adversary.alpha2", "needs at least one value"));
                }
            }
            ExperimentKind::Nogo => {
                if self.analysis.theta_steps == 0 {
                    return Err(CliError::field("analysis.theta_steps", "must be at least 1"));
                }
            }
            ExperimentKind::Sessions | ExperimentKind::Degradation => {}
        }
        if let Some(&b) = self.analysis.soundness_bad.iter().find(|&&b| b > params.n0) {
            return Err(CliError::field("analysis.soundness_bad", format!("{b} exceeds protocol.n0 = {}", params.n0)));
        }
        if self.analysis.information == InformationSpec::Exact && params.n0 > qcommit::analysis::MAX_EXACT_N0 {
            return Err(CliError::field(
                "analysis.information",
                format!("exact enumeration needs protocol.n0 ≤ {}", qcommit::analysis::MAX_EXACT_N0),
            ));
        }
        if !(self.expect.sigma > 0.0 && self.expect.tolerance >= 0.0) {
            return Err(CliError::field("expect.sigma", "sigma must be positive and tolerance non-negative"));
        }
        let information = self.information();
        Ok(Resolved { config: self, params, scenario, strategy, information })
    }
}

pub fn entangled(alpha2: f64, phase: f64) -> Result<Strategy, CliError> {
    if !(0.0..=1.0).contains(&alpha2) {
        return Err(CliError::field("adversary.alpha2", format!("{alpha2} is outside [0, 1]")));
    }
    Ok(Strategy::EntangledCommit {
        alpha: Complex64::new(alpha2.sqrt(), 0.0),
        beta: Complex64::from_polar((1.0 - alpha2).sqrt(), phase),
    })
}

fn config_error(e: qcommit::Error) -> CliError {
    match e {
        qcommit::Error::Param { field, reason } => CliError::field(field, reason),
        other => CliError::Config(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "scenario = \"t\"\nexperiment = \"sessions\"\nseed = 3\n";

    #[test]
    fn defaults_fill_sections() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.trials, 10_000);
        let r = c.resolve().unwrap();
        assert_eq!((r.params.m, r.params.n0, r.params.seed), (16, 64, 3));
        assert_eq!(r.strategy, Strategy::Honest);
        assert_eq!(r.scenario, Scenario::default_line());
    }

    #[test]
    fn missing_seed_names_the_field() {
        let e = ExperimentConfig::parse("scenario = \"t\"\nexperiment = \"sessions\"\n").unwrap_err();
        assert!(e.to_string().contains("seed"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = ExperimentConfig::parse(&format!("{MINIMAL}[protocol]\nmm = 3\n")).unwrap_err();
        assert!(e.to_string().contains("mm"), "{e}");
    }

    #[test]
    fn library_errors_keep_their_field() {
        let c = ExperimentConfig::parse(&format!("{MINIMAL}[protocol]\nm = 20\nn0 = 64\n")).unwrap();
        let e = c.resolve().unwrap_err();
        assert!(e.to_string().contains("protocol.n0"), "{e}");
    }

    #[test]
    fn explicit_sites() {
        let text = format!(
            "{MINIMAL}[[spacetime.sites]]\nname = \"B0\"\nparty = \"bob\"\nposition = 0.0\n\
             [[spacetime.sites]]\nname = \"A1\"\nparty = \"alice\"\nposition = 1.0\n\
             [[spacetime.sites]]\nname = \"B1\"\nparty = \"bob\"\nposition = [3.0, 0.0, 0.0]\nvelocity = 0.5\n"
        );
        let s = ExperimentConfig::parse(&text).unwrap().scenario().unwrap();
        assert_eq!(s.layout.sites[2].velocity, [0.5, 0.0, 0.0]);
        let fast = text.replace("velocity = 0.5", "velocity = 1.5");
        assert!(ExperimentConfig::parse(&fast).unwrap().scenario().unwrap_err().to_string().contains("velocity"));
    }

    #[test]
    fn entangle_amplitudes() {
        assert!(entangled(1.2, 0.0).is_err());
        let Strategy::EntangledCommit { alpha, beta } = entangled(0.25, 0.0).unwrap() else { panic!() };
        assert!((alpha.norm_sqr() - 0.25).abs() < 1e-15 && (beta.norm_sqr() - 0.75).abs() < 1e-15);
    }
}
