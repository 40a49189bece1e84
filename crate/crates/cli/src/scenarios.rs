//! Scenarios compiled into the binary.

use std::path::Path;

use crate::{CliError, ExperimentConfig};

pub struct ShippedScenario {
    pub name: &'static str,
    pub toml: &'static str,
}

pub const SCENARIOS: [ShippedScenario; 6] = [
    ShippedScenario { name: "honest-default", toml: include_str!("../scenarios/honest-default.toml") },
    ShippedScenario { name: "flip-sweep", toml: include_str!("../scenarios/flip-sweep.toml") },
    ShippedScenario { name: "entangle-demo", toml: include_str!("../scenarios/entangle-demo.toml") },
    ShippedScenario { name: "purification-nogo", toml: include_str!("../scenarios/purification-nogo.toml") },
    ShippedScenario { name: "oracle-degradation", toml: include_str!("../scenarios/oracle-degradation.toml") },
    ShippedScenario { name: "causal-violation", toml: include_str!("../scenarios/causal-violation.toml") },
];

pub fn names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.name).collect()
}

/// `(name, description)` of each shipped scenario.
pub fn list_scenarios() -> Vec<(&'static str, String)> {
    SCENARIOS
        .iter()
        .map(|s| {
            let description = ExperimentConfig::parse(s.toml).map(|c| c.description).unwrap_or_else(|e| format!("(broken: {e})"));
            (s.name, description)
        })
        .collect()
}

/// A path (anything with a separator or a `.toml` suffix) is read from disk;
/// anything else must name a shipped scenario.
pub fn load_config(spec: &str) -> Result<ExperimentConfig, CliError> {
    let looks_like_path = spec.ends_with(".toml") || spec.contains(std::path::MAIN_SEPARATOR) || spec.contains('/');
    if looks_like_path || Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| CliError::io(spec, e))?;
        return ExperimentConfig::parse(&text);
    }
    let shipped = SCENARIOS.iter().find(|s| s.name == spec).ok_or_else(|| CliError::UnknownScenario { name: spec.into(), valid: names() })?;
    ExperimentConfig::parse(shipped.toml)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_shipped_scenario_resolves_under_its_own_name() {
        for s in &SCENARIOS {
            let c = load_config(s.name).unwrap();
            assert_eq!(c.scenario, s.name);
            assert!(!c.description.is_empty());
            c.resolve().unwrap();
        }
    }

    #[test]
    fn unknown_name_lists_valid_ones() {
        let e = load_config("nope").unwrap_err();
        let msg = e.to_string();
        assert!(names().iter().all(|n| msg.contains(n)), "{msg}");
        assert_eq!(e.exit_code(), 2);
    }
}
