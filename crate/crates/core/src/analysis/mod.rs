//! Security quantification: detection probabilities, Bob's information,
//! cheat sums, the hiding/binding tradeoff, cut-and-choose soundness and
//! per-event binding checks.

mod cheat;
mod detection;
mod information;
mod report;
mod soundness;
mod stats;
mod sweep;

pub use cheat::{
    cheat_sum_after_declarations, cheat_sum_flip_family, cheat_sum_reduction_mc, cheat_sum_toy, CheatSum, FamilyRow,
    StrategyClass, CLASS_NOTE,
};
pub use detection::{
    detection_probability_exact, detection_probability_mc, detection_probability_mc_in, detection_table, DetectionRow,
    MIN_TRIALS,
};
pub use information::{bob_information, BobInformation, InformationMode, MAX_EXACT_N0};
pub use report::{
    binding_bound, default_points, evaluate_relativistic, EvaluationPoint, LabelledCheatSum, PointEvaluation,
    SecurityReport, REPORT_SCHEMA,
};
pub use soundness::{sampling_soundness_curve, sampling_soundness_exact, sampling_soundness_mc, SoundnessRow};
pub use stats::{binomial_sigma, wilson_interval, Estimate, Provenance, CONFIDENCE, DEFAULT_TRIALS, Z_99};
pub use sweep::{nogo_tradeoff_sweep, theta_grid, TradeoffRow};
