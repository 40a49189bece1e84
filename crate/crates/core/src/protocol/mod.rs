//! The reduction protocol: `2·N0` oracle commitments, `N0` BB84 spin
//! particles certified by cut-and-choose, and a single-bit commitment made by
//! declaring bases for the `M` untested particles.

mod encoding;
mod oracle;
mod params;
mod schedule;
mod session;
mod transcript;

pub use encoding::{Declaration, EncodingRule};
pub use oracle::IdealBcccOracle;
pub use params::{OracleKnobs, ProtocolParams, SecurityBounds};
pub use schedule::{plan_schedule, InjectedFault, PlannedSchedule, Scenario, Steps, Timing};
pub use session::{
    challenge, commit_phase, make_declarations, run_session, send_spin_sequence, verify_reveal, verify_tested,
    RevealCheck, RevealVerdict, Session, Stage, TestVerdict,
};
pub use transcript::{Outcome, RevealClaim, SessionTranscript, TestedReveal, TRANSCRIPT_SCHEMA};
