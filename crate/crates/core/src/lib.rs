//! Simulation and security analysis of bit-commitment compositions built from
//! an ideal classical-certificate commitment oracle and BB84 spin
//! certification, together with the entanglement and purification attacks
//! that constrain any finite quantum commitment.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`]: dense state vectors and density matrices for small qubit
//!   registers, measurement, fidelity, Schmidt decomposition and Uhlmann
//!   rotations.
//! * [`spacetime`]: events, sites, light cones and causal validation of
//!   message schedules.
//! * [`protocol`]: the reduction protocol state machine (oracle commitments,
//!   spin certification, challenge, declarations, reveal).
//! * [`adversary`]: cheating strategies and the toy purification attack.
//! * [`analysis`]: detection probabilities, Bob's information, cheat sums and
//!   security reports.
//!
//! Monte Carlo work is spread over rayon when the `parallel` feature is
//! enabled (the default); every trial owns its own [`rng::RandomStream`]
//! split, so parallel and sequential runs produce identical numbers.

pub mod adversary;
pub mod analysis;
pub mod error;
pub mod par;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod spacetime;

pub use error::{Error, Result};
pub use rng::RandomStream;
