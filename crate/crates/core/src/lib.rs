//! Relativistic bit commitment: an event-driven simulator for the
//! multi-round two-location commitment protocol, and exact tools for its
//! classical security analysis.
//!
//! - [`gf`]: arithmetic in F_q with canonical encodings.
//! - [`protocol`]: honest agents, commit/sustain responses and reveal checking.
//! - [`spacetime`]: light-cone schedule validation and the parameter planner.
//! - [`games`]: CHSH_q(p) games, exact classical values, the guessing reduction.
//! - [`adversary`]: cheating strategies, binding advantage, independence parameters.
//! - [`harness`]: four-agent simulation, framing, configuration and transcripts.

pub mod gf;
pub mod magnitude;
pub mod protocol;
pub mod spacetime;
pub mod exact;
pub mod games;
pub mod adversary;
pub mod harness;
