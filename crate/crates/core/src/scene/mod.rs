//! Interference-channel generators.
//!
//! Two concrete scenes drive the simulator: a stochastic radar/cellular
//! coexistence channel whose evolution is independent of the radar's
//! actions, and a reactive jammer that punishes waveform repetition. A
//! synthetic stationary linear environment is also provided for studying
//! learner regret in isolation.

mod coexistence;
mod jammer;
mod synthetic;

pub use coexistence::{CoexistenceConfig, CoexistenceScene};
pub use jammer::{JammerConfig, JammerScene};
pub use synthetic::{SyntheticLinearConfig, SyntheticLinearScene};
