//! Cognitive-radar waveform selection library.
//!
//! A radar that shares spectrum with other emitters must decide, once per
//! pulse repetition interval (PRI), which linear-FM chirp to transmit. This
//! crate provides everything needed to simulate and study that decision
//! loop end to end:
//!
//! - [`waveforms`] — the chirp catalog, an inter-waveform distortion metric,
//!   and the per-PRI constrained sub-catalog it induces.
//! - [`spectrum`] — binary interference states, spectrum sensing, and the
//!   collision/missed-bandwidth cost function.
//! - [`bandit`] — linear contextual bandit learners (Thompson Sampling and
//!   EXP3), baseline policies, and regret accounting.
//! - [`scene`] — interference generators: a stochastic cellular coexistence
//!   channel and a reactive adaptive jammer.
//! - [`rdproc`] — pulse synthesis, received-signal generation, matched
//!   filtering into range-Doppler maps, CA-CFAR detection, and image metrics.
//! - [`tracker`] — a range/range-rate Kalman filter and waveform-parameter
//!   optimization from the tracking error covariance.
//! - [`sim`] — the seeded per-PRI episode engine tying it all together.
//!
//! The crate is `no_std`-compatible (requires `alloc`); all I/O, file
//! formats, and the command-line driver live in the companion `wavesel-cli`
//! crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bandit;
pub mod config;
pub mod linalg;
pub(crate) mod math;
pub mod rdproc;
pub mod rng;
pub mod scene;
pub mod sim;
pub mod spectrum;
pub mod tracker;
pub mod waveforms;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
