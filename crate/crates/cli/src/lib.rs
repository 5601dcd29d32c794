//! Library surface of the `wavesel` command-line driver: configuration
//! loading, seeded campaign execution with a parallel worker pool, output
//! writers, and log replay. The binary in `main.rs` is a thin argument
//! parser over these functions.

pub mod campaign;
pub mod config_io;
pub mod error;
pub mod output;
pub mod replay;

pub use campaign::{mean_ci95, run_campaign, sweep_dhat, CampaignResult, SweepRow};
pub use config_io::{load_config, ConfigOverrides};
pub use error::CliError;
