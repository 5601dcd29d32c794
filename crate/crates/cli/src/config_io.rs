//! Configuration loading: JSON document plus command-line overrides of the
//! top-level fields.

use std::path::Path;

use wavesel_core::config::{ExperimentConfig, PolicyKind, ScenarioKind};

use crate::error::CliError;

/// Top-level fields the CLI may override after the file is parsed.
#[derive(Debug, Default, Clone)]
pub struct ConfigOverrides {
    pub scenario: Option<ScenarioKind>,
    pub policy: Option<PolicyKind>,
    pub seeds: Option<Vec<u64>>,
    pub horizon: Option<usize>,
    /// `Some(None)` disables the constraint (`--dhat none`).
    pub d_hat: Option<Option<f64>>,
    pub output_dir: Option<String>,
}

impl ConfigOverrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(s) = self.scenario {
            config.scenario = s;
        }
        if let Some(p) = self.policy {
            config.policy = p;
        }
        if let Some(seeds) = &self.seeds {
            config.seeds = seeds.clone();
        }
        if let Some(h) = self.horizon {
            config.horizon = h;
        }
        if let Some(d) = self.d_hat {
            config.d_hat = d;
        }
        if let Some(o) = &self.output_dir {
            config.output_dir = Some(o.clone());
        }
    }
}

/// Load a config file (or defaults when `path` is `None`), apply overrides,
/// and validate.
pub fn load_config(
    path: Option<&Path>,
    overrides: &ConfigOverrides,
) -> Result<ExperimentConfig, CliError> {
    let mut config = match path {
        None => ExperimentConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, &e))?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::config_msg(format!("{}: {e}", p.display()))
            })?
        }
    };
    overrides.apply(&mut config);
    config.validate().map_err(|details| CliError::Config {
        message: "configuration rejected".into(),
        details,
    })?;
    Ok(config)
}

/// Parse a `--seeds` list like `1,2,3`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad seed `{part}`: {e}"))
        })
        .collect()
}

/// Parse `--dhat`: a float in (0, 1] or the word `none`.
pub fn parse_dhat(s: &str) -> Result<Option<f64>, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|e| format!("bad d_hat `{s}`: {e}"))
}
