//! Replay: re-derive episode metrics from stored logs and check their
//! internal consistency.
//!
//! Reads `pri.csv` (and `cpi.csv` when present) from a seed directory,
//! recomputes the running aggregates, verifies the cumulative-regret column
//! against the per-row increments, and emits a fresh summary document.

use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// Parsed pri.csv row (only the numeric columns replay needs).
struct PriRecord {
    cost: f64,
    oracle_cost: f64,
    cumulative_regret: f64,
}

/// Summary re-derived from stored logs.
#[derive(Debug, Serialize)]
pub struct ReplaySummary {
    pub rows: usize,
    pub terminal_average_cost: f64,
    pub cumulative_regret: f64,
    /// Max absolute mismatch between the stored cumulative regret column
    /// and the running sum of its increments.
    pub regret_column_error: f64,
    /// Max absolute mismatch between stored cumulative regret and the
    /// recomputed `sum(cost - oracle_cost)`.
    pub regret_recompute_error: f64,
    pub num_cpis: usize,
    pub mean_pd: Option<f64>,
    pub range_rmse_m: Option<f64>,
}

fn parse_field(line: &str, index: usize, path: &Path, lineno: usize) -> Result<f64, CliError> {
    line.split(',')
        .nth(index)
        .and_then(|f| f.parse::<f64>().ok())
        .ok_or_else(|| CliError::Inconsistent {
            message: format!("{}:{lineno}: malformed field {index}", path.display()),
        })
}

/// Re-derive metrics from a seed directory. `tolerance` bounds the regret
/// consistency checks (1e-9 in the validation suite).
pub fn replay_dir(dir: &Path, tolerance: f64) -> Result<ReplaySummary, CliError> {
    let pri_path = dir.join("pri.csv");
    let text = std::fs::read_to_string(&pri_path).map_err(|e| CliError::io(&pri_path, &e))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        records.push(PriRecord {
            cost: parse_field(line, 4, &pri_path, lineno)?,
            oracle_cost: parse_field(line, 5, &pri_path, lineno)?,
            cumulative_regret: parse_field(line, 6, &pri_path, lineno)?,
        });
    }
    if records.is_empty() {
        return Err(CliError::Inconsistent {
            message: format!("{}: no data rows", pri_path.display()),
        });
    }

    let mut running_from_increments = 0.0;
    let mut prev_cum = 0.0;
    let mut column_err = 0.0f64;
    let mut recompute = 0.0;
    let mut recompute_err = 0.0f64;
    let mut total_cost = 0.0;
    for r in &records {
        let increment = r.cumulative_regret - prev_cum;
        running_from_increments += increment;
        prev_cum = r.cumulative_regret;
        column_err = column_err.max((running_from_increments - r.cumulative_regret).abs());
        recompute += r.cost - r.oracle_cost;
        recompute_err = recompute_err.max((recompute - r.cumulative_regret).abs());
        total_cost += r.cost;
    }

    let (num_cpis, mean_pd, range_rmse_m) = match std::fs::read_to_string(dir.join("cpi.csv")) {
        Err(_) => (0, None, None),
        Ok(text) => {
            let mut pds = Vec::new();
            let mut sq_err = 0.0;
            let cpi_path = dir.join("cpi.csv");
            for (lineno, line) in text.lines().enumerate().skip(1) {
                if line.is_empty() {
                    continue;
                }
                pds.push(parse_field(line, 2, &cpi_path, lineno)?);
                let truth = parse_field(line, 6, &cpi_path, lineno)?;
                let est = parse_field(line, 10, &cpi_path, lineno)?;
                sq_err += (est - truth) * (est - truth);
            }
            if pds.is_empty() {
                (0, None, None)
            } else {
                let n = pds.len();
                (
                    n,
                    Some(pds.iter().sum::<f64>() / n as f64),
                    Some((sq_err / n as f64).sqrt()),
                )
            }
        }
    };

    let summary = ReplaySummary {
        rows: records.len(),
        terminal_average_cost: total_cost / records.len() as f64,
        cumulative_regret: records.last().unwrap().cumulative_regret,
        regret_column_error: column_err,
        regret_recompute_error: recompute_err,
        num_cpis,
        mean_pd,
        range_rmse_m,
    };
    if column_err > tolerance {
        return Err(CliError::Inconsistent {
            message: format!(
                "cumulative regret column inconsistent by {column_err} (tolerance {tolerance})"
            ),
        });
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::write_episode;
    use wavesel_core::config::{ExperimentConfig, PolicyKind, ScenarioKind};
    use wavesel_core::sim::run_episode;

    #[test]
    fn replay_reproduces_episode_metrics() {
        let mut config = ExperimentConfig::default();
        config.scenario = ScenarioKind::Coexistence;
        config.policy = PolicyKind::Ts;
        config.horizon = 300;
        config.seeds = vec![4];
        let log = run_episode(&config, 4).unwrap();
        let dir = std::env::temp_dir().join(format!("wavesel-replay-{}", std::process::id()));
        let seed_dir = write_episode(&dir, &config, &log).unwrap();
        let summary = replay_dir(&seed_dir, 1e-9).unwrap();
        assert_eq!(summary.rows, 300);
        assert!((summary.terminal_average_cost - log.terminal_average_cost()).abs() < 1e-9);
        assert!((summary.cumulative_regret - log.cumulative_regret()).abs() < 1e-12);
        assert!(summary.regret_recompute_error < 1e-9);
        std::fs::remove_dir_all(&dir).ok();
    }
}
