//! Output layout and writers.
//!
//! One episode lands in `<out>/<scenario>/<policy>/seed-<k>/` as:
//! - `pri.csv` — one row per PRI,
//! - `cpi.csv` — one row per CPI (when processing is enabled),
//! - `summary.json` — terminal scalars.
//!
//! Campaign aggregates land next to the seed directories as `campaign.csv`
//! (per-PRI mean/CI curves) and `campaign.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use wavesel_core::config::ExperimentConfig;
use wavesel_core::sim::EpisodeLog;

use crate::campaign::{mean_ci95, CampaignResult};
use crate::error::CliError;

/// Directory for one (scenario, policy) pair.
pub fn policy_dir(out: &Path, config: &ExperimentConfig) -> PathBuf {
    out.join(config.scenario.as_str()).join(config.policy.as_str())
}

/// Directory for one seed's episode.
pub fn seed_dir(out: &Path, config: &ExperimentConfig, seed: u64) -> PathBuf {
    policy_dir(out, config).join(format!("seed-{seed}"))
}

/// Render the per-PRI log as CSV.
pub fn pri_csv(log: &EpisodeLog) -> String {
    let mut s = String::with_capacity(64 * log.pri_rows.len() + 64);
    s.push_str("t,sensed,true,waveform_id,cost,oracle_cost,cumulative_regret\n");
    for r in &log.pri_rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.t,
            log.mask_string(r.sensed_mask),
            log.mask_string(r.true_mask),
            r.waveform_id,
            r.cost,
            r.oracle_cost,
            r.cumulative_regret
        );
    }
    s
}

/// Render the per-CPI log as CSV.
pub fn cpi_csv(log: &EpisodeLog) -> String {
    let mut s = String::new();
    s.push_str(
        "cpi_index,num_detections,pd,pfa_hat,image_sinr_db,peak_sidelobe_db,\
         truth_range_m,truth_rate_mps,meas_range_m,meas_rate_mps,est_range_m,est_rate_mps,\
         p11,p12,p22,nis,chosen_pulse_s,chosen_chirp_rate\n",
    );
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &log.cpi_rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.cpi_index,
            r.num_detections,
            r.pd,
            r.pfa_hat,
            r.image_sinr_db,
            r.peak_sidelobe_db,
            r.truth_range_m,
            r.truth_rate_mps,
            opt(r.meas_range_m),
            opt(r.meas_rate_mps),
            r.est_range_m,
            r.est_rate_mps,
            r.p11,
            r.p12,
            r.p22,
            opt(r.nis),
            r.chosen_pulse_s,
            r.chosen_chirp_rate
        );
    }
    s
}

/// Terminal scalars for one episode.
#[derive(Debug, Serialize, serde::Deserialize)]
pub struct EpisodeSummary {
    pub scenario: String,
    pub policy: String,
    pub seed: u64,
    pub horizon: usize,
    pub d_hat: Option<f64>,
    pub terminal_average_cost: f64,
    pub cumulative_regret: f64,
    pub num_cpis: usize,
    pub mean_pd: f64,
    pub range_rmse_m: f64,
    pub mean_peak_sidelobe_db: f64,
}

pub fn episode_summary(config: &ExperimentConfig, log: &EpisodeLog) -> EpisodeSummary {
    EpisodeSummary {
        scenario: config.scenario.as_str().to_string(),
        policy: config.policy.as_str().to_string(),
        seed: log.seed,
        horizon: config.horizon,
        d_hat: config.d_hat,
        terminal_average_cost: log.terminal_average_cost(),
        cumulative_regret: log.cumulative_regret(),
        num_cpis: log.cpi_rows.len(),
        mean_pd: log.mean_pd(),
        range_rmse_m: log.range_rmse(),
        mean_peak_sidelobe_db: log.mean_peak_sidelobe_db(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, &e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, &e))
}

/// Write one episode's files into its seed directory.
pub fn write_episode(
    out: &Path,
    config: &ExperimentConfig,
    log: &EpisodeLog,
) -> Result<PathBuf, CliError> {
    let dir = seed_dir(out, config, log.seed);
    write_file(&dir.join("pri.csv"), &pri_csv(log))?;
    if !log.cpi_rows.is_empty() {
        write_file(&dir.join("cpi.csv"), &cpi_csv(log))?;
    }
    let summary = episode_summary(config, log);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&dir.join("summary.json"), &json)?;
    Ok(dir)
}

/// Aggregate scalar with a 95% confidence half-width.
#[derive(Debug, Serialize, serde::Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub ci95: f64,
}

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct CampaignSummary {
    pub scenario: String,
    pub policy: String,
    pub seeds: Vec<u64>,
    pub horizon: usize,
    pub d_hat: Option<f64>,
    pub terminal_average_cost: Aggregate,
    pub cumulative_regret: Aggregate,
    pub mean_pd: Aggregate,
    pub range_rmse_m: Aggregate,
    pub mean_peak_sidelobe_db: Aggregate,
}

pub fn campaign_summary(result: &CampaignResult) -> CampaignSummary {
    let agg = |xs: Vec<f64>| {
        let (mean, ci95) = mean_ci95(&xs);
        Aggregate { mean, ci95 }
    };
    CampaignSummary {
        scenario: result.config.scenario.as_str().to_string(),
        policy: result.config.policy.as_str().to_string(),
        seeds: result.config.seeds.clone(),
        horizon: result.config.horizon,
        d_hat: result.config.d_hat,
        terminal_average_cost: agg(result.terminal_average_costs()),
        cumulative_regret: agg(result.cumulative_regrets()),
        mean_pd: agg(result.mean_pds()),
        range_rmse_m: agg(result.range_rmses()),
        mean_peak_sidelobe_db: agg(result.peak_sidelobes_db()),
    }
}

/// Per-PRI aggregate curves as CSV.
pub fn campaign_csv(result: &CampaignResult) -> String {
    let cost_curves: Vec<Vec<f64>> = result
        .episodes
        .iter()
        .map(|e| e.average_cost_curve())
        .collect();
    let regret_curves: Vec<Vec<f64>> = result.episodes.iter().map(|e| e.regret_curve()).collect();
    let horizon = cost_curves.first().map_or(0, Vec::len);
    let mut s = String::with_capacity(48 * horizon + 80);
    s.push_str("t,mean_average_cost,ci95_average_cost,mean_cumulative_regret,ci95_cumulative_regret\n");
    let mut cost_at = Vec::with_capacity(result.episodes.len());
    let mut regret_at = Vec::with_capacity(result.episodes.len());
    for t in 0..horizon {
        cost_at.clear();
        regret_at.clear();
        for (c, r) in cost_curves.iter().zip(&regret_curves) {
            cost_at.push(c[t]);
            regret_at.push(r[t]);
        }
        let (cm, cc) = mean_ci95(&cost_at);
        let (rm, rc) = mean_ci95(&regret_at);
        let _ = writeln!(s, "{},{cm},{cc},{rm},{rc}", t + 1);
    }
    s
}

/// Write campaign outputs (per-seed episodes plus the aggregate files).
pub fn write_campaign(out: &Path, result: &CampaignResult) -> Result<PathBuf, CliError> {
    for log in &result.episodes {
        write_episode(out, &result.config, log)?;
    }
    let dir = policy_dir(out, &result.config);
    write_file(&dir.join("campaign.csv"), &campaign_csv(result))?;
    let json =
        serde_json::to_string_pretty(&campaign_summary(result)).expect("summary serializes");
    write_file(&dir.join("campaign.json"), &json)?;
    Ok(dir)
}
