//! Seeded campaign execution: one episode per seed in a parallel worker
//! pool, plus aggregation across seeds and the distortion-bound sweep.

use std::thread;

use wavesel_core::config::ExperimentConfig;
use wavesel_core::sim::{run_episode, EpisodeLog};

use crate::error::CliError;

/// All episodes of one campaign, ordered like `config.seeds`.
#[derive(Debug)]
pub struct CampaignResult {
    pub config: ExperimentConfig,
    pub episodes: Vec<EpisodeLog>,
    /// Seeds whose episodes failed, with the failure text; the campaign
    /// continues past individual failures.
    pub failures: Vec<(u64, String)>,
}

impl CampaignResult {
    pub fn terminal_average_costs(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.terminal_average_cost()).collect()
    }

    pub fn cumulative_regrets(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.cumulative_regret()).collect()
    }

    pub fn mean_pds(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.mean_pd()).collect()
    }

    pub fn range_rmses(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.range_rmse()).collect()
    }

    pub fn peak_sidelobes_db(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.mean_peak_sidelobe_db()).collect()
    }

    pub fn mean_terminal_average_cost(&self) -> f64 {
        mean_ci95(&self.terminal_average_costs()).0
    }

    /// Cumulative regret averaged across seeds, per PRI.
    pub fn mean_regret_curve(&self) -> Vec<f64> {
        let curves: Vec<Vec<f64>> = self.episodes.iter().map(|e| e.regret_curve()).collect();
        let n = curves.len().max(1) as f64;
        let horizon = curves.first().map_or(0, Vec::len);
        (0..horizon)
            .map(|t| curves.iter().map(|c| c[t]).sum::<f64>() / n)
            .collect()
    }
}

/// Sample mean and 95% normal-approximation confidence half-width.
pub fn mean_ci95(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

/// Run every seed of the config, in parallel, preserving seed order.
/// Individual seed failures are collected rather than aborting the
/// campaign; an error is returned only when *no* episode succeeded.
pub fn run_campaign(config: &ExperimentConfig) -> Result<CampaignResult, CliError> {
    config
        .validate()
        .map_err(|details| CliError::Config {
            message: "configuration rejected".into(),
            details,
        })?;
    let seeds = config.seeds.clone();
    let workers = thread::available_parallelism().map_or(4, |n| n.get());
    let chunk_size = seeds.len().div_ceil(workers).max(1);

    let mut slots: Vec<Option<Result<EpisodeLog, String>>> = Vec::new();
    slots.resize_with(seeds.len(), || None);
    thread::scope(|scope| {
        for (seed_chunk, slot_chunk) in seeds.chunks(chunk_size).zip(slots.chunks_mut(chunk_size)) {
            scope.spawn(move || {
                for (seed, slot) in seed_chunk.iter().zip(slot_chunk.iter_mut()) {
                    *slot = Some(run_episode(config, *seed).map_err(|e| e.to_string()));
                }
            });
        }
    });

    let mut episodes = Vec::with_capacity(seeds.len());
    let mut failures = Vec::new();
    for (seed, slot) in seeds.iter().zip(slots) {
        match slot.expect("every slot filled") {
            Ok(log) => episodes.push(log),
            Err(msg) => failures.push((*seed, msg)),
        }
    }
    if episodes.is_empty() {
        return Err(CliError::Runtime {
            message: failures
                .first()
                .map(|(s, m)| format!("all seeds failed; first (seed {s}): {m}"))
                .unwrap_or_else(|| "campaign had no seeds".into()),
        });
    }
    Ok(CampaignResult {
        config: config.clone(),
        episodes,
        failures,
    })
}

/// One row of the distortion-bound sweep.
#[derive(Debug, serde::Serialize)]
pub struct SweepRow {
    /// `"none"` or the numeric bound.
    pub d_hat: String,
    pub terminal_average_cost: f64,
    pub mean_peak_sidelobe_db: f64,
}

/// Run one campaign per distortion bound and tabulate terminal cost and
/// sidelobe level, sorted by bound (unconstrained last).
pub fn sweep_dhat(
    config: &ExperimentConfig,
    values: &[Option<f64>],
) -> Result<Vec<(SweepRow, CampaignResult)>, CliError> {
    if values.len() < 2 {
        return Err(CliError::config_msg("sweep needs at least 2 d_hat values"));
    }
    let mut ordered: Vec<Option<f64>> = values.to_vec();
    ordered.sort_by(|a, b| match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let mut rows = Vec::with_capacity(ordered.len());
    for d in ordered {
        let mut c = config.clone();
        c.d_hat = d;
        let result = run_campaign(&c)?;
        rows.push((
            SweepRow {
                d_hat: d.map(|v| v.to_string()).unwrap_or_else(|| "none".into()),
                terminal_average_cost: result.mean_terminal_average_cost(),
                mean_peak_sidelobe_db: mean_ci95(&result.peak_sidelobes_db()).0,
            },
            result,
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavesel_core::config::{PolicyKind, ScenarioKind};

    fn tiny(policy: PolicyKind, seeds: Vec<u64>) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.scenario = ScenarioKind::Coexistence;
        c.policy = policy;
        c.horizon = 200;
        c.seeds = seeds;
        c
    }

    #[test]
    fn campaign_matches_sequential_episodes() {
        let config = tiny(PolicyKind::Ts, vec![3, 1, 2]);
        let campaign = run_campaign(&config).unwrap();
        assert_eq!(campaign.episodes.len(), 3);
        for (seed, log) in config.seeds.iter().zip(&campaign.episodes) {
            let solo = wavesel_core::sim::run_episode(&config, *seed).unwrap();
            assert_eq!(*log, solo, "seed {seed} differs from sequential run");
        }
    }

    #[test]
    fn single_seed_aggregates_equal_episode() {
        let config = tiny(PolicyKind::Reactive, vec![9]);
        let campaign = run_campaign(&config).unwrap();
        let log = &campaign.episodes[0];
        assert_eq!(campaign.mean_terminal_average_cost(), log.terminal_average_cost());
        let (_, ci) = mean_ci95(&campaign.terminal_average_costs());
        assert_eq!(ci, 0.0);
    }

    #[test]
    fn identical_seeds_have_zero_variance() {
        let config = tiny(PolicyKind::Exp3, vec![5, 5, 5, 5]);
        let campaign = run_campaign(&config).unwrap();
        let costs = campaign.terminal_average_costs();
        for c in &costs[1..] {
            assert_eq!(*c, costs[0]);
        }
        let (_, ci) = mean_ci95(&costs);
        assert_eq!(ci, 0.0);
    }

    #[test]
    fn mean_ci_values() {
        let (m, ci) = mean_ci95(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-12);
        // sd = 1.2910, se = 0.6455, ci = 1.2651
        assert!((ci - 1.2651).abs() < 1e-3);
    }
}
