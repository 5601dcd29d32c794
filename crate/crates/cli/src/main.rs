//! `wavesel` — cognitive-radar waveform-selection simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wavesel_cli::campaign::{run_campaign, sweep_dhat};
use wavesel_cli::config_io::{load_config, parse_dhat, parse_seeds, ConfigOverrides};
use wavesel_cli::error::CliError;
use wavesel_cli::output::{campaign_summary, episode_summary, write_campaign, write_episode};
use wavesel_cli::replay::replay_dir;
use wavesel_core::config::{PolicyKind, ScenarioKind};

#[derive(Parser)]
#[command(
    name = "wavesel",
    about = "Seeded simulator for constrained contextual-bandit radar waveform selection",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the scenario (coexistence | jammer | synthetic-linear).
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// Override the policy (ts | exp3 | reactive | fixed).
    #[arg(long)]
    policy: Option<PolicyKind>,
    /// Override the seed list, comma separated.
    #[arg(long)]
    seeds: Option<String>,
    /// Override the horizon (PRIs).
    #[arg(long)]
    horizon: Option<usize>,
    /// Override the distortion bound (a number in (0,1] or `none`).
    #[arg(long)]
    dhat: Option<String>,
    /// Output directory root.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Result<ConfigOverrides, CliError> {
        let seeds = match &self.seeds {
            None => None,
            Some(s) => Some(parse_seeds(s).map_err(CliError::config_msg)?),
        };
        let d_hat = match &self.dhat {
            None => None,
            Some(s) => Some(parse_dhat(s).map_err(CliError::config_msg)?),
        };
        Ok(ConfigOverrides {
            scenario: self.scenario,
            policy: self.policy,
            seeds,
            horizon: self.horizon,
            d_hat,
            output_dir: self.out.as_ref().map(|p| p.display().to_string()),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode per seed and write per-seed logs.
    Run(CommonArgs),
    /// Run all seeds and aggregate mean/CI curves and summaries.
    Campaign(CommonArgs),
    /// Run one campaign per distortion bound and tabulate the results.
    SweepDhat {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated bounds, e.g. `0.1,0.2,none`.
        #[arg(long, required = true)]
        values: String,
    },
    /// Re-derive metrics from a stored seed directory and verify the log.
    Replay {
        /// A `seed-<k>` directory containing pri.csv (and optionally
        /// cpi.csv).
        #[arg(long)]
        dir: PathBuf,
        /// Consistency tolerance on the regret column.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Parse and validate a configuration file.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn out_dir(config: &wavesel_core::config::ExperimentConfig) -> PathBuf {
    PathBuf::from(config.output_dir.clone().unwrap_or_else(|| "out".into()))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(common) => {
            let config = load_config(common.config.as_deref(), &common.overrides()?)?;
            let out = out_dir(&config);
            for &seed in &config.seeds {
                let log = wavesel_core::sim::run_episode(&config, seed)?;
                let dir = write_episode(&out, &config, &log)?;
                let summary = episode_summary(&config, &log);
                println!(
                    "seed {seed}: avg cost {:.4}, regret {:.1} -> {}",
                    summary.terminal_average_cost,
                    summary.cumulative_regret,
                    dir.display()
                );
            }
            Ok(())
        }
        Command::Campaign(common) => {
            let config = load_config(common.config.as_deref(), &common.overrides()?)?;
            let out = out_dir(&config);
            let result = run_campaign(&config)?;
            for (seed, msg) in &result.failures {
                eprintln!("seed {seed} failed: {msg}");
            }
            let dir = write_campaign(&out, &result)?;
            let summary = campaign_summary(&result);
            println!(
                "{} / {}: terminal avg cost {:.4} +- {:.4} over {} seeds -> {}",
                summary.scenario,
                summary.policy,
                summary.terminal_average_cost.mean,
                summary.terminal_average_cost.ci95,
                result.episodes.len(),
                dir.display()
            );
            Ok(())
        }
        Command::SweepDhat { common, values } => {
            let config = load_config(common.config.as_deref(), &common.overrides()?)?;
            let out = out_dir(&config);
            let parsed: Result<Vec<Option<f64>>, String> =
                values.split(',').map(|v| parse_dhat(v.trim())).collect();
            let parsed = parsed.map_err(CliError::config_msg)?;
            let rows = sweep_dhat(&config, &parsed)?;
            let mut csv = String::from("d_hat,terminal_average_cost,mean_peak_sidelobe_db\n");
            for (row, result) in &rows {
                write_campaign(&out.join(format!("dhat-{}", row.d_hat)), result)?;
                csv.push_str(&format!(
                    "{},{},{}\n",
                    row.d_hat, row.terminal_average_cost, row.mean_peak_sidelobe_db
                ));
                println!(
                    "d_hat {:>5}: avg cost {:.4}, peak sidelobe {:.1} dB",
                    row.d_hat, row.terminal_average_cost, row.mean_peak_sidelobe_db
                );
            }
            let table = out.join("sweep-dhat.csv");
            std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, &e))?;
            std::fs::write(&table, csv).map_err(|e| CliError::io(&table, &e))?;
            let json = out.join("sweep-dhat.json");
            let body = serde_json::to_string_pretty(
                &rows.iter().map(|(r, _)| r).collect::<Vec<_>>(),
            )
            .expect("sweep rows serialize");
            std::fs::write(&json, body).map_err(|e| CliError::io(&json, &e))?;
            Ok(())
        }
        Command::Replay { dir, tolerance } => {
            let summary = replay_dir(&dir, tolerance)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
            Ok(())
        }
        Command::ValidateConfig { config } => {
            let loaded = load_config(Some(&config), &ConfigOverrides::default())?;
            println!(
                "ok: scenario {}, policy {}, horizon {}, {} seeds",
                loaded.scenario,
                loaded.policy,
                loaded.horizon,
                loaded.seeds.len()
            );
            Ok(())
        }
    }
}
