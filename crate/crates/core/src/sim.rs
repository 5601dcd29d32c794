//! The per-PRI episode engine.
//!
//! One episode runs the closed loop for a fixed horizon: sense the channel,
//! assemble the constrained catalog, build contexts, let the policy pick a
//! chirp, realize the true interference state, charge the cost, update the
//! learner, and log everything. When CPI processing is enabled, every
//! `M_CPI` pulses are synthesized into a received buffer, imaged, passed
//! through CFAR, and fed to the Kalman tracker.
//!
//! Determinism: all randomness comes from named streams derived from the
//! episode seed, so identical `(config, seed)` pairs produce identical
//! logs, and the coexistence scene stream is untouched by policy choices.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bandit::{
    fixed_waveform, reactive_waveform, ContextVector, Exp3State, HistoryStore, RegretLedger,
    TsState,
};
use crate::config::{ConfigError, ExperimentConfig, PolicyKind, ScenarioKind};
use crate::rdproc::{
    self, cfar_2d, metrics, range_doppler, CfarConfig, Cpx, PointTarget, RdprocError, TruthBin,
};
use crate::rng::EpisodeStreams;
use crate::scene::{CoexistenceScene, JammerScene, SyntheticLinearScene};
use crate::spectrum::{cost, oracle_waveform, sense, InterferenceState};
use crate::tracker::{
    chirp_rate_penalties, measurement_noise, nearest_waveform, optimal_waveform_params,
    TrackState, TrackerCoupling,
};
use crate::waveforms::{constrained_catalog, DistortionParams, Waveform, WaveformCatalog};
use crate::{linalg::Sym2, math};

/// Episode failures.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// Configuration rejected; one entry per offending field.
    InvalidConfig(Vec<ConfigError>),
    /// Signal-processing failure.
    Rdproc(RdprocError),
    /// EXP3 hit singular contexts even after regularization.
    DegenerateContexts { pri: u64 },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::InvalidConfig(errors) => {
                write!(f, "invalid configuration ({} errors)", errors.len())
            }
            SimError::Rdproc(e) => write!(f, "signal processing: {e}"),
            SimError::DegenerateContexts { pri } => {
                write!(f, "degenerate contexts at PRI {pri}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SimError {}

impl From<RdprocError> for SimError {
    fn from(e: RdprocError) -> Self {
        SimError::Rdproc(e)
    }
}

/// One PRI of the episode log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriRow {
    /// PRI index, 1-based.
    pub t: u64,
    /// Sensed interference state (bit `l` = sub-channel `l`).
    pub sensed_mask: u64,
    /// True interference state.
    pub true_mask: u64,
    pub waveform_id: u32,
    /// Cost observed by the learner.
    pub cost: f64,
    /// Cost of the feasible-set oracle against the true state.
    pub oracle_cost: f64,
    pub cumulative_regret: f64,
}

/// One CPI of detection/tracking metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpiRow {
    pub cpi_index: usize,
    pub num_detections: usize,
    pub pd: f64,
    pub pfa_hat: f64,
    pub image_sinr_db: f64,
    pub peak_sidelobe_db: f64,
    pub truth_range_m: f64,
    pub truth_rate_mps: f64,
    pub meas_range_m: Option<f64>,
    pub meas_rate_mps: Option<f64>,
    pub est_range_m: f64,
    pub est_rate_mps: f64,
    pub p11: f64,
    pub p12: f64,
    pub p22: f64,
    pub nis: Option<f64>,
    /// Pulse duration of the CPI's modal waveform, s.
    pub chosen_pulse_s: f64,
    /// Chirp rate of the CPI's modal waveform, Hz/s.
    pub chosen_chirp_rate: f64,
}

/// Full episode record.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub seed: u64,
    pub scenario: ScenarioKind,
    pub policy: PolicyKind,
    pub num_subchannels: usize,
    pub pri_rows: Vec<PriRow>,
    pub cpi_rows: Vec<CpiRow>,
}

impl EpisodeLog {
    /// Mean of the observed cost column.
    pub fn terminal_average_cost(&self) -> f64 {
        if self.pri_rows.is_empty() {
            return 0.0;
        }
        self.pri_rows.iter().map(|r| r.cost).sum::<f64>() / self.pri_rows.len() as f64
    }

    pub fn cumulative_regret(&self) -> f64 {
        self.pri_rows.last().map_or(0.0, |r| r.cumulative_regret)
    }

    /// Running-average cost after each PRI.
    pub fn average_cost_curve(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pri_rows.len());
        let mut acc = 0.0;
        for (i, r) in self.pri_rows.iter().enumerate() {
            acc += r.cost;
            out.push(acc / (i + 1) as f64);
        }
        out
    }

    /// Cumulative regret after each PRI.
    pub fn regret_curve(&self) -> Vec<f64> {
        self.pri_rows.iter().map(|r| r.cumulative_regret).collect()
    }

    /// Mean probability of detection over CPIs.
    pub fn mean_pd(&self) -> f64 {
        if self.cpi_rows.is_empty() {
            return 0.0;
        }
        self.cpi_rows.iter().map(|r| r.pd).sum::<f64>() / self.cpi_rows.len() as f64
    }

    /// Range RMSE of the track against truth over CPIs.
    pub fn range_rmse(&self) -> f64 {
        let est: Vec<f64> = self.cpi_rows.iter().map(|r| r.est_range_m).collect();
        let truth: Vec<f64> = self.cpi_rows.iter().map(|r| r.truth_range_m).collect();
        crate::tracker::rmse(&est, &truth)
    }

    /// Mean peak Doppler sidelobe over CPIs, dB.
    pub fn mean_peak_sidelobe_db(&self) -> f64 {
        if self.cpi_rows.is_empty() {
            return 0.0;
        }
        self.cpi_rows.iter().map(|r| r.peak_sidelobe_db).sum::<f64>() / self.cpi_rows.len() as f64
    }

    /// Bit-string for a stored mask.
    pub fn mask_string(&self, mask: u64) -> String {
        let mut s = String::with_capacity(self.num_subchannels);
        for l in 0..self.num_subchannels {
            s.push(if mask >> l & 1 == 1 { '1' } else { '0' });
        }
        s
    }
}

enum Scene {
    Coexistence(CoexistenceScene),
    Jammer(JammerScene),
}

enum Policy {
    Ts(TsState),
    Exp3(Exp3State),
    Reactive,
    Fixed,
}

/// Run one seeded episode.
pub fn run_episode(config: &ExperimentConfig, seed: u64) -> Result<EpisodeLog, SimError> {
    config.validate().map_err(SimError::InvalidConfig)?;
    if config.scenario == ScenarioKind::SyntheticLinear {
        match config.policy {
            PolicyKind::Ts | PolicyKind::Exp3 => run_synthetic(config, seed),
            _ => Err(SimError::InvalidConfig(alloc::vec![ConfigError {
                field: "policy".into(),
                message: "synthetic-linear supports only ts and exp3".into(),
            }])),
        }
    } else {
        run_radar(config, seed)
    }
}

fn make_policy(config: &ExperimentConfig, dim: usize, num_arms: usize) -> Policy {
    match config.policy {
        PolicyKind::Ts => Policy::Ts(TsState::new(dim, config.bandit.ts_v)),
        PolicyKind::Exp3 => {
            let eps = config
                .bandit
                .exp3_epsilon
                .unwrap_or_else(|| Exp3State::default_epsilon(num_arms, dim, config.horizon));
            let gamma = config
                .bandit
                .exp3_gamma
                .unwrap_or_else(|| Exp3State::default_gamma(num_arms, config.horizon));
            Policy::Exp3(Exp3State::new(dim, eps, gamma))
        }
        PolicyKind::Reactive => Policy::Reactive,
        PolicyKind::Fixed => Policy::Fixed,
    }
}

fn run_radar(config: &ExperimentConfig, seed: u64) -> Result<EpisodeLog, SimError> {
    let catalog = config
        .catalog
        .build()
        .expect("validated by config.validate");
    let params = config
        .cost
        .build(catalog.channel_bandwidth())
        .expect("validated by config.validate");
    let distortion_params = DistortionParams::normalized(catalog.channel_bandwidth());
    let mut streams = EpisodeStreams::new(seed);

    let mut scene = match config.scenario {
        ScenarioKind::Coexistence => Scene::Coexistence(CoexistenceScene::new(
            &config.scene.coexistence,
            catalog.num_subchannels(),
            catalog.channel_bandwidth(),
            &mut streams.scene_calib,
        )),
        ScenarioKind::Jammer => Scene::Jammer(JammerScene::new(
            catalog.num_subchannels(),
            catalog.channel_bandwidth(),
        )),
        ScenarioKind::SyntheticLinear => unreachable!("handled by run_episode"),
    };

    let mut policy = make_policy(config, ContextVector::DIM, catalog.len());
    let is_learner = matches!(policy, Policy::Ts(_) | Policy::Exp3(_));
    let mut history = HistoryStore::new();
    let mut ledger = RegretLedger::new();

    let mut cpi = config
        .rdproc
        .as_ref()
        .map(|rd| CpiProcessor::new(config, rd, &catalog));

    let mut prev_w: Option<Waveform> = None;
    let mut prev_prev_w: Option<Waveform> = None;
    // Sensing runs passively during the previous PRI, so the estimate that
    // conditions selection at PRI t reflects s_{t-1}; the true s_t is only
    // recovered after reception, when the cost is charged. The coexistence
    // channel exists before the first transmission, so its s_0 is real.
    let mut latest_true = match &mut scene {
        Scene::Coexistence(s) => s.step(&mut streams.scene),
        Scene::Jammer(_) => {
            InterferenceState::zeros(catalog.num_subchannels(), catalog.channel_bandwidth())
        }
    };
    let mut tracker_pref: Option<(f64, f64)> = None;

    let mut pri_rows = Vec::with_capacity(config.horizon);
    let mut cpi_rows = Vec::new();

    for t in 1..=config.horizon as u64 {
        let sensed = sense(&latest_true, config.sensing.flip_prob, &mut streams.sensing);

        // Constrained catalog applies to learners from the second PRI on.
        let allowed: Vec<Waveform> = match (is_learner, config.d_hat, &prev_w) {
            (true, Some(d_hat), Some(p)) => {
                constrained_catalog(&catalog, p, d_hat, &distortion_params)
            }
            _ => catalog.waveforms().to_vec(),
        };
        let contexts = history.contexts(&allowed, &sensed);

        let penalties: Option<Vec<f64>> = match (config.tracker.coupling, tracker_pref) {
            (TrackerCoupling::Penalty { weight }, Some((alpha_star, _))) if is_learner => {
                Some(chirp_rate_penalties(alpha_star, weight, &allowed))
            }
            _ => None,
        };

        let (chosen_idx, exp3_dist): (usize, Option<Vec<f64>>) = match &mut policy {
            Policy::Fixed => {
                let w = fixed_waveform(&catalog);
                (index_of(&allowed, w.id), None)
            }
            Policy::Reactive => {
                let w = reactive_waveform(&latest_true, &catalog);
                (index_of(&allowed, w.id), None)
            }
            Policy::Ts(ts) => {
                let xs: Vec<&[f64]> = contexts.iter().map(|c| c.as_slice()).collect();
                let idx = match &penalties {
                    Some(p) => ts.select_index_penalized(&xs, p, &mut streams.policy),
                    None => ts.select_index(&xs, &mut streams.policy),
                };
                (idx, None)
            }
            Policy::Exp3(exp3) => {
                let dist = match &penalties {
                    Some(p) => exp3.distribution_penalized(&allowed, p),
                    None => exp3.distribution(&allowed),
                };
                let idx = streams.policy.sample_categorical(&dist);
                (idx, Some(dist))
            }
        };

        // Direct tracker coupling overrides the learner's pick.
        let mut chosen_idx = chosen_idx;
        if let (TrackerCoupling::Direct, Some((alpha_star, t_star))) =
            (config.tracker.coupling, tracker_pref)
        {
            if is_learner {
                let w = nearest_waveform(alpha_star, t_star, &allowed);
                chosen_idx = index_of(&allowed, w.id);
            }
        }

        let w = allowed[chosen_idx];
        // Only now does the channel's true state for this PRI get realized
        // (the jammer reacts to the radar's *previous* transmissions).
        let true_state = match &mut scene {
            Scene::Coexistence(s) => s.step(&mut streams.scene),
            Scene::Jammer(j) => j.step(prev_w.as_ref(), prev_prev_w.as_ref(), &catalog),
        };
        let observed = cost(&w, &true_state, &params, &catalog);
        let oracle =
            oracle_waveform(&true_state, &params, &allowed, &catalog);
        let oracle_cost = cost(&oracle, &true_state, &params, &catalog);
        ledger.record(observed, oracle_cost);
        history.record(w.id, &sensed, observed);

        match &mut policy {
            Policy::Ts(ts) => ts.update(contexts[chosen_idx].as_slice(), observed),
            Policy::Exp3(exp3) => {
                let slices: Vec<(u32, &[f64])> = allowed
                    .iter()
                    .zip(&contexts)
                    .map(|(w, c)| (w.id, c.as_slice()))
                    .collect();
                exp3.update_slices(
                    &slices,
                    chosen_idx,
                    observed,
                    exp3_dist.as_ref().expect("distribution recorded"),
                )
                .map_err(|_| SimError::DegenerateContexts { pri: t })
                .map(|_| ())?
            }
            _ => {}
        }

        pri_rows.push(PriRow {
            t,
            sensed_mask: sensed.mask(),
            true_mask: true_state.mask(),
            waveform_id: w.id,
            cost: observed,
            oracle_cost,
            cumulative_regret: ledger.cumulative_regret(),
        });

        prev_prev_w = prev_w;
        prev_w = Some(w);
        latest_true = true_state.clone();

        if let Some(proc) = &mut cpi {
            proc.push(w, true_state);
            if proc.is_full() {
                let row = proc.process(&catalog, &mut streams)?;
                if config.tracker.coupling != TrackerCoupling::Off {
                    tracker_pref =
                        optimal_waveform_params(&proc.track.covariance, proc.carrier_hz).ok();
                }
                cpi_rows.push(row);
            }
        }
    }

    Ok(EpisodeLog {
        seed,
        scenario: config.scenario,
        policy: config.policy,
        num_subchannels: catalog.num_subchannels(),
        pri_rows,
        cpi_rows,
    })
}

fn index_of(allowed: &[Waveform], id: u32) -> usize {
    allowed
        .iter()
        .position(|w| w.id == id)
        .expect("waveform must be in the allowed set")
}

fn run_synthetic(config: &ExperimentConfig, seed: u64) -> Result<EpisodeLog, SimError> {
    let syn = &config.scene.synthetic;
    let mut scene = SyntheticLinearScene::new(syn);
    let dim = scene.dim();
    let mut streams = EpisodeStreams::new(seed);
    let mut policy = make_policy(config, dim, scene.num_arms());
    let mut ledger = RegretLedger::new();
    let mut pri_rows = Vec::with_capacity(config.horizon);
    let arm_ids: Vec<u32> = (0..scene.num_arms() as u32).collect();

    for t in 1..=config.horizon as u64 {
        scene.draw_contexts(&mut streams.scene);
        let xs: Vec<&[f64]> = scene.contexts().iter().map(|c| c.as_slice()).collect();
        let (arm, dist) = match &mut policy {
            Policy::Ts(ts) => (ts.select_index(&xs, &mut streams.policy), None),
            Policy::Exp3(exp3) => {
                let dist = exp3.distribution_for_ids(&arm_ids);
                let arm = streams.policy.sample_categorical(&dist);
                (arm, Some(dist))
            }
            _ => unreachable!("validated in run_episode"),
        };
        let realized = scene.realized_cost(arm, &mut streams.scene);
        let expected = scene.expected_cost(arm);
        let oracle = scene.oracle_cost();
        // Regret is charged on the known noise-free model; the learner still
        // sees the noisy realization.
        ledger.record(expected, oracle);

        match &mut policy {
            Policy::Ts(ts) => ts.update(xs[arm], realized),
            Policy::Exp3(exp3) => {
                let slices: Vec<(u32, &[f64])> =
                    arm_ids.iter().map(|&id| (id, xs[id as usize])).collect();
                exp3.update_slices(&slices, arm, realized, dist.as_ref().unwrap())
                    .map_err(|_| SimError::DegenerateContexts { pri: t })
                    .map(|_| ())?
            }
            _ => unreachable!(),
        }

        pri_rows.push(PriRow {
            t,
            sensed_mask: 0,
            true_mask: 0,
            waveform_id: arm as u32,
            cost: realized,
            oracle_cost: oracle,
            cumulative_regret: ledger.cumulative_regret(),
        });
    }

    Ok(EpisodeLog {
        seed,
        scenario: config.scenario,
        policy: config.policy,
        num_subchannels: 0,
        pri_rows,
        cpi_rows: Vec::new(),
    })
}

/// Accumulates one CPI of (waveform, true state) pairs and turns them into
/// imaging + tracking rows.
struct CpiProcessor {
    geometry: rdproc::ReceiveGeometry,
    cfar: CfarConfig,
    taper: rdproc::Taper,
    noise_power: f64,
    intf_power: f64,
    target_gain: f64,
    target_range0: f64,
    target_rate: f64,
    eta_linear: f64,
    carrier_hz: f64,
    pulses: Vec<(Waveform, InterferenceState)>,
    cpi_pulses: usize,
    cpi_index: usize,
    track: TrackState,
    first_cpi: bool,
}

impl CpiProcessor {
    fn new(
        config: &ExperimentConfig,
        rd: &crate::config::RdprocConfig,
        catalog: &WaveformCatalog,
    ) -> Self {
        let geometry = rdproc::ReceiveGeometry {
            sample_rate: rd.sample_rate_hz,
            pri: rd.pri_s,
            fast_time_samples: rd.fast_time_samples,
            carrier_hz: config.catalog.carrier_hz,
            channel_bandwidth: catalog.channel_bandwidth(),
        };
        let noise_ref = if rd.noise_power > 0.0 { rd.noise_power } else { 1.0 };
        let target_gain = math::sqrt(noise_ref * math::db_to_linear(rd.target.snr_db));
        let intf_db = match config.scenario {
            ScenarioKind::Jammer => config.scene.jammer.jnr_db,
            _ => rd.coexistence_inr_db,
        };
        let intf_power = noise_ref * math::db_to_linear(intf_db);
        // Deterministic, policy-independent track initialization half a
        // standard deviation off truth.
        let init = [
            rd.target.initial_range_m + 0.5 * config.tracker.initial_range_std_m,
            rd.target.velocity_mps + 0.5 * config.tracker.initial_rate_std_mps,
        ];
        let cov = Sym2::diag(
            config.tracker.initial_range_std_m * config.tracker.initial_range_std_m,
            config.tracker.initial_rate_std_mps * config.tracker.initial_rate_std_mps,
        );
        Self {
            geometry,
            cfar: rd.cfar,
            taper: rd.taper,
            noise_power: rd.noise_power,
            intf_power,
            target_gain,
            target_range0: rd.target.initial_range_m,
            target_rate: rd.target.velocity_mps,
            eta_linear: math::db_to_linear(config.tracker.eta_db),
            carrier_hz: config.catalog.carrier_hz,
            pulses: Vec::with_capacity(rd.cpi_pulses),
            cpi_pulses: rd.cpi_pulses,
            cpi_index: 0,
            track: TrackState::new(init, cov, config.tracker.accel_std),
            first_cpi: true,
        }
    }

    fn push(&mut self, w: Waveform, state: InterferenceState) {
        self.pulses.push((w, state));
    }

    fn is_full(&self) -> bool {
        self.pulses.len() >= self.cpi_pulses
    }

    fn process(
        &mut self,
        catalog: &WaveformCatalog,
        streams: &mut EpisodeStreams,
    ) -> Result<CpiRow, SimError> {
        let dt = self.cpi_pulses as f64 * self.geometry.pri;
        let cpi_start_s = self.cpi_index as f64 * dt;
        let truth_range = self.target_range0 + self.target_rate * cpi_start_s;
        let target = PointTarget::from_range(
            truth_range,
            self.target_rate,
            Cpx::new(self.target_gain, 0.0),
        );

        let train: Vec<Waveform> = self.pulses.iter().map(|(w, _)| *w).collect();
        let interference: Vec<(InterferenceState, f64)> = self
            .pulses
            .iter()
            .map(|(_, s)| (s.clone(), self.intf_power))
            .collect();
        self.pulses.clear();

        let buffer = rdproc::receive(
            &train,
            &[target],
            &interference,
            self.noise_power,
            &self.geometry,
            &mut streams.rx_noise,
        )?;
        let map = range_doppler(&buffer, catalog, self.taper)?;
        let detections = cfar_2d(&map, &self.cfar)?;
        let truth_bin = TruthBin {
            range_bin: map.range_to_bin(truth_range),
            doppler_bin: map.range_rate_to_bin(self.target_rate, self.carrier_hz),
        };
        let met = metrics(&map, &[truth_bin], &detections);

        // Strongest detection becomes the measurement; misses coast on the
        // prediction.
        let measurement = detections.first().map(|d| {
            [
                d.range_bin as f64 * map.range_bin_m,
                map.range_rate_from_bin(d.doppler_bin, self.carrier_hz),
            ]
        });

        let modal = modal_waveform(&train, catalog);
        let noise = measurement_noise(
            modal.pulse_duration,
            modal.chirp_rate(),
            self.eta_linear,
            self.carrier_hz,
        )
        .expect("validated tracker parameters");

        if !self.first_cpi {
            self.track.predict(dt);
        }
        let nis = measurement.map(|z| self.track.update(z, &noise).nis);
        self.first_cpi = false;

        let row = CpiRow {
            cpi_index: self.cpi_index,
            num_detections: detections.len(),
            pd: met.pd,
            pfa_hat: met.pfa_hat,
            image_sinr_db: met.image_sinr_db,
            peak_sidelobe_db: met.peak_sidelobe_db,
            truth_range_m: truth_range,
            truth_rate_mps: self.target_rate,
            meas_range_m: measurement.map(|z| z[0]),
            meas_rate_mps: measurement.map(|z| z[1]),
            est_range_m: self.track.estimate[0],
            est_rate_mps: self.track.estimate[1],
            p11: self.track.covariance.m11,
            p12: self.track.covariance.m12,
            p22: self.track.covariance.m22,
            nis,
            chosen_pulse_s: modal.pulse_duration,
            chosen_chirp_rate: modal.chirp_rate(),
        };
        self.cpi_index += 1;
        Ok(row)
    }
}

/// Most frequently transmitted waveform in the train, lowest id on ties.
fn modal_waveform(train: &[Waveform], catalog: &WaveformCatalog) -> Waveform {
    let mut counts = alloc::vec![0usize; catalog.len()];
    for w in train {
        counts[w.id as usize] += 1;
    }
    let mut best = 0usize;
    for (id, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = id;
        }
    }
    catalog.get(best as u32).expect("id within catalog")
}
