//! Radar/cellular coexistence interference channel.
//!
//! `N_BS` base stations sit 5–6 km from the radar, each occupying a fixed,
//! randomly assigned block of two contiguous sub-channels (20 MHz of the
//! 100 MHz channel). Every PRI each station's on/off activity advances one
//! step of a two-state Markov chain, and active stations contribute
//! `P_j * G_r * d_j^(-psi) * exp(X_j)` of received power to their block,
//! with a fresh log-normal shadowing draw `X_j` per PRI. A sub-channel is
//! declared occupied when its aggregate power crosses the harmful-
//! interference threshold, which by default is calibrated at seed time so
//! the mean occupancy lands in a target band. Channel evolution never
//! depends on the radar's transmissions.

use alloc::vec::Vec;

use crate::math;
use crate::rng::Stream;
use crate::spectrum::InterferenceState;

/// Coexistence scene parameters. Defaults follow the simulation study's
/// stated values: 90 stations at 40–46.5 dBm, 5–6 km, path loss 3.5,
/// 20 MHz interferer bandwidth.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CoexistenceConfig {
    /// Number of base stations.
    pub num_bs: usize,
    /// Transmit power range, dBm.
    pub bs_power_dbm: (f64, f64),
    /// Distance range to the radar, km.
    pub bs_distance_km: (f64, f64),
    /// Path-loss exponent.
    pub path_loss_exp: f64,
    /// Interferer bandwidth, Hz (determines the sub-channel block size).
    pub intf_bandwidth_hz: f64,
    /// Radar receive gain toward the interferers (linear).
    pub radar_rx_gain: f64,
    /// Shadowing mean, nepers.
    pub shadow_mean: f64,
    /// Shadowing standard deviation, nepers.
    pub shadow_std: f64,
    /// Per-PRI AR(1) coefficient of each station's shadowing process in
    /// [0, 1): `X(t) = rho X(t-1) + sqrt(1 - rho^2) sigma xi`. Zero makes
    /// draws independent; the default keeps the channel's occupancy pattern
    /// coherent over many PRIs, which is what lets sensed history carry
    /// information about the next PRI.
    pub shadow_rho: f64,
    /// Per-PRI probability an idle (slow-population) station turns on.
    pub p_on: f64,
    /// Per-PRI probability an active (slow-population) station turns off.
    pub p_off: f64,
    /// Log-uniform spread of per-station *duty cycles* in the slow
    /// population: `r_j` multiplies `p_on` and divides `p_off`,
    /// concentrating interference on the blocks of high-duty stations.
    /// 1 disables.
    pub activity_duty_spread: f64,
    /// Fraction of stations in the fast bursty population, whose blocks
    /// flip on a couple-of-PRI timescale. These are what punish acting on
    /// the instantaneous channel snapshot alone.
    pub fast_fraction: f64,
    /// Fast-population turn-on probability per PRI.
    pub fast_p_on: f64,
    /// Fast-population turn-off probability per PRI.
    pub fast_p_off: f64,
    /// Harmful-interference threshold, dBm. `None` calibrates at seed time
    /// so mean occupancy falls at `occupancy_target`.
    pub threshold_dbm: Option<f64>,
    /// Calibration target for mean per-sub-channel occupancy.
    pub occupancy_target: f64,
}

impl Default for CoexistenceConfig {
    fn default() -> Self {
        Self {
            num_bs: 90,
            bs_power_dbm: (40.0, 46.5),
            bs_distance_km: (5.0, 6.0),
            path_loss_exp: 3.5,
            intf_bandwidth_hz: 20e6,
            radar_rx_gain: 1.0,
            shadow_mean: 0.0,
            shadow_std: 1.0,
            shadow_rho: 0.9999,
            p_on: 0.01,
            p_off: 0.03,
            activity_duty_spread: 8.0,
            fast_fraction: 0.06,
            fast_p_on: 0.4,
            fast_p_off: 0.5,
            threshold_dbm: None,
            occupancy_target: 0.4,
        }
    }
}

#[derive(Debug, Clone)]
struct BaseStation {
    /// Received-power coefficient `P_j * G_r * d_j^(-psi)` in watts.
    coeff: f64,
    /// First sub-channel of the occupied contiguous block.
    first_subchannel: usize,
    active: bool,
    /// Current shadowing state, nepers.
    shadow: f64,
    /// This station's Markov activity rates.
    p_on: f64,
    p_off: f64,
}

/// The stochastic coexistence scene. Owns its RNG draws; stepping consumes
/// only from the stream passed in, so replicas with distinct seeds are
/// independent.
#[derive(Debug, Clone)]
pub struct CoexistenceScene {
    stations: Vec<BaseStation>,
    block_len: usize,
    num_subchannels: usize,
    channel_bandwidth: f64,
    threshold_watts: f64,
    config: CoexistenceConfig,
}

impl CoexistenceScene {
    /// Place stations, assign blocks, seed activity, and calibrate the
    /// threshold. `setup` randomness (placement, calibration burn-in) comes
    /// from `calib`, so the per-PRI `scene` stream starts aligned no matter
    /// how calibration is configured.
    pub fn new(
        config: &CoexistenceConfig,
        num_subchannels: usize,
        channel_bandwidth: f64,
        calib: &mut Stream,
    ) -> Self {
        let subchannel_width = channel_bandwidth / num_subchannels as f64;
        let block_len = ((config.intf_bandwidth_hz / subchannel_width) as usize).max(1);
        let max_first = num_subchannels.saturating_sub(block_len);

        let log_uniform = |rng: &mut Stream, spread: f64| {
            let span = math::ln(spread.max(1.0));
            math::exp(rng.uniform(-span, span))
        };
        let mut stations = Vec::with_capacity(config.num_bs);
        for _ in 0..config.num_bs {
            let power_dbm = calib.uniform(config.bs_power_dbm.0, config.bs_power_dbm.1);
            let power_w = math::db_to_linear(power_dbm - 30.0);
            let dist_m = calib.uniform(config.bs_distance_km.0, config.bs_distance_km.1) * 1e3;
            let coeff = power_w * config.radar_rx_gain * math::powf(dist_m, -config.path_loss_exp);
            let (p_on, p_off) = if calib.bernoulli(config.fast_fraction) {
                (config.fast_p_on, config.fast_p_off)
            } else {
                let duty = log_uniform(calib, config.activity_duty_spread);
                (
                    (config.p_on * duty).clamp(0.0, 1.0),
                    (config.p_off / duty).clamp(1e-3, 1.0),
                )
            };
            let p_stationary = p_on / (p_on + p_off);
            stations.push(BaseStation {
                coeff,
                first_subchannel: calib.next_index(max_first + 1),
                active: calib.bernoulli(p_stationary),
                shadow: calib.normal(config.shadow_mean, config.shadow_std),
                p_on,
                p_off,
            });
        }

        let mut scene = Self {
            stations,
            block_len,
            num_subchannels,
            channel_bandwidth,
            threshold_watts: 0.0,
            config: config.clone(),
        };

        scene.threshold_watts = match config.threshold_dbm {
            Some(dbm) => math::db_to_linear(dbm - 30.0),
            None => scene.calibrate_threshold(calib),
        };
        scene
    }

    /// Choose the threshold as the `(1 - occupancy_target)` quantile of
    /// per-sub-channel aggregate powers over a burn-in of the same dynamics.
    fn calibrate_threshold(&mut self, calib: &mut Stream) -> f64 {
        const BURN_IN: usize = 2000;
        let mut samples = Vec::with_capacity(BURN_IN * self.num_subchannels);
        let mut activity: Vec<bool> = self.stations.iter().map(|b| b.active).collect();
        let mut shadows: Vec<f64> = self.stations.iter().map(|b| b.shadow).collect();
        for _ in 0..BURN_IN {
            let mut agg = alloc::vec![0.0f64; self.num_subchannels];
            for ((bs, a), x) in self.stations.iter().zip(activity.iter_mut()).zip(shadows.iter_mut()) {
                *a = advance_activity(*a, bs.p_on, bs.p_off, calib);
                *x = advance_shadow(*x, &self.config, calib);
                if *a {
                    let p = bs.coeff * math::exp(*x);
                    for l in bs.first_subchannel..(bs.first_subchannel + self.block_len) {
                        agg[l] += p;
                    }
                }
            }
            samples.extend_from_slice(&agg);
        }
        samples.sort_by(|a, b| a.total_cmp(b));
        let idx = ((1.0 - self.config.occupancy_target) * samples.len() as f64) as usize;
        samples[idx.min(samples.len() - 1)].max(f64::MIN_POSITIVE)
    }

    /// Harmful-interference threshold currently in force, watts.
    pub fn threshold_watts(&self) -> f64 {
        self.threshold_watts
    }

    /// Per-sub-channel aggregate interference power for the current PRI,
    /// advancing station activity and drawing fresh shadowing.
    pub fn step_powers(&mut self, rng: &mut Stream) -> Vec<f64> {
        let mut agg = alloc::vec![0.0f64; self.num_subchannels];
        for bs in self.stations.iter_mut() {
            bs.active = advance_activity(bs.active, bs.p_on, bs.p_off, rng);
            bs.shadow = advance_shadow(bs.shadow, &self.config, rng);
            if bs.active {
                let p = bs.coeff * math::exp(bs.shadow);
                for l in bs.first_subchannel..(bs.first_subchannel + self.block_len) {
                    agg[l] += p;
                }
            }
        }
        agg
    }

    /// Advance one PRI and return the thresholded interference state.
    pub fn step(&mut self, rng: &mut Stream) -> InterferenceState {
        let agg = self.step_powers(rng);
        let bits = agg.iter().map(|&p| p > self.threshold_watts).collect();
        InterferenceState::from_bits(bits, self.channel_bandwidth)
    }

    pub fn num_active(&self) -> usize {
        self.stations.iter().filter(|b| b.active).count()
    }
}

fn advance_activity(active: bool, p_on: f64, p_off: f64, rng: &mut Stream) -> bool {
    if active {
        !rng.bernoulli(p_off)
    } else {
        rng.bernoulli(p_on)
    }
}

/// AR(1) step preserving the stationary N(mean, std^2) marginal. The draw
/// is consumed even when rho = 0 so stream alignment does not depend on
/// the coefficient.
fn advance_shadow(x: f64, config: &CoexistenceConfig, rng: &mut Stream) -> f64 {
    let rho = config.shadow_rho;
    let innovation = rng.normal(0.0, config.shadow_std);
    config.shadow_mean + rho * (x - config.shadow_mean) + math::sqrt(1.0 - rho * rho) * innovation
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::EpisodeStreams;

    const B: f64 = 100e6;
    const S: usize = 10;

    #[test]
    fn no_active_stations_means_clear_channel() {
        let config = CoexistenceConfig {
            p_on: 0.0,
            p_off: 1.0,
            activity_duty_spread: 1.0,
            fast_fraction: 0.0,
            threshold_dbm: Some(-200.0),
            ..CoexistenceConfig::default()
        };
        let mut streams = EpisodeStreams::new(1);
        let mut scene = CoexistenceScene::new(&config, S, B, &mut streams.scene_calib);
        for _ in 0..50 {
            let s = scene.step(&mut streams.scene);
            assert!(s.all_zero());
        }
    }

    #[test]
    fn single_station_path_loss_value() {
        let config = CoexistenceConfig {
            num_bs: 1,
            bs_power_dbm: (43.0, 43.0),
            bs_distance_km: (5.5, 5.5),
            shadow_std: 0.0,
            p_on: 1.0,
            p_off: 0.0,
            activity_duty_spread: 1.0,
            fast_fraction: 0.0,
            threshold_dbm: Some(-300.0),
            ..CoexistenceConfig::default()
        };
        let mut streams = EpisodeStreams::new(2);
        let mut scene = CoexistenceScene::new(&config, S, B, &mut streams.scene_calib);
        let powers = scene.step_powers(&mut streams.scene);
        // 43 dBm = 10^1.3 W at 5500 m with exponent 3.5 and X = 0.
        let expected = math::db_to_linear(13.0) * math::powf(5500.0, -3.5);
        let total: f64 = powers.iter().sum();
        // One station occupies exactly two sub-channels at full power each.
        assert!((total - 2.0 * expected).abs() < 1e-12 * expected);
        assert_eq!(powers.iter().filter(|&&p| p > 0.0).count(), 2);
    }

    #[test]
    fn calibrated_occupancy_in_target_band() {
        let config = CoexistenceConfig::default();
        let mut streams = EpisodeStreams::new(3);
        let mut scene = CoexistenceScene::new(&config, S, B, &mut streams.scene_calib);
        let steps = 10_000;
        let mut ones = 0usize;
        for _ in 0..steps {
            ones += scene.step(&mut streams.scene).count_ones();
        }
        let occ = ones as f64 / (steps * S) as f64;
        assert!((0.3..=0.6).contains(&occ), "mean occupancy {occ}");
    }

    #[test]
    fn occupancy_is_stationary() {
        let config = CoexistenceConfig::default();
        let mut streams = EpisodeStreams::new(4);
        let mut scene = CoexistenceScene::new(&config, S, B, &mut streams.scene_calib);
        let steps = 20_000;
        let mut first = 0usize;
        let mut second = 0usize;
        for t in 0..steps {
            let ones = scene.step(&mut streams.scene).count_ones();
            if t < steps / 2 {
                first += ones;
            } else {
                second += ones;
            }
        }
        let n = (steps / 2 * S) as f64;
        let p1 = first as f64 / n;
        let p2 = second as f64 / n;
        // Split-half difference within 3 sigma. Shadowing correlation
        // shrinks the effective sample count by the integrated
        // autocorrelation time (1+rho)/(1-rho); bits are also correlated
        // across sub-channels, hence the extra factor of sqrt(S).
        let tau = (1.0 + config.shadow_rho) / (1.0 - config.shadow_rho);
        let n_eff = n / (tau * S as f64);
        let sigma = math::sqrt(2.0 * 0.5 * 0.5 / n_eff);
        assert!((p1 - p2).abs() < 3.0 * sigma, "{p1} vs {p2} (3 sigma {})", 3.0 * sigma);
    }

    #[test]
    fn same_seed_reproduces_sequence() {
        let config = CoexistenceConfig::default();
        let mut s1 = EpisodeStreams::new(7);
        let mut s2 = EpisodeStreams::new(7);
        let mut a = CoexistenceScene::new(&config, S, B, &mut s1.scene_calib);
        let mut b = CoexistenceScene::new(&config, S, B, &mut s2.scene_calib);
        for _ in 0..200 {
            assert_eq!(a.step(&mut s1.scene), b.step(&mut s2.scene));
        }
    }
}
