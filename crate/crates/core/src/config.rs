//! Experiment configuration: one document describing the scenario, the
//! policy, the catalog, and every subsystem's parameters. The CLI reads
//! this as JSON; defaults reproduce the standard simulation setup.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::rdproc::{CfarConfig, Taper};
use crate::scene::{CoexistenceConfig, JammerConfig, SyntheticLinearConfig};
use crate::spectrum::CostParams;
use crate::tracker::TrackerCoupling;
use crate::waveforms::{CatalogError, OccupancyConvention, WaveformCatalog};

/// Which interference environment drives the episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ScenarioKind {
    #[default]
    Coexistence,
    Jammer,
    SyntheticLinear,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Coexistence => "coexistence",
            ScenarioKind::Jammer => "jammer",
            ScenarioKind::SyntheticLinear => "synthetic-linear",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "coexistence" => Ok(ScenarioKind::Coexistence),
            "jammer" => Ok(ScenarioKind::Jammer),
            "synthetic-linear" | "synthetic_linear" => Ok(ScenarioKind::SyntheticLinear),
            other => Err(format!("unknown scenario `{other}`")),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which waveform-selection policy runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PolicyKind {
    #[default]
    Ts,
    Exp3,
    Reactive,
    Fixed,
}

impl PolicyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::Ts => "ts",
            PolicyKind::Exp3 => "exp3",
            PolicyKind::Reactive => "reactive",
            PolicyKind::Fixed => "fixed",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ts" => Ok(PolicyKind::Ts),
            "exp3" => Ok(PolicyKind::Exp3),
            "reactive" => Ok(PolicyKind::Reactive),
            "fixed" => Ok(PolicyKind::Fixed),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Grid-catalog generator parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CatalogConfig {
    pub channel_bandwidth_hz: f64,
    pub num_subchannels: usize,
    pub pulse_duration_s: f64,
    pub carrier_hz: f64,
    /// Use the literal `[f - BW, f + BW]` occupancy interval instead of the
    /// physical half-width convention.
    pub literal_occupancy: bool,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        Self {
            channel_bandwidth_hz: 100e6,
            num_subchannels: 10,
            pulse_duration_s: 1e-6,
            carrier_hz: 3e9,
            literal_occupancy: false,
        }
    }
}

impl CatalogConfig {
    pub fn build(&self) -> Result<WaveformCatalog, CatalogError> {
        let cat = WaveformCatalog::grid(
            self.channel_bandwidth_hz,
            self.num_subchannels,
            self.pulse_duration_s,
            self.carrier_hz,
        )?;
        Ok(if self.literal_occupancy {
            cat.with_occupancy(OccupancyConvention::Literal)
        } else {
            cat
        })
    }
}

/// Cost-function weights. The experiment default expresses a strong
/// interference-avoidance preference (`beta1 = 12/(13B)`,
/// `beta2 = 1/(13B)`): in an interference-limited scene (INR well above
/// SNR) a collision costs detections outright while narrower bandwidth
/// only degrades resolution. The asymmetry is also what gives statistical
/// hedging its value over snapshot-greedy selection; with equal weights a
/// certain missed megahertz costs exactly as much as a possible collided
/// one and no learned caution can pay.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CostConfig {
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub allow_negative_missed: bool,
}

impl CostConfig {
    pub fn build(&self, channel_bandwidth: f64) -> Result<CostParams, crate::spectrum::InvalidCostParams> {
        let mut p = CostParams::new(
            self.beta1.unwrap_or(12.0 / (13.0 * channel_bandwidth)),
            self.beta2.unwrap_or(1.0 / (13.0 * channel_bandwidth)),
            channel_bandwidth,
        )?;
        p.allow_negative_missed = self.allow_negative_missed;
        Ok(p)
    }
}

/// Spectrum-sensing imperfection.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SensingConfig {
    /// Independent per-bit flip probability, in `[0, 0.5)`.
    pub flip_prob: f64,
}

impl Default for SensingConfig {
    fn default() -> Self {
        Self { flip_prob: 0.02 }
    }
}

/// Learner hyperparameters. `None` picks the horizon-dependent defaults
/// from the regret analysis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct BanditConfig {
    /// Thompson Sampling exploration scale.
    pub ts_v: f64,
    pub exp3_epsilon: Option<f64>,
    pub exp3_gamma: Option<f64>,
}

impl Default for BanditConfig {
    fn default() -> Self {
        Self {
            ts_v: 1.0,
            exp3_epsilon: None,
            exp3_gamma: None,
        }
    }
}

/// Scene parameters for every scenario (only the active one is used).
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SceneConfig {
    pub coexistence: CoexistenceConfig,
    pub jammer: JammerConfig,
    pub synthetic: SyntheticLinearConfig,
}

/// The simulated point target tracked through the episode.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TargetConfig {
    pub initial_range_m: f64,
    pub velocity_mps: f64,
    /// Per-sample amplitude SNR of the target return, dB (processing gain
    /// comes on top of this).
    pub snr_db: f64,
}

impl Default for TargetConfig {
    fn default() -> Self {
        Self {
            initial_range_m: 600.0,
            velocity_mps: 15.0,
            snr_db: -10.0,
        }
    }
}

/// CPI processing configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RdprocConfig {
    pub sample_rate_hz: f64,
    /// Simulated fast-time window per pulse (power of two).
    pub fast_time_samples: usize,
    /// Pulses per CPI.
    pub cpi_pulses: usize,
    pub pri_s: f64,
    pub taper: Taper,
    pub cfar: CfarConfig,
    /// Thermal noise power per complex sample (linear).
    pub noise_power: f64,
    /// Interference-to-noise ratio per jammed sub-channel in the
    /// coexistence scenario, dB.
    pub coexistence_inr_db: f64,
    pub target: TargetConfig,
}

impl Default for RdprocConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: 200e6,
            fast_time_samples: 4096,
            cpi_pulses: 64,
            pri_s: 409.6e-6,
            taper: Taper::Hann,
            cfar: CfarConfig::default(),
            noise_power: 1.0,
            coexistence_inr_db: 20.0,
            target: TargetConfig::default(),
        }
    }
}

/// Kalman tracker configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TrackerConfig {
    /// White-acceleration process noise, m/s².
    pub accel_std: f64,
    /// SNR (dB) used in the waveform-dependent measurement-noise model.
    pub eta_db: f64,
    /// Initial range standard deviation, m.
    pub initial_range_std_m: f64,
    /// Initial range-rate standard deviation, m/s.
    pub initial_rate_std_mps: f64,
    pub coupling: TrackerCoupling,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            accel_std: 1.0,
            eta_db: 13.0,
            initial_range_std_m: 50.0,
            initial_rate_std_mps: 10.0,
            coupling: TrackerCoupling::Off,
        }
    }
}

/// The full experiment description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ExperimentConfig {
    pub scenario: ScenarioKind,
    pub policy: PolicyKind,
    /// Horizon in PRIs.
    pub horizon: usize,
    /// Distortion bound; `None` disables the constraint.
    pub d_hat: Option<f64>,
    pub seeds: Vec<u64>,
    pub catalog: CatalogConfig,
    pub cost: CostConfig,
    pub sensing: SensingConfig,
    pub bandit: BanditConfig,
    pub scene: SceneConfig,
    /// CPI processing; `None` runs the selection loop without imaging.
    pub rdproc: Option<RdprocConfig>,
    pub tracker: TrackerConfig,
    pub output_dir: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::default(),
            policy: PolicyKind::default(),
            horizon: 20_000,
            d_hat: Some(0.2),
            seeds: (1..=10).collect(),
            catalog: CatalogConfig::default(),
            cost: CostConfig::default(),
            sensing: SensingConfig::default(),
            bandit: BanditConfig::default(),
            scene: SceneConfig::default(),
            rdproc: None,
            tracker: TrackerConfig::default(),
            output_dir: None,
        }
    }
}

/// A validation failure, with the path of the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    /// Validate every field, collecting all failures with their paths.
    pub fn validate(&self) -> Result<(), Vec<ConfigError>> {
        let mut errors = Vec::new();
        fn fail_into(errors: &mut Vec<ConfigError>, field: &str, message: String) {
            errors.push(ConfigError {
                field: field.to_string(),
                message,
            });
        }
        macro_rules! fail {
            ($field:expr, $message:expr $(,)?) => {
                fail_into(&mut errors, $field, $message)
            };
        }

        if self.horizon == 0 {
            fail!("horizon", "must be at least 1".to_string());
        }
        if self.seeds.is_empty() {
            fail!("seeds", "must list at least one seed".to_string());
        }
        if let Some(d) = self.d_hat {
            if !(d > 0.0 && d <= 1.0) {
                fail!("d_hat", format!("must lie in (0, 1], got {d}"));
            }
        }
        if !(self.sensing.flip_prob >= 0.0 && self.sensing.flip_prob < 0.5) {
            fail!(
                "sensing.flip_prob",
                format!("must lie in [0, 0.5), got {}", self.sensing.flip_prob),
            );
        }
        if self.bandit.ts_v <= 0.0 {
            fail!("bandit.ts_v", "must be positive".to_string());
        }
        if let Some(e) = self.bandit.exp3_epsilon {
            if !(e > 0.0 && e < 1.0) {
                fail!("bandit.exp3_epsilon", format!("must lie in (0, 1), got {e}"));
            }
        }
        if let Some(g) = self.bandit.exp3_gamma {
            if !(0.0..=1.0).contains(&g) {
                fail!("bandit.exp3_gamma", format!("must lie in [0, 1], got {g}"));
            }
        }

        match self.catalog.build() {
            Err(e) => fail!("catalog", format!("{e}")),
            Ok(catalog) => {
                if self.cost.build(catalog.channel_bandwidth()).is_err() {
                    fail!(
                        "cost",
                        "beta1/beta2 must be nonnegative with beta1 + beta2 <= 1/B".to_string(),
                    );
                }
                if let Some(rd) = &self.rdproc {
                    self.validate_rdproc(rd, &catalog, &mut errors);
                }
            }
        }

        let c = &self.scene.coexistence;
        if !(0.0..=1.0).contains(&c.p_on) || !(0.0..=1.0).contains(&c.p_off) {
            fail!("scene.coexistence", "p_on and p_off must lie in [0, 1]".to_string());
        }
        if c.p_on + c.p_off <= 0.0 {
            fail!("scene.coexistence", "p_on + p_off must be positive".to_string());
        }
        if c.bs_power_dbm.0 > c.bs_power_dbm.1 || c.bs_distance_km.0 > c.bs_distance_km.1 {
            fail!("scene.coexistence", "ranges must satisfy lo <= hi".to_string());
        }
        if c.shadow_std < 0.0 {
            fail!("scene.coexistence.shadow_std", "must be nonnegative".to_string());
        }
        if !(0.0..1.0).contains(&c.shadow_rho) {
            fail!("scene.coexistence.shadow_rho", "must lie in [0, 1)".to_string());
        }
        if c.activity_duty_spread < 1.0 {
            fail!("scene.coexistence.activity_duty_spread", "must be >= 1".to_string());
        }
        if !(0.0..=1.0).contains(&c.fast_fraction) {
            fail!("scene.coexistence.fast_fraction", "must lie in [0, 1]".to_string());
        }
        if !(0.0..=1.0).contains(&c.fast_p_on) || !(0.0..=1.0).contains(&c.fast_p_off) {
            fail!("scene.coexistence", "fast_p_on and fast_p_off must lie in [0, 1]".to_string());
        }
        if !(c.occupancy_target > 0.0 && c.occupancy_target < 1.0) {
            fail!("scene.coexistence.occupancy_target", "must lie in (0, 1)".to_string());
        }
        if !self.scene.jammer.jnr_db.is_finite() {
            fail!("scene.jammer.jnr_db", "must be finite".to_string());
        }
        let syn = &self.scene.synthetic;
        if syn.num_arms < 2 {
            fail!("scene.synthetic.num_arms", "need at least 2 arms".to_string());
        }
        if syn.theta.is_empty() {
            fail!("scene.synthetic.theta", "must be non-empty".to_string());
        }
        if !(0.0..=1.0).contains(&syn.noise_std) {
            fail!(
                "scene.synthetic.noise_std",
                "must lie in [0, 1] (1-subgaussian)".to_string(),
            );
        }

        let t = &self.tracker;
        if t.accel_std < 0.0 {
            fail!("tracker.accel_std", "must be nonnegative".to_string());
        }
        if !t.eta_db.is_finite() {
            fail!("tracker.eta_db", "must be finite".to_string());
        }
        if let TrackerCoupling::Penalty { weight } = t.coupling {
            if weight < 0.0 {
                fail!("tracker.coupling.weight", "must be nonnegative".to_string());
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    fn validate_rdproc(
        &self,
        rd: &RdprocConfig,
        catalog: &WaveformCatalog,
        errors: &mut Vec<ConfigError>,
    ) {
        let mut fail = |field: &str, message: String| {
            errors.push(ConfigError {
                field: field.to_string(),
                message,
            });
        };
        if !rd.fast_time_samples.is_power_of_two() {
            fail("rdproc.fast_time_samples", "must be a power of two".to_string());
        }
        if rd.cpi_pulses < 2 {
            fail("rdproc.cpi_pulses", "need at least 2 pulses per CPI".to_string());
        }
        if rd.fast_time_samples as f64 > rd.sample_rate_hz * rd.pri_s {
            fail(
                "rdproc.fast_time_samples",
                "fast-time window exceeds one PRI".to_string(),
            );
        }
        // The widest waveform sets the Nyquist requirement.
        let max_edge = catalog
            .waveforms()
            .iter()
            .map(|w| w.center_freq + 0.5 * w.bandwidth)
            .fold(0.0f64, f64::max);
        if rd.sample_rate_hz < 2.0 * max_edge {
            fail(
                "rdproc.sample_rate_hz",
                format!("must be at least 2 x {max_edge} for this catalog"),
            );
        }
        if rd.noise_power < 0.0 {
            fail("rdproc.noise_power", "must be nonnegative".to_string());
        }
        let span = 8.0 * self.catalog.pulse_duration_s;
        let window_s = rd.fast_time_samples as f64 / rd.sample_rate_hz;
        let delay = 2.0 * rd.target.initial_range_m / crate::SPEED_OF_LIGHT;
        if delay + span > window_s {
            fail(
                "rdproc.target.initial_range_m",
                "target echo does not fit in the fast-time window".to_string(),
            );
        }
        let w_r = rd.cfar.guard_range + rd.cfar.train_range;
        let w_d = rd.cfar.guard_doppler + rd.cfar.train_doppler;
        if 2 * w_r + 1 > rd.fast_time_samples
            || 2 * w_d + 1 > rd.cpi_pulses
            || rd.cfar.num_training_cells() == 0
            || !(rd.cfar.pfa > 0.0 && rd.cfar.pfa < 1.0)
        {
            fail("rdproc.cfar", "window degenerate or larger than the map".to_string());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        let config = ExperimentConfig::default();
        assert!(config.validate().is_ok());
        let mut with_rdproc = ExperimentConfig::default();
        with_rdproc.rdproc = Some(RdprocConfig::default());
        assert!(with_rdproc.validate().is_ok());
    }

    #[test]
    fn bad_fields_are_reported_with_paths() {
        let mut config = ExperimentConfig::default();
        config.horizon = 0;
        config.d_hat = Some(1.5);
        config.sensing.flip_prob = 0.9;
        let errors = config.validate().unwrap_err();
        let fields: Vec<_> = errors.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"horizon"));
        assert!(fields.contains(&"d_hat"));
        assert!(fields.contains(&"sensing.flip_prob"));
    }

    #[test]
    fn rdproc_window_checks() {
        let mut config = ExperimentConfig::default();
        let mut rd = RdprocConfig::default();
        rd.fast_time_samples = 3000;
        rd.target.initial_range_m = 1e6;
        config.rdproc = Some(rd);
        let errors = config.validate().unwrap_err();
        let fields: Vec<_> = errors.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"rdproc.fast_time_samples"));
        assert!(fields.contains(&"rdproc.target.initial_range_m"));
    }

    #[cfg(feature = "serde")]
    #[test]
    fn config_json_roundtrip_is_identity() {
        let mut config = ExperimentConfig::default();
        config.rdproc = Some(RdprocConfig::default());
        config.d_hat = None;
        config.output_dir = Some("out".to_string());
        let json = serde_json::to_string_pretty(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
        let json2 = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(json, json2);
    }

    #[cfg(feature = "serde")]
    #[test]
    fn minimal_json_uses_defaults() {
        let config: ExperimentConfig =
            serde_json::from_str(r#"{"scenario":"jammer","policy":"exp3","seeds":[7]}"#).unwrap();
        assert_eq!(config.scenario, ScenarioKind::Jammer);
        assert_eq!(config.policy, PolicyKind::Exp3);
        assert_eq!(config.seeds, alloc::vec![7]);
        assert_eq!(config.horizon, 20_000);
        assert_eq!(config.d_hat, Some(0.2));
    }

    #[test]
    fn kind_string_roundtrip() {
        for s in [ScenarioKind::Coexistence, ScenarioKind::Jammer, ScenarioKind::SyntheticLinear] {
            assert_eq!(s.as_str().parse::<ScenarioKind>().unwrap(), s);
        }
        for p in [PolicyKind::Ts, PolicyKind::Exp3, PolicyKind::Reactive, PolicyKind::Fixed] {
            assert_eq!(p.as_str().parse::<PolicyKind>().unwrap(), p);
        }
        assert!("bogus".parse::<ScenarioKind>().is_err());
    }
}
