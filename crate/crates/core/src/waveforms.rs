//! LFM chirp waveform catalog, the inter-waveform distortion metric, and the
//! per-PRI constrained sub-catalog.
//!
//! A waveform is described by its center frequency (an offset inside the
//! shared channel `[0, B]`), its swept bandwidth, its pulse duration, and an
//! amplitude. Waveforms live in an immutable, ordered [`WaveformCatalog`];
//! all selection logic works with catalog entries by value.

use alloc::vec::Vec;
use core::fmt;

/// How a waveform's occupied spectral interval is derived from its center
/// frequency and bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OccupancyConvention {
    /// `[f - BW/2, f + BW/2]`: the sweep extent of a physical chirp centered
    /// at `f`. This is the default.
    #[default]
    HalfWidth,
    /// `[f - BW, f + BW]`: the literal interval used by the collision
    /// bandwidth definition, spanning twice the swept bandwidth.
    Literal,
}

/// One LFM chirp: the unit of action for the waveform-selection learners.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Waveform {
    /// Catalog index, contiguous from 0.
    pub id: u32,
    /// Center frequency offset within the shared channel, Hz.
    #[cfg_attr(feature = "serde", serde(rename = "center_freq_hz"))]
    pub center_freq: f64,
    /// Swept bandwidth `BW = T * alpha`, Hz.
    #[cfg_attr(feature = "serde", serde(rename = "bandwidth_hz"))]
    pub bandwidth: f64,
    /// Pulse duration `T`, seconds.
    #[cfg_attr(feature = "serde", serde(rename = "pulse_duration_s"))]
    pub pulse_duration: f64,
    /// Amplitude (dimensionless); 1 unless stated otherwise.
    #[cfg_attr(feature = "serde", serde(default = "default_amplitude", skip_serializing_if = "is_unit"))]
    pub amplitude: f64,
}

#[cfg(feature = "serde")]
fn default_amplitude() -> f64 {
    1.0
}

#[cfg(feature = "serde")]
#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_unit(a: &f64) -> bool {
    *a == 1.0
}

impl Waveform {
    /// Chirp rate `alpha = BW / T`, Hz/s.
    pub fn chirp_rate(&self) -> f64 {
        self.bandwidth / self.pulse_duration
    }

    /// Occupied spectral interval `(lo, hi)` in channel coordinates under
    /// the given convention.
    pub fn occupied_band(&self, convention: OccupancyConvention) -> (f64, f64) {
        match convention {
            OccupancyConvention::HalfWidth => (
                self.center_freq - 0.5 * self.bandwidth,
                self.center_freq + 0.5 * self.bandwidth,
            ),
            OccupancyConvention::Literal => (
                self.center_freq - self.bandwidth,
                self.center_freq + self.bandwidth,
            ),
        }
    }
}

/// Errors raised when assembling a catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogError {
    /// Fewer than two waveforms.
    TooFewWaveforms(usize),
    /// Ids must be `0..W` in order.
    NonContiguousIds { index: usize, id: u32 },
    /// Bandwidth or pulse duration not strictly positive.
    NonPositiveParameter { id: u32 },
    /// `bandwidth >= carrier + center_freq`: the narrowband assumption fails.
    NarrowbandViolation { id: u32 },
    /// Occupied band leaves `[0, B]` under the half-width convention.
    OutOfBand { id: u32 },
    /// Sub-channel count outside `1..=64`.
    BadSubchannelCount(usize),
}

impl fmt::Display for CatalogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogError::TooFewWaveforms(n) => {
                write!(f, "catalog needs at least 2 waveforms, got {n}")
            }
            CatalogError::NonContiguousIds { index, id } => {
                write!(f, "waveform at position {index} has id {id}; ids must be 0..W in order")
            }
            CatalogError::NonPositiveParameter { id } => {
                write!(f, "waveform {id}: bandwidth and pulse duration must be positive")
            }
            CatalogError::NarrowbandViolation { id } => {
                write!(f, "waveform {id}: bandwidth must be far below the absolute center frequency")
            }
            CatalogError::OutOfBand { id } => {
                write!(f, "waveform {id}: occupied band leaves [0, B]")
            }
            CatalogError::BadSubchannelCount(s) => {
                write!(f, "sub-channel count {s} outside 1..=64")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CatalogError {}

/// An immutable, ordered chirp catalog over a shared channel of bandwidth
/// `B` split into `S` sub-channels.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveformCatalog {
    #[cfg_attr(feature = "serde", serde(rename = "channel_bandwidth_hz"))]
    channel_bandwidth: f64,
    num_subchannels: usize,
    waveforms: Vec<Waveform>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "is_default_convention"))]
    occupancy: OccupancyConvention,
}

#[cfg(feature = "serde")]
#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_default_convention(c: &OccupancyConvention) -> bool {
    *c == OccupancyConvention::HalfWidth
}

impl WaveformCatalog {
    /// Validate and build a catalog. `carrier_hz` is the absolute RF carrier
    /// of the shared channel, used only for the narrowband check.
    pub fn new(
        waveforms: Vec<Waveform>,
        channel_bandwidth: f64,
        num_subchannels: usize,
        carrier_hz: f64,
    ) -> Result<Self, CatalogError> {
        if waveforms.len() < 2 {
            return Err(CatalogError::TooFewWaveforms(waveforms.len()));
        }
        if num_subchannels == 0 || num_subchannels > 64 {
            return Err(CatalogError::BadSubchannelCount(num_subchannels));
        }
        for (index, w) in waveforms.iter().enumerate() {
            if w.id as usize != index {
                return Err(CatalogError::NonContiguousIds { index, id: w.id });
            }
            if !(w.bandwidth > 0.0) || !(w.pulse_duration > 0.0) {
                return Err(CatalogError::NonPositiveParameter { id: w.id });
            }
            if w.bandwidth >= carrier_hz + w.center_freq {
                return Err(CatalogError::NarrowbandViolation { id: w.id });
            }
            let (lo, hi) = w.occupied_band(OccupancyConvention::HalfWidth);
            if lo < -1e-6 || hi > channel_bandwidth + 1e-6 {
                return Err(CatalogError::OutOfBand { id: w.id });
            }
        }
        Ok(Self {
            channel_bandwidth,
            num_subchannels,
            waveforms,
            occupancy: OccupancyConvention::HalfWidth,
        })
    }

    /// Grid catalog: every bandwidth in `{B/S, 2B/S, ..., B}` at every
    /// center that keeps the occupied band inside `[0, B]`, on `B/S` steps.
    /// Ordered by bandwidth, then center; ids follow that order.
    pub fn grid(
        channel_bandwidth: f64,
        num_subchannels: usize,
        pulse_duration: f64,
        carrier_hz: f64,
    ) -> Result<Self, CatalogError> {
        let step = channel_bandwidth / num_subchannels as f64;
        let mut waveforms = Vec::new();
        for k in 1..=num_subchannels {
            let bw = k as f64 * step;
            let n_centers = num_subchannels - k + 1;
            for j in 0..n_centers {
                waveforms.push(Waveform {
                    id: waveforms.len() as u32,
                    center_freq: 0.5 * bw + j as f64 * step,
                    bandwidth: bw,
                    pulse_duration,
                    amplitude: 1.0,
                });
            }
        }
        Self::new(waveforms, channel_bandwidth, num_subchannels, carrier_hz)
    }

    pub fn with_occupancy(mut self, convention: OccupancyConvention) -> Self {
        self.occupancy = convention;
        self
    }

    pub fn waveforms(&self) -> &[Waveform] {
        &self.waveforms
    }

    pub fn len(&self) -> usize {
        self.waveforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waveforms.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<Waveform> {
        self.waveforms.get(id as usize).copied()
    }

    /// Channel bandwidth `B`, Hz.
    pub fn channel_bandwidth(&self) -> f64 {
        self.channel_bandwidth
    }

    /// Sub-channel count `S`.
    pub fn num_subchannels(&self) -> usize {
        self.num_subchannels
    }

    /// Sub-channel width `B/S`, Hz.
    pub fn subchannel_width(&self) -> f64 {
        self.channel_bandwidth / self.num_subchannels as f64
    }

    pub fn occupancy_convention(&self) -> OccupancyConvention {
        self.occupancy
    }

    /// The waveform with the largest bandwidth (lowest id on ties).
    pub fn widest(&self) -> Waveform {
        let mut best = self.waveforms[0];
        for &w in &self.waveforms[1..] {
            if w.bandwidth > best.bandwidth {
                best = w;
            }
        }
        best
    }
}

/// Quadratic distortion weights; defaults keep the metric in `[0, 1]` for
/// any in-band pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistortionParams {
    /// Weight on squared center-frequency change, 1/Hz².
    pub gamma1: f64,
    /// Weight on squared bandwidth change, 1/Hz².
    pub gamma2: f64,
}

impl DistortionParams {
    /// `gamma1 = gamma2 = 1 / (2 B²)`, which bounds the distortion by 1 for
    /// any pair of in-band waveforms.
    pub fn normalized(channel_bandwidth: f64) -> Self {
        let g = 1.0 / (2.0 * channel_bandwidth * channel_bandwidth);
        Self {
            gamma1: g,
            gamma2: g,
        }
    }
}

/// Distortion between two waveforms:
/// `gamma1 * (Δf)² + gamma2 * (ΔBW)²`.
///
/// Symmetric, nonnegative, and zero exactly when both center frequency and
/// bandwidth agree; pulse duration does not enter.
pub fn distortion(a: &Waveform, b: &Waveform, params: &DistortionParams) -> f64 {
    let df = a.center_freq - b.center_freq;
    let dbw = a.bandwidth - b.bandwidth;
    params.gamma1 * df * df + params.gamma2 * dbw * dbw
}

/// The per-PRI constrained sub-catalog: every waveform within distortion
/// `d_hat` of the previously transmitted one, in catalog order. Always
/// contains `previous` itself, so the result is never empty.
pub fn constrained_catalog(
    catalog: &WaveformCatalog,
    previous: &Waveform,
    d_hat: f64,
    params: &DistortionParams,
) -> Vec<Waveform> {
    catalog
        .waveforms()
        .iter()
        .filter(|w| distortion(w, previous, params) < d_hat)
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const B: f64 = 100e6;
    const CARRIER: f64 = 3e9;

    fn grid() -> WaveformCatalog {
        WaveformCatalog::grid(B, 10, 1e-6, CARRIER).unwrap()
    }

    #[test]
    fn grid_layout() {
        let cat = grid();
        assert_eq!(cat.len(), 55);
        for (i, w) in cat.waveforms().iter().enumerate() {
            assert_eq!(w.id as usize, i);
            let (lo, hi) = w.occupied_band(OccupancyConvention::HalfWidth);
            assert!(lo >= -1e-9 && hi <= B + 1e-9);
        }
        let widest = cat.widest();
        assert_eq!(widest.bandwidth, B);
        assert_eq!(widest.center_freq, B / 2.0);
    }

    #[test]
    fn distortion_identity_is_zero() {
        let cat = grid();
        let p = DistortionParams::normalized(B);
        for w in cat.waveforms() {
            assert_eq!(distortion(w, w, &p), 0.0);
        }
    }

    #[test]
    fn distortion_known_values() {
        let p = DistortionParams::normalized(B);
        let a = Waveform {
            id: 0,
            center_freq: 30e6,
            bandwidth: 20e6,
            pulse_duration: 1e-6,
            amplitude: 1.0,
        };
        let mut b = a;
        b.id = 1;
        b.center_freq = 40e6;
        // (10 MHz)^2 / (2 * (100 MHz)^2) = 0.005
        assert!((distortion(&a, &b, &p) - 0.005).abs() < 1e-15);

        // Extremes Δf = ΔBW = B give exactly 1.
        let lo = Waveform {
            id: 0,
            center_freq: 0.0,
            bandwidth: 1.0,
            pulse_duration: 1e-6,
            amplitude: 1.0,
        };
        let hi = Waveform {
            id: 1,
            center_freq: B,
            bandwidth: 1.0 + B,
            pulse_duration: 1e-6,
            amplitude: 1.0,
        };
        assert!((distortion(&lo, &hi, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distortion_symmetric_nonnegative() {
        let cat = grid();
        let p = DistortionParams::normalized(B);
        for a in cat.waveforms() {
            for b in cat.waveforms() {
                let d = distortion(a, b, &p);
                assert!(d >= 0.0);
                assert_eq!(d, distortion(b, a, &p));
                if d == 0.0 {
                    assert_eq!((a.center_freq, a.bandwidth), (b.center_freq, b.bandwidth));
                }
                assert!(d <= 1.0 + 1e-12, "grid pair distortion {d} > 1");
            }
        }
    }

    #[test]
    fn constrained_catalog_brute_force() {
        let cat = grid();
        let p = DistortionParams::normalized(B);
        let previous = cat.get(27).unwrap();
        let got = constrained_catalog(&cat, &previous, 0.2, &p);
        // Independent filter, written out longhand with the same quadratic
        // form (an algebraic rearrangement rounds differently exactly at
        // the boundary D = d_hat).
        let mut want = vec![];
        let g = 1.0 / (2.0 * B * B);
        for w in cat.waveforms() {
            let df = w.center_freq - previous.center_freq;
            let dbw = w.bandwidth - previous.bandwidth;
            if g * df * df + g * dbw * dbw < 0.2 {
                want.push(*w);
            }
        }
        assert_eq!(got, want);
        assert!(got.iter().any(|w| w.id == previous.id));
    }

    #[test]
    fn constrained_catalog_limits() {
        let cat = grid();
        let p = DistortionParams::normalized(B);
        let previous = cat.get(0).unwrap();
        // d_hat = 1 admits every pair with D < 1; on this grid that is all.
        assert_eq!(constrained_catalog(&cat, &previous, 1.0, &p).len(), 55);
        // d_hat -> 0+ keeps exactly the previous waveform.
        let tiny = constrained_catalog(&cat, &previous, 1e-18, &p);
        assert_eq!(tiny, vec![previous]);
    }

    #[test]
    fn constrained_catalog_monotone_in_dhat() {
        let cat = grid();
        let p = DistortionParams::normalized(B);
        let previous = cat.get(17).unwrap();
        let mut last_len = 0;
        for &d_hat in &[0.01, 0.05, 0.1, 0.2, 0.5, 1.0] {
            let sub = constrained_catalog(&cat, &previous, d_hat, &p);
            assert!(sub.len() >= last_len);
            last_len = sub.len();
        }
    }

    #[test]
    fn catalog_rejects_bad_input() {
        let w = |id, f, bw| Waveform {
            id,
            center_freq: f,
            bandwidth: bw,
            pulse_duration: 1e-6,
            amplitude: 1.0,
        };
        assert!(matches!(
            WaveformCatalog::new(vec![w(0, 50e6, 10e6)], B, 10, CARRIER),
            Err(CatalogError::TooFewWaveforms(1))
        ));
        assert!(matches!(
            WaveformCatalog::new(vec![w(0, 50e6, 10e6), w(2, 50e6, 20e6)], B, 10, CARRIER),
            Err(CatalogError::NonContiguousIds { index: 1, id: 2 })
        ));
        assert!(matches!(
            WaveformCatalog::new(vec![w(0, 50e6, 10e6), w(1, 50e6, 0.0)], B, 10, CARRIER),
            Err(CatalogError::NonPositiveParameter { id: 1 })
        ));
        assert!(matches!(
            WaveformCatalog::new(vec![w(0, 50e6, 10e6), w(1, 95e6, 20e6)], B, 10, CARRIER),
            Err(CatalogError::OutOfBand { id: 1 })
        ));
        // Narrowband check fires when BW dwarfs the absolute carrier.
        assert!(matches!(
            WaveformCatalog::new(vec![w(0, 50e6, 10e6), w(1, 50e6, 60e6)], B, 10, 1e6),
            Err(CatalogError::NarrowbandViolation { id: 1 })
        ));
    }

    #[test]
    fn literal_occupancy_doubles_interval() {
        let w = Waveform {
            id: 0,
            center_freq: 30e6,
            bandwidth: 20e6,
            pulse_duration: 1e-6,
            amplitude: 1.0,
        };
        assert_eq!(w.occupied_band(OccupancyConvention::HalfWidth), (20e6, 40e6));
        assert_eq!(w.occupied_band(OccupancyConvention::Literal), (10e6, 50e6));
    }

    #[cfg(feature = "serde")]
    #[test]
    fn catalog_json_roundtrip() {
        let cat = grid();
        let json = serde_json::to_string(&cat).unwrap();
        assert!(json.contains("channel_bandwidth_hz"));
        assert!(json.contains("center_freq_hz"));
        assert!(json.contains("pulse_duration_s"));
        assert!(!json.contains("amplitude"));
        let back: WaveformCatalog = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cat);
    }
}
