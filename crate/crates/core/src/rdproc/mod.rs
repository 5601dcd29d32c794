//! CPI-level signal processing: pulse-train synthesis, received-signal
//! generation for point targets, matched filtering into range-Doppler maps,
//! CA-CFAR detection, and image-quality metrics.
//!
//! The shared channel is simulated at complex baseband (default sample rate
//! `2B`); the RF carrier enters only through Doppler scaling. Doppler is
//! applied as a slow-time phase progression (stop-and-hop), standard when
//! `BW * v / c << 1`.

mod cfar;
pub mod fft;
mod metrics;
mod pulse;
mod rdmap;
pub(crate) mod receive;

pub use cfar::{cfar_2d, CfarConfig, Detection};
pub use fft::Cpx;
pub use metrics::{metrics, CpiMetrics, TruthBin};
pub use pulse::{pulse_sample, synthesize_pulse};
pub use rdmap::{matched_filter_profiles, range_doppler, Taper};
pub use receive::{receive, ReceiveGeometry};

use alloc::vec::Vec;
use core::fmt;

use crate::SPEED_OF_LIGHT;

/// Signal-processing configuration errors.
#[derive(Debug, Clone, PartialEq)]
pub enum RdprocError {
    /// Sample rate below twice the highest occupied band edge.
    SampleRateTooLow { required: f64, got: f64 },
    /// Pulse support does not fit in one PRI.
    PulseLongerThanPri,
    /// Target delay outside `[0, PRI)`.
    DelayOutOfRange,
    /// CFAR window malformed or larger than the map.
    BadCfarWindow,
    /// Buffer rows inconsistent with the declared geometry.
    InconsistentBuffer,
}

impl fmt::Display for RdprocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdprocError::SampleRateTooLow { required, got } => {
                write!(f, "sample rate {got} Hz below required {required} Hz")
            }
            RdprocError::PulseLongerThanPri => f.write_str("pulse support exceeds the PRI"),
            RdprocError::DelayOutOfRange => f.write_str("target delay must lie in [0, PRI)"),
            RdprocError::BadCfarWindow => f.write_str("CFAR window degenerate or too large"),
            RdprocError::InconsistentBuffer => f.write_str("CPI buffer dimensions inconsistent"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RdprocError {}

/// A point scatterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointTarget {
    /// Complex reflection gain.
    pub gain: Cpx,
    /// Round-trip delay, seconds (must lie in `[0, PRI)`).
    pub delay: f64,
    /// Range rate, m/s (positive = receding; enters as the slow-time phase
    /// `exp(-j 2 pi (2 v / c) f_c m PRI)`).
    pub velocity: f64,
}

impl PointTarget {
    pub fn range_m(&self) -> f64 {
        0.5 * SPEED_OF_LIGHT * self.delay
    }

    pub fn from_range(range_m: f64, velocity: f64, gain: Cpx) -> Self {
        Self {
            gain,
            delay: 2.0 * range_m / SPEED_OF_LIGHT,
            velocity,
        }
    }
}

/// One coherent processing interval of fast-time x slow-time samples.
///
/// Fast time is a truncated window of `fast_time_samples` samples from the
/// start of each PRI (the full PRI at 200 MHz would be ~82k samples; the
/// window keeps the simulated range swath tractable).
#[derive(Debug, Clone)]
pub struct CpiBuffer {
    /// `num_pulses` rows of `fast_time_samples` complex samples.
    pub pulses: Vec<Vec<Cpx>>,
    /// Waveform id transmitted on each pulse.
    pub waveform_ids: Vec<u32>,
    /// Complex baseband sample rate, Hz.
    pub sample_rate: f64,
    /// Pulse repetition interval, seconds.
    pub pri: f64,
}

impl CpiBuffer {
    pub fn num_pulses(&self) -> usize {
        self.pulses.len()
    }

    pub fn fast_time_samples(&self) -> usize {
        self.pulses.first().map_or(0, Vec::len)
    }

    /// Check row lengths and that the window fits inside one PRI.
    pub fn validate(&self) -> Result<(), RdprocError> {
        let n = self.fast_time_samples();
        if self.pulses.iter().any(|row| row.len() != n)
            || self.waveform_ids.len() != self.pulses.len()
        {
            return Err(RdprocError::InconsistentBuffer);
        }
        if n as f64 > self.sample_rate * self.pri {
            return Err(RdprocError::InconsistentBuffer);
        }
        Ok(())
    }
}

/// Magnitude range-Doppler image with physical bin scales.
#[derive(Debug, Clone)]
pub struct RangeDopplerMap {
    /// `data[range_bin][doppler_bin]`, linear magnitude.
    pub data: Vec<Vec<f64>>,
    /// Meters per range bin (`c / (2 fs)`).
    pub range_bin_m: f64,
    /// Hz per Doppler bin (`PRF / M`).
    pub doppler_bin_hz: f64,
}

impl RangeDopplerMap {
    pub fn num_range_bins(&self) -> usize {
        self.data.len()
    }

    pub fn num_doppler_bins(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    /// Doppler frequency of a bin: bins above `M/2` alias to negative
    /// frequencies (bin 0 is zero Doppler).
    pub fn doppler_bin_freq(&self, bin: usize) -> f64 {
        let m = self.num_doppler_bins();
        if bin <= m / 2 {
            bin as f64 * self.doppler_bin_hz
        } else {
            (bin as f64 - m as f64) * self.doppler_bin_hz
        }
    }

    /// Range-rate implied by a Doppler bin. The slow-time kernel
    /// `exp(-j 2 pi f_D m PRI)` lands receding targets (positive range
    /// rate) at negative DFT frequencies, hence the sign flip.
    pub fn range_rate_from_bin(&self, bin: usize, carrier_hz: f64) -> f64 {
        -self.doppler_bin_freq(bin) * SPEED_OF_LIGHT / (2.0 * carrier_hz)
    }

    /// Nearest range bin for a range in meters.
    pub fn range_to_bin(&self, range_m: f64) -> usize {
        let b = crate::math::round(range_m / self.range_bin_m);
        if b < 0.0 {
            0
        } else {
            (b as usize).min(self.num_range_bins().saturating_sub(1))
        }
    }

    /// Doppler bin (wrapped) where a target with the given range rate lands.
    pub fn range_rate_to_bin(&self, rate_mps: f64, carrier_hz: f64) -> usize {
        let m = self.num_doppler_bins() as f64;
        let f_d = 2.0 * rate_mps * carrier_hz / SPEED_OF_LIGHT;
        let prf = self.doppler_bin_hz * m;
        let mut frac = (-f_d / prf) % 1.0;
        if frac < 0.0 {
            frac += 1.0;
        }
        (crate::math::round(frac * m) as usize) % self.num_doppler_bins()
    }

    /// Peak cell `(range_bin, doppler_bin, magnitude)`.
    pub fn peak(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (r, row) in self.data.iter().enumerate() {
            for (d, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (r, d, v);
                }
            }
        }
        best
    }
}
