//! Received-signal generation for one CPI.
//!
//! Each pulse's fast-time window accumulates, per target, the analytically
//! delayed pulse scaled by the target gain and the slow-time Doppler phase;
//! then band-limited interference synthesized in the jammed sub-channels;
//! then circular white noise. Superposition holds exactly for disjoint
//! target sets in the noiseless case.

use alloc::vec;
use alloc::vec::Vec;

use crate::rng::Stream;
use crate::spectrum::InterferenceState;
use crate::waveforms::Waveform;
use crate::SPEED_OF_LIGHT;

use super::fft::{ifft, Cpx};
use super::pulse::{pulse_sample, pulse_span};
use super::{CpiBuffer, PointTarget, RdprocError};

/// Geometry of the simulated fast-time window.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ReceiveGeometry {
    /// Complex baseband sample rate, Hz.
    pub sample_rate: f64,
    /// Pulse repetition interval, seconds.
    pub pri: f64,
    /// Fast-time samples simulated per pulse.
    pub fast_time_samples: usize,
    /// RF carrier for Doppler scaling, Hz.
    pub carrier_hz: f64,
    /// Channel bandwidth, Hz (for interference bin mapping).
    pub channel_bandwidth: f64,
}

impl Default for ReceiveGeometry {
    fn default() -> Self {
        Self {
            sample_rate: 200e6,
            pri: 409.6e-6,
            fast_time_samples: 4096,
            carrier_hz: 3e9,
            channel_bandwidth: 100e6,
        }
    }
}

/// Generate the received CPI buffer.
///
/// * `train` — the waveform transmitted on each pulse.
/// * `targets` — point targets; delays must fall inside `[0, PRI)`.
/// * `interference` — per-pulse `(state, per-sub-channel average power)`;
///   the slice length must match the train. Power is time-average watts per
///   jammed sub-channel in the same units as `noise_power`.
/// * `noise_power` — average power of the circular white noise per complex
///   sample (0 disables noise draws).
pub fn receive(
    train: &[Waveform],
    targets: &[PointTarget],
    interference: &[(InterferenceState, f64)],
    noise_power: f64,
    geometry: &ReceiveGeometry,
    rng: &mut Stream,
) -> Result<CpiBuffer, RdprocError> {
    debug_assert_eq!(train.len(), interference.len());
    let n = geometry.fast_time_samples;
    let fs = geometry.sample_rate;
    if n as f64 > fs * geometry.pri {
        return Err(RdprocError::InconsistentBuffer);
    }
    for t in targets {
        if t.delay < 0.0 || t.delay >= geometry.pri {
            return Err(RdprocError::DelayOutOfRange);
        }
    }

    let mut pulses = Vec::with_capacity(train.len());
    for (m, w) in train.iter().enumerate() {
        let mut row = vec![Cpx::ZERO; n];

        for target in targets {
            // Slow-time Doppler progression (stop-and-hop).
            let doppler_hz = 2.0 * target.velocity * geometry.carrier_hz / SPEED_OF_LIGHT;
            let slow_phase =
                -2.0 * core::f64::consts::PI * doppler_hz * (m as f64 * geometry.pri);
            let factor = target.gain * Cpx::cis(slow_phase);
            // Only samples under the delayed pulse support contribute.
            let start = (target.delay * fs) as usize;
            let stop = (((target.delay + pulse_span(w)) * fs) as usize + 1).min(n);
            for (i, sample) in row.iter_mut().enumerate().take(stop).skip(start) {
                let t = i as f64 / fs - target.delay;
                let p = pulse_sample(w, t);
                if p.norm_sq() > 0.0 {
                    *sample += factor * p;
                }
            }
        }

        let (state, intf_power) = &interference[m];
        if *intf_power > 0.0 && !state.all_zero() {
            add_band_limited_interference(&mut row, state, *intf_power, geometry, rng);
        }

        if noise_power > 0.0 {
            let sigma = crate::math::sqrt(noise_power / 2.0);
            for sample in row.iter_mut() {
                *sample += Cpx::new(rng.next_normal() * sigma, rng.next_normal() * sigma);
            }
        }

        pulses.push(row);
    }

    let buffer = CpiBuffer {
        pulses,
        waveform_ids: train.iter().map(|w| w.id).collect(),
        sample_rate: fs,
        pri: geometry.pri,
    };
    buffer.validate()?;
    Ok(buffer)
}

/// Synthesize noise confined to the jammed sub-channels directly in the
/// frequency domain and add it to the row. Each jammed sub-channel
/// contributes `power` of time-average power.
fn add_band_limited_interference(
    row: &mut [Cpx],
    state: &InterferenceState,
    power: f64,
    geometry: &ReceiveGeometry,
    rng: &mut Stream,
) {
    let n = row.len();
    debug_assert!(n.is_power_of_two());
    let df = geometry.sample_rate / n as f64;
    let sub_width = geometry.channel_bandwidth / state.len() as f64;
    let mut spectrum = vec![Cpx::ZERO; n];
    let mut filled = 0usize;
    let mut jammed_subchannels = 0usize;
    for l in 0..state.len() {
        if !state.get(l) {
            continue;
        }
        jammed_subchannels += 1;
        let lo = l as f64 * sub_width;
        let hi = (l + 1) as f64 * sub_width;
        let k_lo = (lo / df) as usize;
        let k_hi = ((hi / df) as usize).min(n / 2);
        for k in k_lo..k_hi {
            // Variance set after counting; draw unit-variance now.
            spectrum[k] = Cpx::new(rng.next_normal(), rng.next_normal());
            filled += 1;
        }
    }
    if filled == 0 {
        return;
    }
    // Parseval with the 1/N inverse transform: time power =
    // sum |X_k|^2 / N^2, so unit-variance complex bins (E|X|^2 = 2) carry
    // 2 * filled / N^2; scale to jammed_subchannels * power total.
    let target_power = jammed_subchannels as f64 * power;
    let scale = crate::math::sqrt(target_power * n as f64 * n as f64 / (2.0 * filled as f64));
    for v in spectrum.iter_mut() {
        *v = v.scale(scale);
    }
    ifft(&mut spectrum);
    for (r, v) in row.iter_mut().zip(&spectrum) {
        *r += *v;
    }
}
