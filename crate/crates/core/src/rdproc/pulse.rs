//! Gaussian-enveloped complex LFM chirp synthesis.
//!
//! The baseband pulse is
//! `A exp(-(t-t0)^2 / T^2) exp(j (2 pi f (t-t0) + pi alpha (t-t0)^2))`
//! with `f` the waveform's center offset inside the channel and
//! `alpha = BW / T`. Support is truncated to `[0, 8T)` (envelope centered
//! at `t0 = 4T`, edge amplitude `e^-16`), so the instantaneous frequency at
//! the pulse center is `f` and the sweep over the envelope core covers
//! `f ± BW/2`.

use alloc::vec::Vec;

use crate::math;
use crate::waveforms::{OccupancyConvention, Waveform};

use super::fft::Cpx;
use super::RdprocError;

/// Half-width of the truncated envelope in units of `T`.
const TRUNCATION_SIGMAS: f64 = 4.0;

/// Total pulse support in seconds.
pub fn pulse_span(w: &Waveform) -> f64 {
    2.0 * TRUNCATION_SIGMAS * w.pulse_duration
}

/// Complex pulse amplitude at time `t` from the pulse start (analytic
/// evaluation, valid for arbitrary, off-grid `t`). Zero outside `[0, 8T)`.
pub fn pulse_sample(w: &Waveform, t: f64) -> Cpx {
    let span = pulse_span(w);
    if t < 0.0 || t >= span {
        return Cpx::ZERO;
    }
    let tc = t - 0.5 * span;
    let envelope = w.amplitude * math::exp(-(tc * tc) / (w.pulse_duration * w.pulse_duration));
    let phase = 2.0 * core::f64::consts::PI * w.center_freq * tc
        + core::f64::consts::PI * w.chirp_rate() * tc * tc;
    Cpx::cis(phase).scale(envelope)
}

/// Sampled baseband pulse over its truncated support.
///
/// Fails when `sample_rate` is below twice the highest occupied band edge
/// (complex-baseband Nyquist for this channel convention) or when the
/// support does not fit inside one PRI.
pub fn synthesize_pulse(
    w: &Waveform,
    sample_rate: f64,
    pri: f64,
) -> Result<Vec<Cpx>, RdprocError> {
    let (_, band_hi) = w.occupied_band(OccupancyConvention::HalfWidth);
    let required = 2.0 * band_hi;
    if sample_rate < required {
        return Err(RdprocError::SampleRateTooLow {
            required,
            got: sample_rate,
        });
    }
    let span = pulse_span(w);
    if span > pri {
        return Err(RdprocError::PulseLongerThanPri);
    }
    let n = (span * sample_rate) as usize;
    Ok((0..n)
        .map(|i| pulse_sample(w, i as f64 / sample_rate))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 200e6;
    const PRI: f64 = 409.6e-6;

    fn wf(center: f64, bw: f64, t: f64) -> Waveform {
        Waveform {
            id: 0,
            center_freq: center,
            bandwidth: bw,
            pulse_duration: t,
            amplitude: 1.0,
        }
    }

    /// Instantaneous frequency from the phase difference of consecutive
    /// samples.
    fn inst_freq(pulse: &[Cpx], i: usize, fs: f64) -> f64 {
        let d = pulse[i + 1] * pulse[i].conj();
        math::atan2(d.im, d.re) * fs / (2.0 * core::f64::consts::PI)
    }

    #[test]
    fn zero_chirp_is_pure_tone() {
        let mut w = wf(30e6, 10e6, 1e-6);
        w.bandwidth = 1.0; // alpha ~ 0 (degenerate, test only)
        let pulse = synthesize_pulse(&w, FS, PRI).unwrap();
        let mid = pulse.len() / 2;
        for i in (mid - 40)..(mid + 40) {
            let f = inst_freq(&pulse, i, FS);
            assert!((f - 30e6).abs() < 1e4, "inst freq {f}");
        }
    }

    #[test]
    fn chirp_center_frequency_and_slope() {
        let w = wf(50e6, 40e6, 1e-6);
        let pulse = synthesize_pulse(&w, FS, PRI).unwrap();
        let mid = pulse.len() / 2;
        // Instantaneous frequency at the pulse center equals the center
        // offset.
        let f_mid = inst_freq(&pulse, mid, FS);
        assert!((f_mid - 50e6).abs() / 50e6 < 0.01, "center {f_mid}");
        // Slope of the instantaneous frequency matches alpha within 1%.
        let span = 100;
        let f_hi = inst_freq(&pulse, mid + span, FS);
        let f_lo = inst_freq(&pulse, mid - span, FS);
        let slope = (f_hi - f_lo) * FS / (2.0 * span as f64);
        let alpha = w.chirp_rate();
        assert!((slope - alpha).abs() / alpha < 0.01, "slope {slope} vs {alpha}");
    }

    #[test]
    fn energy_matches_gaussian_integral() {
        // ||pulse||^2 dt -> A^2 T sqrt(pi/2) for the squared envelope.
        let w = wf(20e6, 10e6, 2e-6);
        let pulse = synthesize_pulse(&w, FS, PRI).unwrap();
        let energy: f64 = pulse.iter().map(|v| v.norm_sq()).sum::<f64>() / FS;
        let expected = w.pulse_duration * math::sqrt(core::f64::consts::PI / 2.0);
        assert!((energy - expected).abs() / expected < 0.01, "energy {energy} vs {expected}");
    }

    #[test]
    fn sample_rate_violation_is_rejected() {
        let w = wf(90e6, 20e6, 1e-6);
        assert!(matches!(
            synthesize_pulse(&w, 150e6, PRI),
            Err(RdprocError::SampleRateTooLow { .. })
        ));
        assert!(synthesize_pulse(&w, 200e6, PRI).is_ok());
    }

    #[test]
    fn oversized_pulse_is_rejected() {
        let w = wf(50e6, 10e6, 100e-6);
        assert!(matches!(
            synthesize_pulse(&w, FS, PRI),
            Err(RdprocError::PulseLongerThanPri)
        ));
    }

    #[test]
    fn support_is_compact() {
        let w = wf(50e6, 20e6, 1e-6);
        assert_eq!(pulse_sample(&w, -1e-9).norm_sq(), 0.0);
        assert_eq!(pulse_sample(&w, pulse_span(&w)).norm_sq(), 0.0);
        assert!(pulse_sample(&w, 0.5 * pulse_span(&w)).abs() > 0.99);
    }
}
