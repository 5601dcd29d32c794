//! Matched filtering and Doppler processing of one CPI.
//!
//! Each pulse is range-compressed against its *own* transmitted replica
//! (pulse-agile trains use a different reference per pulse), then a
//! windowed DFT across slow time turns per-range-bin pulse sequences into
//! Doppler spectra. Range bin `l` corresponds to round-trip delay `l / fs`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::waveforms::WaveformCatalog;

use super::fft::{fft, ifft, next_pow2, Cpx};
use super::pulse::synthesize_pulse;
use super::{CpiBuffer, RangeDopplerMap, RdprocError};

/// Slow-time window applied before the Doppler transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Taper {
    /// No window (rectangular).
    None,
    /// Symmetric Hann window.
    #[default]
    Hann,
}

fn window(taper: Taper, m: usize, len: usize) -> f64 {
    match taper {
        Taper::None => 1.0,
        Taper::Hann => {
            if len <= 1 {
                1.0
            } else {
                let x = m as f64 / (len - 1) as f64;
                0.5 * (1.0 - math::cos(2.0 * core::f64::consts::PI * x))
            }
        }
    }
}

/// Range-compress every pulse with its own waveform replica, returning
/// complex range profiles (lag `l` is delay `l / fs`).
///
/// Profiles keep only fully overlapped lags, `0..fast_time - replica_len`:
/// beyond that the reference runs off the end of the simulated window and
/// the partial correlation leaves a decaying noise shelf that would read
/// as structure.
pub fn matched_filter_profiles(
    buffer: &CpiBuffer,
    catalog: &WaveformCatalog,
) -> Result<Vec<Vec<Cpx>>, RdprocError> {
    buffer.validate()?;
    let n_ft = buffer.fast_time_samples();
    let fs = buffer.sample_rate;

    // Cache reference spectra per distinct waveform id in this CPI.
    let mut ref_spectra: Vec<Option<(usize, Vec<Cpx>)>> = vec![None; catalog.len()];
    let mut max_replica = 0usize;

    let mut profiles = Vec::with_capacity(buffer.num_pulses());
    for (row, &wid) in buffer.pulses.iter().zip(&buffer.waveform_ids) {
        if ref_spectra[wid as usize].is_none() {
            let w = catalog.get(wid).ok_or(RdprocError::InconsistentBuffer)?;
            let replica = synthesize_pulse(&w, fs, buffer.pri)?;
            let l = next_pow2(n_ft + replica.len());
            let mut spec = vec![Cpx::ZERO; l];
            spec[..replica.len()].copy_from_slice(&replica);
            fft(&mut spec);
            ref_spectra[wid as usize] = Some((replica.len(), spec));
        }
        let (replica_len, spec) = ref_spectra[wid as usize].as_ref().unwrap();
        max_replica = max_replica.max(*replica_len);
        let fft_len = spec.len();

        let mut rx = vec![Cpx::ZERO; fft_len];
        rx[..n_ft].copy_from_slice(row);
        fft(&mut rx);
        for (r, s) in rx.iter_mut().zip(spec) {
            *r = *r * s.conj();
        }
        ifft(&mut rx);
        rx.truncate(n_ft);
        profiles.push(rx);
    }
    if max_replica > 0 && max_replica < n_ft {
        let n_valid = n_ft - max_replica + 1;
        for p in profiles.iter_mut() {
            p.truncate(n_valid);
        }
    }
    Ok(profiles)
}

/// Full CPI processing: per-pulse matched filter, slow-time window, DFT
/// across pulses, magnitude map.
pub fn range_doppler(
    buffer: &CpiBuffer,
    catalog: &WaveformCatalog,
    taper: Taper,
) -> Result<RangeDopplerMap, RdprocError> {
    let profiles = matched_filter_profiles(buffer, catalog)?;
    let m = profiles.len();
    let n_ft = profiles.first().map_or(0, Vec::len);
    let weights: Vec<f64> = (0..m).map(|i| window(taper, i, m)).collect();

    let mut data = vec![vec![0.0f64; m]; n_ft];
    let pow2 = m.is_power_of_two();
    let mut slow = vec![Cpx::ZERO; m];
    for (l, data_row) in data.iter_mut().enumerate() {
        for (i, p) in profiles.iter().enumerate() {
            slow[i] = p[l].scale(weights[i]);
        }
        if pow2 {
            let mut spec = slow.clone();
            fft(&mut spec);
            for (d, v) in spec.iter().enumerate() {
                data_row[d] = v.abs();
            }
        } else {
            let spec = super::fft::dft(&slow);
            for (d, v) in spec.iter().enumerate() {
                data_row[d] = v.abs();
            }
        }
    }

    Ok(RangeDopplerMap {
        data,
        range_bin_m: crate::SPEED_OF_LIGHT / (2.0 * buffer.sample_rate),
        doppler_bin_hz: 1.0 / (buffer.pri * m as f64),
    })
}
