//! Non-learning baseline policies: a static full-band radar and a naive
//! sense-and-avoid scheme.

use crate::spectrum::InterferenceState;
use crate::waveforms::{OccupancyConvention, Waveform, WaveformCatalog};

/// The static baseline: always the widest catalog waveform (lowest id on
/// ties), regardless of the interference state.
pub fn fixed_waveform(catalog: &WaveformCatalog) -> Waveform {
    catalog.widest()
}

/// The reactive baseline: the widest waveform whose occupied band fits
/// entirely inside the largest contiguous run of clear sub-channels in the
/// *previous* interference state. Ties go to the lowest id; run ties go to
/// the earliest run. When nothing fits (every sub-channel jammed), falls
/// back to the narrowest waveform with the lowest id.
pub fn reactive_waveform(previous: &InterferenceState, catalog: &WaveformCatalog) -> Waveform {
    let width = catalog.subchannel_width();
    // Largest contiguous zero-run, earliest on ties.
    let mut best_start = 0usize;
    let mut best_len = 0usize;
    let mut run_start = 0usize;
    let mut run_len = 0usize;
    for l in 0..previous.len() {
        if previous.get(l) {
            run_len = 0;
        } else {
            if run_len == 0 {
                run_start = l;
            }
            run_len += 1;
            if run_len > best_len {
                best_len = run_len;
                best_start = run_start;
            }
        }
    }

    if best_len > 0 {
        let lo = best_start as f64 * width;
        let hi = (best_start + best_len) as f64 * width;
        let mut best: Option<Waveform> = None;
        for w in catalog.waveforms() {
            let (wlo, whi) = w.occupied_band(OccupancyConvention::HalfWidth);
            if wlo >= lo - 1e-6 && whi <= hi + 1e-6 {
                match best {
                    Some(b) if w.bandwidth <= b.bandwidth => {}
                    _ => best = Some(*w),
                }
            }
        }
        if let Some(w) = best {
            return w;
        }
    }

    let mut narrowest = catalog.waveforms()[0];
    for &w in &catalog.waveforms()[1..] {
        if w.bandwidth < narrowest.bandwidth {
            narrowest = w;
        }
    }
    narrowest
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: f64 = 100e6;

    fn grid() -> WaveformCatalog {
        WaveformCatalog::grid(B, 10, 1e-6, 3e9).unwrap()
    }

    fn st(s: &str) -> InterferenceState {
        InterferenceState::from_bitstring(s, B).unwrap()
    }

    #[test]
    fn fixed_is_full_band() {
        let cat = grid();
        let w = fixed_waveform(&cat);
        assert_eq!(w.bandwidth, B);
    }

    #[test]
    fn reactive_clear_channel_takes_full_band() {
        let cat = grid();
        let w = reactive_waveform(&st("0000000000"), &cat);
        assert_eq!(w.bandwidth, B);
    }

    #[test]
    fn reactive_avoids_leading_jam() {
        let cat = grid();
        // Clear run is [20, 100] MHz: the widest fitting waveform has BW 80.
        let w = reactive_waveform(&st("1100000000"), &cat);
        assert_eq!(w.bandwidth, 80e6);
        assert_eq!(w.center_freq, 60e6);
    }

    #[test]
    fn reactive_picks_earliest_largest_run() {
        let cat = grid();
        // Two zero-runs of length 3 ([10,40] and [60,90] MHz); earliest wins.
        let w = reactive_waveform(&st("1000110001"), &cat);
        assert_eq!(w.bandwidth, 30e6);
        assert_eq!(w.center_freq, 25e6);
    }

    #[test]
    fn reactive_all_jammed_falls_back_to_narrowest() {
        let cat = grid();
        let w = reactive_waveform(&st("1111111111"), &cat);
        assert_eq!(w.bandwidth, 10e6);
        assert_eq!(w.id, 0);
    }
}
