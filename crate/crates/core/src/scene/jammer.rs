//! Reactive adaptive jammer.
//!
//! The jammer watches the radar: if the radar transmits the same waveform
//! on two consecutive PRIs, the next PRI's interference lands exactly on
//! the sub-channels overlapped by that waveform's occupied band; otherwise
//! the jammer keeps occupying whatever band it jammed last. Nothing is
//! jammed until the radar first repeats itself.

use alloc::vec::Vec;

use crate::spectrum::InterferenceState;
use crate::waveforms::{Waveform, WaveformCatalog};

/// Jammer parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct JammerConfig {
    /// Jammer-to-noise ratio at the radar when interference occurs, dB.
    pub jnr_db: f64,
}

impl Default for JammerConfig {
    fn default() -> Self {
        Self { jnr_db: 20.0 }
    }
}

/// Jammer state machine.
#[derive(Debug, Clone)]
pub struct JammerScene {
    num_subchannels: usize,
    channel_bandwidth: f64,
    jammed: Vec<bool>,
}

impl JammerScene {
    pub fn new(num_subchannels: usize, channel_bandwidth: f64) -> Self {
        Self {
            num_subchannels,
            channel_bandwidth,
            jammed: alloc::vec![false; num_subchannels],
        }
    }

    /// Interference state for the next PRI given the radar's last two
    /// transmissions (`None` while too little history exists).
    pub fn step(
        &mut self,
        previous: Option<&Waveform>,
        before_that: Option<&Waveform>,
        catalog: &WaveformCatalog,
    ) -> InterferenceState {
        if let (Some(w1), Some(w2)) = (previous, before_that) {
            if w1.id == w2.id {
                self.jammed = overlapped_subchannels(w1, catalog);
            }
        }
        InterferenceState::from_bits(self.jammed.clone(), self.channel_bandwidth)
    }

    pub fn currently_jammed(&self) -> &[bool] {
        &self.jammed
    }

    pub fn num_subchannels(&self) -> usize {
        self.num_subchannels
    }
}

/// Sub-channels whose interval overlaps the waveform's occupied band with
/// positive measure.
fn overlapped_subchannels(w: &Waveform, catalog: &WaveformCatalog) -> Vec<bool> {
    let s = catalog.num_subchannels();
    let width = catalog.subchannel_width();
    let (lo, hi) = w.occupied_band(catalog.occupancy_convention());
    (0..s)
        .map(|l| {
            let sub_lo = l as f64 * width;
            let sub_hi = (l + 1) as f64 * width;
            lo < sub_hi && hi > sub_lo
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: f64 = 100e6;

    fn grid() -> WaveformCatalog {
        WaveformCatalog::grid(B, 10, 1e-6, 3e9).unwrap()
    }

    fn by_band(cat: &WaveformCatalog, center: f64, bw: f64) -> Waveform {
        cat.waveforms()
            .iter()
            .find(|w| w.center_freq == center && w.bandwidth == bw)
            .copied()
            .unwrap()
    }

    #[test]
    fn first_pris_are_clear() {
        let cat = grid();
        let mut j = JammerScene::new(10, B);
        let w = by_band(&cat, 10e6, 20e6);
        assert!(j.step(None, None, &cat).all_zero());
        assert!(j.step(Some(&w), None, &cat).all_zero());
    }

    #[test]
    fn repeat_marks_exactly_the_band() {
        let cat = grid();
        let mut j = JammerScene::new(10, B);
        // Repeating the [0, 20] MHz waveform jams sub-channels 1 and 2 only.
        let w = by_band(&cat, 10e6, 20e6);
        let s = j.step(Some(&w), Some(&w), &cat);
        assert_eq!(alloc::format!("{s}"), "1100000000");
    }

    #[test]
    fn adapting_keeps_previous_jam() {
        let cat = grid();
        let mut j = JammerScene::new(10, B);
        let w1 = by_band(&cat, 35e6, 30e6); // occupies [20, 50] -> subchannels 3..5
        let w2 = by_band(&cat, 80e6, 20e6);
        let s = j.step(Some(&w1), Some(&w1), &cat);
        assert_eq!(alloc::format!("{s}"), "0011100000");
        // Radar changed waveform: jam stays where it was.
        let s = j.step(Some(&w2), Some(&w1), &cat);
        assert_eq!(alloc::format!("{s}"), "0011100000");
    }

    #[test]
    fn jam_never_leaves_triggering_band() {
        let cat = grid();
        for w in cat.waveforms() {
            let mut j = JammerScene::new(10, B);
            let s = j.step(Some(w), Some(w), &cat);
            let (lo, hi) = w.occupied_band(cat.occupancy_convention());
            for l in 0..10 {
                if s.get(l) {
                    let sub_lo = l as f64 * 10e6;
                    let sub_hi = (l + 1) as f64 * 10e6;
                    assert!(lo < sub_hi && hi > sub_lo, "waveform {} marked {l}", w.id);
                }
            }
        }
    }

    #[test]
    fn constant_policy_is_jammed_from_t3() {
        let cat = grid();
        let mut j = JammerScene::new(10, B);
        let w = cat.widest();
        let mut states = Vec::new();
        let mut history: Vec<Waveform> = Vec::new();
        for _ in 0..6 {
            let n = history.len();
            let prev = history.get(n.wrapping_sub(1));
            let prev2 = history.get(n.wrapping_sub(2));
            states.push(j.step(prev, prev2, &cat));
            history.push(w);
        }
        assert!(states[0].all_zero());
        assert!(states[1].all_zero());
        for s in &states[2..] {
            assert_eq!(s.count_ones(), 10, "full-band repeat jams everything");
        }
    }
}
