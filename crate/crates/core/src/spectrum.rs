//! Binary interference-state representation, spectrum sensing, and the
//! collision/missed-bandwidth waveform cost.
//!
//! The shared channel of bandwidth `B` is split into `S` sub-channels; the
//! interference state is the length-`S` indicator of which sub-channels
//! carry harmful average power. Costs are computed against the *true*
//! state recovered after reception; the (possibly wrong) sensed state only
//! conditions the learner's context.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rng::Stream;
use crate::waveforms::{Waveform, WaveformCatalog};

/// Length-`S` binary occupancy of the shared channel.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceState {
    bits: Vec<bool>,
    subchannel_width: f64,
}

impl InterferenceState {
    pub fn zeros(num_subchannels: usize, channel_bandwidth: f64) -> Self {
        Self {
            bits: alloc::vec![false; num_subchannels],
            subchannel_width: channel_bandwidth / num_subchannels as f64,
        }
    }

    pub fn from_bits(bits: Vec<bool>, channel_bandwidth: f64) -> Self {
        let subchannel_width = channel_bandwidth / bits.len() as f64;
        Self {
            bits,
            subchannel_width,
        }
    }

    /// Parse a compact bit-string such as `"1100000000"`.
    pub fn from_bitstring(s: &str, channel_bandwidth: f64) -> Option<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return None,
            }
        }
        if bits.is_empty() {
            return None;
        }
        Some(Self::from_bits(bits, channel_bandwidth))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, subchannel: usize) -> bool {
        self.bits[subchannel]
    }

    pub fn set(&mut self, subchannel: usize, value: bool) {
        self.bits[subchannel] = value;
    }

    pub fn subchannel_width(&self) -> f64 {
        self.subchannel_width
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn all_zero(&self) -> bool {
        self.count_ones() == 0
    }

    /// Compact `u64` mask (bit `l` = sub-channel `l`); `S <= 64` holds by
    /// catalog construction.
    pub fn mask(&self) -> u64 {
        let mut m = 0u64;
        for (l, &b) in self.bits.iter().enumerate() {
            if b {
                m |= 1 << l;
            }
        }
        m
    }

    /// Center frequency of sub-channel `l` (0-based) in channel coordinates:
    /// `(l+1) * B/S - B/(2S)`.
    pub fn subchannel_center(&self, l: usize) -> f64 {
        (l as f64 + 0.5) * self.subchannel_width
    }
}

impl fmt::Display for InterferenceState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.bits.len());
        for &b in &self.bits {
            s.push(if b { '1' } else { '0' });
        }
        f.write_str(&s)
    }
}

/// Cost weights; invalid combinations are rejected at construction so the
/// cost stays in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostParams {
    /// Collision-bandwidth weight, 1/Hz.
    pub beta1: f64,
    /// Missed-bandwidth weight, 1/Hz.
    pub beta2: f64,
    /// Keep the literal (possibly negative) missed-bandwidth difference
    /// instead of clamping it at zero.
    #[cfg_attr(feature = "serde", serde(default))]
    pub allow_negative_missed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidCostParams;

impl fmt::Display for InvalidCostParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cost weights must satisfy 0 <= beta1, beta2 and beta1 + beta2 <= 1/B")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InvalidCostParams {}

impl CostParams {
    pub fn new(beta1: f64, beta2: f64, channel_bandwidth: f64) -> Result<Self, InvalidCostParams> {
        if beta1 < 0.0 || beta2 < 0.0 || beta1 + beta2 > 1.0 / channel_bandwidth + 1e-18 {
            return Err(InvalidCostParams);
        }
        Ok(Self {
            beta1,
            beta2,
            allow_negative_missed: false,
        })
    }

    /// Equal weights `beta1 = beta2 = 1/(2B)`.
    pub fn normalized(channel_bandwidth: f64) -> Self {
        let b = 1.0 / (2.0 * channel_bandwidth);
        Self {
            beta1: b,
            beta2: b,
            allow_negative_missed: false,
        }
    }
}

/// Bandwidth shared by the waveform's occupied band and the interference:
/// `B/S` times the number of jammed sub-channels whose center lies inside
/// the occupied band. Always in `[0, B]` and a multiple of `B/S`.
pub fn collision_bandwidth(
    w: &Waveform,
    state: &InterferenceState,
    catalog: &WaveformCatalog,
) -> f64 {
    let (lo, hi) = w.occupied_band(catalog.occupancy_convention());
    let mut hit = 0usize;
    for l in 0..state.len() {
        if state.get(l) {
            let c = state.subchannel_center(l);
            if c >= lo && c <= hi {
                hit += 1;
            }
        }
    }
    hit as f64 * catalog.subchannel_width()
}

/// Bandwidth foregone relative to the widest interference-free catalog
/// member: `BW_{i*} - BW_i`, where `i*` maximizes bandwidth subject to zero
/// collision with `state` (lowest id on ties). Zero when no catalog member
/// is collision-free, and clamped at zero from below unless
/// `params.allow_negative_missed` is set.
pub fn missed_bandwidth(
    w: &Waveform,
    state: &InterferenceState,
    params: &CostParams,
    catalog: &WaveformCatalog,
) -> f64 {
    let mut best: Option<&Waveform> = None;
    for cand in catalog.waveforms() {
        if collision_bandwidth(cand, state, catalog) == 0.0 {
            match best {
                Some(b) if cand.bandwidth <= b.bandwidth => {}
                _ => best = Some(cand),
            }
        }
    }
    match best {
        None => 0.0,
        Some(star) => {
            let diff = star.bandwidth - w.bandwidth;
            if params.allow_negative_missed {
                diff
            } else {
                diff.max(0.0)
            }
        }
    }
}

/// The waveform cost `beta1 * BW_collision + beta2 * BW_missed`,
/// deterministic in `(w, state)`.
pub fn cost(
    w: &Waveform,
    state: &InterferenceState,
    params: &CostParams,
    catalog: &WaveformCatalog,
) -> f64 {
    params.beta1 * collision_bandwidth(w, state, catalog)
        + params.beta2 * missed_bandwidth(w, state, params, catalog)
}

/// Imperfect spectrum sensing: each bit flips independently with
/// probability `flip_prob`.
pub fn sense(true_state: &InterferenceState, flip_prob: f64, rng: &mut Stream) -> InterferenceState {
    debug_assert!((0.0..0.5).contains(&flip_prob));
    if flip_prob == 0.0 {
        return true_state.clone();
    }
    let mut out = true_state.clone();
    for l in 0..out.len() {
        if rng.bernoulli(flip_prob) {
            let v = out.get(l);
            out.set(l, !v);
        }
    }
    out
}

/// The hindsight-optimal waveform: minimal cost against the true state over
/// `allowed`, ties broken by lowest id.
pub fn oracle_waveform(
    state: &InterferenceState,
    params: &CostParams,
    allowed: &[Waveform],
    catalog: &WaveformCatalog,
) -> Waveform {
    debug_assert!(!allowed.is_empty());
    let mut best = allowed[0];
    let mut best_cost = cost(&best, state, params, catalog);
    for w in &allowed[1..] {
        let c = cost(w, state, params, catalog);
        if c < best_cost || (c == best_cost && w.id < best.id) {
            best = *w;
            best_cost = c;
        }
    }
    best
}
