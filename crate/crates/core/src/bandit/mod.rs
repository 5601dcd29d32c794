//! Linear contextual bandit machinery: context-vector assembly from
//! per-pair running statistics, the Thompson Sampling and EXP3 learners,
//! baseline policies, and regret accounting.
//!
//! Contexts for the radar pipeline are three-dimensional — running mean,
//! sample variance, and most recent observed cost of the (waveform,
//! sensed-state) pair — but both learners are generic over the context
//! dimension so they can be exercised on synthetic problems (for example
//! one-hot contexts, which reduce EXP3 to its classical form).

mod baseline;
mod exp3;
mod regret;
mod ts;

pub use baseline::{fixed_waveform, reactive_waveform};
pub use exp3::{Exp3Error, Exp3State};
pub use regret::RegretLedger;
pub use ts::{ts_select, TsState};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::spectrum::InterferenceState;
use crate::waveforms::Waveform;

/// Context feature vector for one (waveform, sensed state) candidate.
///
/// Features: `[running mean cost, sample variance (N-1 denominator), last
/// observed cost]`. Unseen pairs take the all-zero cold-start value, which
/// is optimistic under cost minimization and drives exploration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContextVector {
    pub features: [f64; 3],
}

impl ContextVector {
    pub const DIM: usize = 3;

    pub const COLD_START: ContextVector = ContextVector {
        features: [0.0; 3],
    };

    pub fn as_slice(&self) -> &[f64] {
        &self.features
    }
}

/// Welford running moments for one (waveform, sensed-state) pair.
#[derive(Debug, Clone, Copy, Default)]
struct PairStats {
    count: u64,
    mean: f64,
    m2: f64,
    last: f64,
}

impl PairStats {
    fn push(&mut self, cost: f64) {
        self.count += 1;
        let delta = cost - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (cost - self.mean);
        self.last = cost;
    }

    fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// Sufficient statistics of the observation history, keyed by the exact
/// (waveform id, sensed bit-vector) pair. With `S = 10` there are at most
/// 1024 states; larger problems rely on the linear model generalizing
/// across pairs rather than on state aggregation.
#[derive(Debug, Clone, Default)]
pub struct HistoryStore {
    pairs: BTreeMap<(u32, u64), PairStats>,
}

impl HistoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record an observed cost for the pair.
    pub fn record(&mut self, waveform_id: u32, sensed: &InterferenceState, cost: f64) {
        self.pairs
            .entry((waveform_id, sensed.mask()))
            .or_default()
            .push(cost);
    }

    /// Number of observations of the pair.
    pub fn count(&self, waveform_id: u32, sensed: &InterferenceState) -> u64 {
        self.pairs
            .get(&(waveform_id, sensed.mask()))
            .map_or(0, |p| p.count)
    }

    /// Assemble the context vector for a candidate waveform under the
    /// current sensed state.
    pub fn context(&self, w: &Waveform, sensed: &InterferenceState) -> ContextVector {
        match self.pairs.get(&(w.id, sensed.mask())) {
            None => ContextVector::COLD_START,
            Some(p) => ContextVector {
                features: [p.mean, p.variance(), p.last],
            },
        }
    }

    /// Contexts for a whole candidate list, in order.
    pub fn contexts(&self, allowed: &[Waveform], sensed: &InterferenceState) -> Vec<ContextVector> {
        allowed.iter().map(|w| self.context(w, sensed)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    const B: f64 = 100e6;

    fn wf(id: u32) -> Waveform {
        Waveform {
            id,
            center_freq: 50e6,
            bandwidth: 10e6,
            pulse_duration: 1e-6,
            amplitude: 1.0,
        }
    }

    fn st(s: &str) -> InterferenceState {
        InterferenceState::from_bitstring(s, B).unwrap()
    }

    #[test]
    fn cold_start_is_zero() {
        let h = HistoryStore::new();
        assert_eq!(h.context(&wf(3), &st("0101")), ContextVector::COLD_START);
    }

    #[test]
    fn two_observations_hand_check() {
        let mut h = HistoryStore::new();
        let s = st("0011");
        h.record(2, &s, 0.2);
        h.record(2, &s, 0.4);
        let c = h.context(&wf(2), &s);
        assert!((c.features[0] - 0.3).abs() < 1e-15);
        // Variance with N-1 = 1 denominator: (0.1^2 + 0.1^2) / 1 = 0.02.
        assert!((c.features[1] - 0.02).abs() < 1e-15);
        assert_eq!(c.features[2], 0.4);
    }

    #[test]
    fn single_observation_has_zero_variance() {
        let mut h = HistoryStore::new();
        let s = st("1111");
        h.record(0, &s, 0.7);
        let c = h.context(&wf(0), &s);
        assert_eq!(c.features, [0.7, 0.0, 0.7]);
    }

    #[test]
    fn pairs_keyed_by_state_and_waveform() {
        let mut h = HistoryStore::new();
        h.record(0, &st("01"), 0.9);
        assert_eq!(h.context(&wf(0), &st("10")), ContextVector::COLD_START);
        assert_eq!(h.context(&wf(1), &st("01")), ContextVector::COLD_START);
        assert_eq!(h.count(0, &st("01")), 1);
    }

    #[test]
    fn welford_matches_batch_recomputation() {
        let mut rng = Stream::derive(21, "welford");
        let s = st("0110");
        let mut h = HistoryStore::new();
        let mut raw = alloc::vec::Vec::new();
        for _ in 0..500 {
            let c = rng.next_f64();
            raw.push(c);
            h.record(4, &s, c);
        }
        let ctx = h.context(&wf(4), &s);
        let n = raw.len() as f64;
        let mean: f64 = raw.iter().sum::<f64>() / n;
        let var: f64 = raw.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n - 1.0);
        assert!((ctx.features[0] - mean).abs() / mean.abs() < 1e-12);
        assert!((ctx.features[1] - var).abs() / var.abs() < 1e-12);
        assert_eq!(ctx.features[2], *raw.last().unwrap());
    }
}
