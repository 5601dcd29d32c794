//! Constrained linear contextual EXP3.
//!
//! Selection mixes an exponentially weighted distribution over cumulative
//! cost estimates with a uniform exploration distribution over the current
//! constrained catalog. After each play, a least-squares model
//! `theta_t = Q^{-1} x_played C` (with `Q = sum_w P(w) x_w x_wᵀ`) yields an
//! estimated cost `<x_w, theta_t>` that is charged to every allowed arm's
//! running total. Estimates persist per waveform id even as the constrained
//! catalog changes composition.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{dot, SquareMatrix};
use crate::math;
use crate::waveforms::Waveform;

use super::ContextVector;

/// Failure modes of the EXP3 update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exp3Error {
    /// `Q_t` stayed singular even after ridge regularization; the contexts
    /// this round were degenerate.
    DegenerateContext,
}

impl fmt::Display for Exp3Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exp3Error::DegenerateContext => {
                f.write_str("design matrix Q_t singular after regularization (degenerate contexts)")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Exp3Error {}

/// EXP3 learner state.
#[derive(Debug, Clone)]
pub struct Exp3State {
    dim: usize,
    /// Learning rate in (0, 1).
    epsilon: f64,
    /// Mixing weight of the uniform exploration distribution in [0, 1].
    gamma: f64,
    /// Ridge added to `Q_t` when the plain solve fails.
    ridge: f64,
    /// Per-waveform cumulative cost estimates.
    cum_estimates: BTreeMap<u32, f64>,
}

impl Exp3State {
    pub fn new(dim: usize, epsilon: f64, gamma: f64) -> Self {
        debug_assert!(epsilon > 0.0 && epsilon < 1.0);
        debug_assert!((0.0..=1.0).contains(&gamma));
        Self {
            dim,
            epsilon,
            gamma,
            ridge: 1e-8,
            cum_estimates: BTreeMap::new(),
        }
    }

    /// Learning rate from the regret analysis, `ln(W) / (3 d sqrt(n))`,
    /// clamped into (0, 1).
    pub fn default_epsilon(num_waveforms: usize, dim: usize, horizon: usize) -> f64 {
        let eps = math::ln(num_waveforms as f64) / (3.0 * dim as f64 * math::sqrt(horizon as f64));
        eps.clamp(1e-6, 0.999)
    }

    /// Mixing factor `min(1, sqrt(W ln W / n))`.
    pub fn default_gamma(num_waveforms: usize, horizon: usize) -> f64 {
        let w = num_waveforms as f64;
        math::sqrt(w * math::ln(w) / horizon as f64).min(1.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cumulative_estimate(&self, waveform_id: u32) -> f64 {
        self.cum_estimates.get(&waveform_id).copied().unwrap_or(0.0)
    }

    /// Selection distribution over `allowed`:
    /// `P(w) = gamma * pi(w) + (1 - gamma) * exp(-eps * sum C_hat) / Z`,
    /// with `pi` uniform over the allowed set. Sums to one within 1e-12.
    pub fn distribution(&self, allowed: &[Waveform]) -> Vec<f64> {
        self.distribution_inner(allowed.iter().map(|w| w.id), allowed.len(), None)
    }

    /// [`Exp3State::distribution`] over raw arm ids.
    pub fn distribution_for_ids(&self, ids: &[u32]) -> Vec<f64> {
        self.distribution_inner(ids.iter().copied(), ids.len(), None)
    }

    /// [`Exp3State::distribution`] with an additive per-arm pseudo-cost
    /// merged into this round's cumulative estimates (tracker coupling).
    pub fn distribution_penalized(&self, allowed: &[Waveform], penalties: &[f64]) -> Vec<f64> {
        debug_assert_eq!(allowed.len(), penalties.len());
        self.distribution_inner(allowed.iter().map(|w| w.id), allowed.len(), Some(penalties))
    }

    fn distribution_inner(
        &self,
        ids: impl Iterator<Item = u32>,
        n: usize,
        penalties: Option<&[f64]>,
    ) -> Vec<f64> {
        debug_assert!(n > 0);
        let uniform = 1.0 / n as f64;
        // Stabilize the softmax by subtracting the largest exponent; the
        // distribution is invariant to constant shifts of the estimates.
        let exponents: Vec<f64> = ids
            .enumerate()
            .map(|(i, id)| {
                let pen = penalties.map_or(0.0, |p| p[i]);
                -self.epsilon * (self.cumulative_estimate(id) + pen)
            })
            .collect();
        let m = exponents.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let weights: Vec<f64> = exponents.iter().map(|&e| math::exp(e - m)).collect();
        let z: f64 = weights.iter().sum();
        weights
            .iter()
            .map(|&w| self.gamma * uniform + (1.0 - self.gamma) * w / z)
            .collect()
    }

    /// Least-squares cost estimation and cumulative update.
    ///
    /// `dist` must be the distribution actually used to sample `played_idx`
    /// (an index into `candidates`). Returns the per-candidate estimates
    /// that were charged.
    pub fn update_slices(
        &mut self,
        candidates: &[(u32, &[f64])],
        played_idx: usize,
        observed_cost: f64,
        dist: &[f64],
    ) -> Result<Vec<f64>, Exp3Error> {
        debug_assert_eq!(candidates.len(), dist.len());
        let d = self.dim;
        let mut q = SquareMatrix::zeros(d);
        for ((_, x), &p) in candidates.iter().zip(dist) {
            debug_assert_eq!(x.len(), d);
            for i in 0..d {
                for j in 0..d {
                    q[(i, j)] += p * x[i] * x[j];
                }
            }
        }
        let rhs: Vec<f64> = candidates[played_idx]
            .1
            .iter()
            .map(|&xi| xi * observed_cost)
            .collect();
        let theta = match q.solve(&rhs) {
            Some(t) => t,
            None => {
                let mut q_reg = q;
                q_reg.add_scaled_identity(self.ridge);
                q_reg.solve(&rhs).ok_or(Exp3Error::DegenerateContext)?
            }
        };
        let mut estimates = Vec::with_capacity(candidates.len());
        for (id, x) in candidates {
            let c_hat = dot(x, &theta);
            *self.cum_estimates.entry(*id).or_insert(0.0) += c_hat;
            estimates.push(c_hat);
        }
        Ok(estimates)
    }

    /// Typed wrapper over [`Exp3State::update_slices`].
    pub fn update(
        &mut self,
        candidates: &[(Waveform, ContextVector)],
        played: &Waveform,
        observed_cost: f64,
        dist: &[f64],
    ) -> Result<Vec<f64>, Exp3Error> {
        let slices: Vec<(u32, &[f64])> = candidates
            .iter()
            .map(|(w, c)| (w.id, c.as_slice()))
            .collect();
        let played_idx = candidates
            .iter()
            .position(|(w, _)| w.id == played.id)
            .expect("played waveform must be among the candidates");
        self.update_slices(&slices, played_idx, observed_cost, dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use alloc::vec;

    fn wf(id: u32) -> Waveform {
        Waveform {
            id,
            center_freq: 50e6,
            bandwidth: 10e6 + id as f64,
            pulse_duration: 1e-6,
            amplitude: 1.0,
        }
    }

    #[test]
    fn equal_estimates_give_uniform() {
        let s = Exp3State::new(3, 0.1, 0.2);
        let allowed: Vec<_> = (0..5).map(wf).collect();
        let p = s.distribution(&allowed);
        for &pi in &p {
            assert!((pi - 0.2).abs() < 1e-12);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_one_is_pure_exploration() {
        let mut s = Exp3State::new(3, 0.5, 1.0);
        s.cum_estimates.insert(0, 100.0);
        s.cum_estimates.insert(1, -3.0);
        let allowed: Vec<_> = (0..4).map(wf).collect();
        for &pi in &s.distribution(&allowed) {
            assert!((pi - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn two_arm_softmax_value() {
        let mut s = Exp3State::new(3, 1.0 - 1e-12, 0.0);
        s.epsilon = 1.0;
        s.cum_estimates.insert(0, 0.0);
        s.cum_estimates.insert(1, 1.0);
        let p = s.distribution(&[wf(0), wf(1)]);
        let e = math::exp(-1.0);
        assert!((p[0] - 1.0 / (1.0 + e)).abs() < 1e-12);
        assert!((p[1] - e / (1.0 + e)).abs() < 1e-12);
        assert!((p[0] - 0.7311).abs() < 1e-4);
        assert!((p[1] - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn exploration_floor_holds() {
        let mut s = Exp3State::new(3, 0.3, 0.25);
        for id in 0..8u32 {
            s.cum_estimates.insert(id, id as f64 * 10.0);
        }
        let allowed: Vec<_> = (0..8).map(wf).collect();
        let p = s.distribution(&allowed);
        for &pi in &p {
            assert!(pi >= 0.25 / 8.0 - 1e-15);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_invariance() {
        let mut s = Exp3State::new(3, 0.07, 0.1);
        for id in 0..6u32 {
            s.cum_estimates.insert(id, (id as f64 - 2.0) * 4.0);
        }
        let allowed: Vec<_> = (0..6).map(wf).collect();
        let p1 = s.distribution(&allowed);
        for v in s.cum_estimates.values_mut() {
            *v += 123.456;
        }
        let p2 = s.distribution(&allowed);
        for (a, b) in p1.iter().zip(&p2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn one_hot_contexts_reduce_to_classical_exp3() {
        // With orthonormal per-arm contexts and any sampling distribution,
        // Q = diag(P) and the played arm is charged C / P(played) while all
        // other arms are charged zero: classical importance weighting.
        let w = 4;
        let mut s = Exp3State::new(w, 0.1, 0.5);
        let xs: Vec<Vec<f64>> = (0..w)
            .map(|i| (0..w).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let candidates: Vec<(u32, &[f64])> =
            xs.iter().enumerate().map(|(i, x)| (i as u32, x.as_slice())).collect();
        let dist = vec![0.25; w];
        let est = s.update_slices(&candidates, 2, 0.6, &dist).unwrap();
        for (i, &e) in est.iter().enumerate() {
            if i == 2 {
                assert!((e - 0.6 / 0.25).abs() < 1e-12);
            } else {
                assert!(e.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_cost_leaves_estimates_unchanged() {
        let mut s = Exp3State::new(3, 0.1, 0.2);
        let x: &[f64] = &[0.3, 0.2, 0.1];
        let y: &[f64] = &[0.1, 0.4, 0.8];
        let cands = [(0u32, x), (1u32, y)];
        let dist = [0.5, 0.5];
        let est = s.update_slices(&cands, 0, 0.0, &dist).unwrap();
        assert_eq!(est, vec![0.0, 0.0]);
        assert_eq!(s.cumulative_estimate(0), 0.0);
        assert_eq!(s.cumulative_estimate(1), 0.0);
    }

    #[test]
    fn scalar_context_charges_cost_to_every_arm() {
        // d = 1, same scalar context x for all arms: Q = x^2, theta = C / x,
        // so every arm's estimate is exactly C.
        let mut s = Exp3State::new(1, 0.1, 0.2);
        let x: &[f64] = &[0.37];
        let cands = [(0u32, x), (1u32, x), (2u32, x)];
        let dist = [0.2, 0.5, 0.3];
        let est = s.update_slices(&cands, 1, 0.42, &dist).unwrap();
        for &e in &est {
            assert!((e - 0.42).abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_contexts_are_inert() {
        // Cold-start rounds produce a singular Q; the ridge fallback keeps
        // the update well-defined and the zero played context yields zero
        // estimates.
        let mut s = Exp3State::new(3, 0.1, 0.2);
        let z: &[f64] = &[0.0, 0.0, 0.0];
        let cands = [(0u32, z), (1u32, z)];
        let dist = [0.5, 0.5];
        let est = s.update_slices(&cands, 0, 0.9, &dist).unwrap();
        assert_eq!(est, vec![0.0, 0.0]);
    }

    #[test]
    fn sampling_matches_distribution() {
        let mut s = Exp3State::new(3, 0.4, 0.1);
        s.cum_estimates.insert(0, 0.0);
        s.cum_estimates.insert(1, 3.0);
        s.cum_estimates.insert(2, 6.0);
        let allowed: Vec<_> = (0..3).map(wf).collect();
        let p = s.distribution(&allowed);
        let mut rng = Stream::derive(17, "exp3-sample");
        let mut counts = [0usize; 3];
        let n = 200_000;
        for _ in 0..n {
            counts[rng.sample_categorical(&p)] += 1;
        }
        for i in 0..3 {
            let f = counts[i] as f64 / n as f64;
            assert!((f - p[i]).abs() < 0.01, "arm {i}: {f} vs {}", p[i]);
        }
    }
}
