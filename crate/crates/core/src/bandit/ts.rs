//! Gaussian linear Thompson Sampling with a shared parameter vector.
//!
//! The posterior over the cost model is `N(theta_hat, v^2 B^{-1})` with
//! `B = I + sum x xᵀ` and `f = sum x C`; selection draws one sample and
//! picks the candidate minimizing the sampled inner product.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, SquareMatrix};
use crate::rng::Stream;
use crate::waveforms::Waveform;

use super::ContextVector;

/// Thompson Sampling sufficient statistics.
#[derive(Debug, Clone)]
pub struct TsState {
    b: SquareMatrix,
    f: Vec<f64>,
    theta_hat: Vec<f64>,
    v: f64,
}

impl TsState {
    /// Fresh learner: `B = I_d`, `f = 0`, exploration scale `v`.
    pub fn new(dim: usize, v: f64) -> Self {
        Self {
            b: SquareMatrix::identity(dim),
            f: vec![0.0; dim],
            theta_hat: vec![0.0; dim],
            v,
        }
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn precision(&self) -> &SquareMatrix {
        &self.b
    }

    pub fn weighted_sum(&self) -> &[f64] {
        &self.f
    }

    /// Posterior mean `theta_hat = B^{-1} f`.
    pub fn theta_hat(&self) -> &[f64] {
        &self.theta_hat
    }

    /// Draw `theta ~ N(theta_hat, v^2 B^{-1})`.
    ///
    /// With `B = L Lᵀ`, the sample is `theta_hat + v * L^{-T} z` for
    /// standard-normal `z`, whose covariance is exactly `v^2 B^{-1}`.
    pub fn sample_theta(&self, rng: &mut Stream) -> Vec<f64> {
        let l = self
            .b
            .cholesky()
            .expect("B is positive definite by construction");
        let z: Vec<f64> = (0..self.dim()).map(|_| rng.next_normal()).collect();
        let y = l.solve_transposed_lower(&z);
        self.theta_hat
            .iter()
            .zip(&y)
            .map(|(&m, &d)| m + self.v * d)
            .collect()
    }

    /// Select the index minimizing `<x, theta~>`; ties go to the earliest
    /// candidate (candidate lists preserve catalog order, so that is the
    /// lowest waveform id).
    pub fn select_index(&self, contexts: &[&[f64]], rng: &mut Stream) -> usize {
        debug_assert!(!contexts.is_empty());
        let theta = self.sample_theta(rng);
        let mut best = 0;
        let mut best_score = dot(contexts[0], &theta);
        for (i, x) in contexts.iter().enumerate().skip(1) {
            let s = dot(x, &theta);
            if s < best_score {
                best = i;
                best_score = s;
            }
        }
        best
    }

    /// [`TsState::select_index`] with an additive per-candidate penalty on
    /// the sampled score (tracker coupling).
    pub fn select_index_penalized(
        &self,
        contexts: &[&[f64]],
        penalties: &[f64],
        rng: &mut Stream,
    ) -> usize {
        debug_assert_eq!(contexts.len(), penalties.len());
        let theta = self.sample_theta(rng);
        let mut best = 0;
        let mut best_score = dot(contexts[0], &theta) + penalties[0];
        for (i, x) in contexts.iter().enumerate().skip(1) {
            let s = dot(x, &theta) + penalties[i];
            if s < best_score {
                best = i;
                best_score = s;
            }
        }
        best
    }

    /// Rank-one posterior update with the played context and observed cost.
    pub fn update(&mut self, x: &[f64], observed_cost: f64) {
        debug_assert_eq!(x.len(), self.dim());
        self.b.add_outer(x);
        for (fi, &xi) in self.f.iter_mut().zip(x) {
            *fi += xi * observed_cost;
        }
        self.theta_hat = self
            .b
            .solve(&self.f)
            .expect("B is positive definite by construction");
    }
}

/// Typed wrapper over [`TsState::select_index`] for the radar pipeline.
pub fn ts_select(
    state: &TsState,
    candidates: &[(Waveform, ContextVector)],
    rng: &mut Stream,
) -> Waveform {
    let xs: Vec<&[f64]> = candidates.iter().map(|(_, c)| c.as_slice()).collect();
    candidates[state.select_index(&xs, rng)].0
}
