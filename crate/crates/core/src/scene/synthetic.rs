//! Stationary synthetic linear environment.
//!
//! Each PRI draws a fresh context vector per arm; the realized cost of the
//! played arm is `<theta, x> + eta` with conditionally subgaussian Gaussian
//! noise. Because `theta` is known here, regret can be charged against the
//! noise-free per-PRI minimum, which is the quantity whose growth rate the
//! learner guarantees speak about.

use alloc::vec::Vec;

use crate::linalg::dot;
use crate::rng::Stream;

/// Synthetic environment parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SyntheticLinearConfig {
    /// Number of arms.
    pub num_arms: usize,
    /// True model vector; its dimension sets the context dimension.
    pub theta: Vec<f64>,
    /// Cost noise standard deviation (must be <= 1 to stay 1-subgaussian).
    pub noise_std: f64,
}

impl Default for SyntheticLinearConfig {
    fn default() -> Self {
        Self {
            num_arms: 16,
            theta: alloc::vec![0.5, 0.3, 0.2],
            noise_std: 0.05,
        }
    }
}

/// Per-PRI state of the synthetic environment.
#[derive(Debug, Clone)]
pub struct SyntheticLinearScene {
    config: SyntheticLinearConfig,
    contexts: Vec<Vec<f64>>,
}

impl SyntheticLinearScene {
    pub fn new(config: &SyntheticLinearConfig) -> Self {
        debug_assert!(config.noise_std <= 1.0);
        Self {
            config: config.clone(),
            contexts: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.config.theta.len()
    }

    pub fn num_arms(&self) -> usize {
        self.config.num_arms
    }

    /// Draw this PRI's contexts, one per arm, i.i.d. uniform on [0, 1]^d.
    pub fn draw_contexts(&mut self, rng: &mut Stream) -> &[Vec<f64>] {
        let d = self.dim();
        self.contexts = (0..self.config.num_arms)
            .map(|_| (0..d).map(|_| rng.next_f64()).collect())
            .collect();
        &self.contexts
    }

    pub fn contexts(&self) -> &[Vec<f64>] {
        &self.contexts
    }

    /// Noise-free expected cost of an arm under the current contexts.
    pub fn expected_cost(&self, arm: usize) -> f64 {
        dot(&self.contexts[arm], &self.config.theta)
    }

    /// Realized (noisy) cost of the played arm.
    pub fn realized_cost(&self, arm: usize, rng: &mut Stream) -> f64 {
        self.expected_cost(arm) + rng.normal(0.0, self.config.noise_std)
    }

    /// Noise-free per-PRI minimum over all arms.
    pub fn oracle_cost(&self) -> f64 {
        (0..self.config.num_arms)
            .map(|a| self.expected_cost(a))
            .fold(f64::INFINITY, f64::min)
    }
}
