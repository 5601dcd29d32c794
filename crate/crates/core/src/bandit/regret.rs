//! Strong-regret accounting: cumulative excess cost of the played waveform
//! over the per-PRI hindsight-optimal one, plus a running average cost.

/// Running regret and average-cost ledger.
#[derive(Debug, Clone, Copy, Default)]
pub struct RegretLedger {
    cumulative_regret: f64,
    total_cost: f64,
    steps: u64,
}

impl RegretLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one PRI. The increment `chosen_cost - oracle_cost` is
    /// nonnegative whenever the oracle really is the feasible-set minimizer.
    pub fn record(&mut self, chosen_cost: f64, oracle_cost: f64) {
        debug_assert!(oracle_cost <= chosen_cost + 1.0);
        self.cumulative_regret += chosen_cost - oracle_cost;
        self.total_cost += chosen_cost;
        self.steps += 1;
    }

    pub fn cumulative_regret(&self) -> f64 {
        self.cumulative_regret
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn average_cost(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.total_cost / self.steps as f64
        }
    }
}
