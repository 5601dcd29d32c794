//! Two-dimensional cell-averaging CFAR on range-Doppler maps.
//!
//! Square-law convention: decisions compare cell *power* (magnitude
//! squared) against the training-cell mean scaled by
//! `alpha = N_t (pfa^(-1/N_t) - 1)`, which holds the false-alarm rate at
//! `pfa` exactly for exponentially distributed noise power.
//!
//! The Doppler axis wraps (it is a DFT axis); the range axis does not, and
//! cells whose training window would leave the map in range are not
//! tested. Implemented with summed-area tables so the per-cell cost is
//! constant.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

use super::{RangeDopplerMap, RdprocError};

/// CFAR window geometry and the designed false-alarm probability.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CfarConfig {
    /// Guard cells per side in range.
    pub guard_range: usize,
    /// Guard cells per side in Doppler.
    pub guard_doppler: usize,
    /// Training cells per side in range.
    pub train_range: usize,
    /// Training cells per side in Doppler.
    pub train_doppler: usize,
    /// Designed probability of false alarm.
    pub pfa: f64,
}

impl Default for CfarConfig {
    fn default() -> Self {
        Self {
            guard_range: 2,
            guard_doppler: 2,
            train_range: 8,
            train_doppler: 4,
            pfa: 1e-3,
        }
    }
}

impl CfarConfig {
    /// Training-cell count of the full window.
    pub fn num_training_cells(&self) -> usize {
        let outer = (2 * (self.guard_range + self.train_range) + 1)
            * (2 * (self.guard_doppler + self.train_doppler) + 1);
        let guard = (2 * self.guard_range + 1) * (2 * self.guard_doppler + 1);
        outer - guard
    }

    /// Threshold multiplier `N (pfa^(-1/N) - 1)` on the square-law mean.
    pub fn threshold_factor(&self) -> f64 {
        let n = self.num_training_cells() as f64;
        n * (math::powf(self.pfa, -1.0 / n) - 1.0)
    }
}

/// One CFAR detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub range_bin: usize,
    pub doppler_bin: usize,
    /// Linear magnitude of the detected cell.
    pub magnitude: f64,
}

/// Run 2D CA-CFAR over the map; detections are returned sorted by
/// descending magnitude.
pub fn cfar_2d(map: &RangeDopplerMap, config: &CfarConfig) -> Result<Vec<Detection>, RdprocError> {
    let rows = map.num_range_bins();
    let cols = map.num_doppler_bins();
    let w_r = config.guard_range + config.train_range;
    let w_d = config.guard_doppler + config.train_doppler;
    if config.train_range == 0 && config.train_doppler == 0 {
        return Err(RdprocError::BadCfarWindow);
    }
    if config.num_training_cells() == 0
        || 2 * w_r + 1 > rows
        || 2 * w_d + 1 > cols
        || !(0.0 < config.pfa && config.pfa < 1.0)
    {
        return Err(RdprocError::BadCfarWindow);
    }

    // Power cells with the Doppler axis tiled three times so wrapped
    // windows become contiguous; prefix sums over the tiled matrix.
    let tiled_cols = 3 * cols;
    let mut sat = vec![0.0f64; (rows + 1) * (tiled_cols + 1)];
    let idx = |r: usize, c: usize| r * (tiled_cols + 1) + c;
    for r in 0..rows {
        let row = &map.data[r];
        for c in 0..tiled_cols {
            let v = row[c % cols];
            let p = v * v;
            sat[idx(r + 1, c + 1)] =
                p + sat[idx(r, c + 1)] + sat[idx(r + 1, c)] - sat[idx(r, c)];
        }
    }
    let rect = |r0: usize, r1: usize, c0: usize, c1: usize| -> f64 {
        // Inclusive cell ranges [r0, r1] x [c0, c1] in tiled coordinates.
        sat[idx(r1 + 1, c1 + 1)] - sat[idx(r0, c1 + 1)] - sat[idx(r1 + 1, c0)] + sat[idx(r0, c0)]
    };

    let alpha = config.threshold_factor();
    let n_t = config.num_training_cells() as f64;
    let mut detections = Vec::new();
    for r in w_r..rows.saturating_sub(w_r) {
        for d in 0..cols {
            let dc = d + cols; // center column in tiled coordinates
            let outer = rect(r - w_r, r + w_r, dc - w_d, dc + w_d);
            let guard = rect(
                r - config.guard_range,
                r + config.guard_range,
                dc - config.guard_doppler,
                dc + config.guard_doppler,
            );
            let noise = (outer - guard) / n_t;
            let cell = map.data[r][d] * map.data[r][d];
            if cell > alpha * noise {
                detections.push(Detection {
                    range_bin: r,
                    doppler_bin: d,
                    magnitude: map.data[r][d],
                });
            }
        }
    }
    detections.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    Ok(detections)
}
