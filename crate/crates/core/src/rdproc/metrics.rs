//! Image-quality and detection metrics for one CPI.

use alloc::vec::Vec;

use crate::math;

use super::cfar::Detection;
use super::RangeDopplerMap;

/// Gate half-width (bins) for associating detections with truth.
const GATE: i64 = 2;
/// Doppler bins excluded around the target peak when hunting sidelobes.
const SIDELOBE_GUARD: i64 = 3;
/// Cap applied to SINR in degenerate (noise-free) images, dB.
const SINR_CAP_DB: f64 = 300.0;

/// Ground-truth target location on the map grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruthBin {
    pub range_bin: usize,
    pub doppler_bin: usize,
}

/// Per-CPI detection and image metrics.
#[derive(Debug, Clone)]
pub struct CpiMetrics {
    /// Fraction of truth targets matched by a detection within the gate.
    pub pd: f64,
    /// Detections not matching any truth target, as a fraction of map
    /// cells.
    pub pfa_hat: f64,
    /// Peak target-cell power over mean non-target power, dB (capped).
    pub image_sinr_db: f64,
    /// Magnitude slice of the map at the first truth target's range bin.
    pub doppler_profile: Vec<f64>,
    /// Peak Doppler sidelobe at the first truth target's range bin,
    /// dB relative to the target peak (negative when the peak dominates).
    pub peak_sidelobe_db: f64,
}

fn doppler_distance(a: usize, b: usize, m: usize) -> i64 {
    let d = (a as i64 - b as i64).rem_euclid(m as i64);
    d.min(m as i64 - d)
}

/// Compute detection and image metrics against known truth.
pub fn metrics(
    map: &RangeDopplerMap,
    truth: &[TruthBin],
    detections: &[Detection],
) -> CpiMetrics {
    let m = map.num_doppler_bins();
    let rows = map.num_range_bins();

    let gated = |det: &Detection, t: &TruthBin| {
        (det.range_bin as i64 - t.range_bin as i64).abs() <= GATE
            && doppler_distance(det.doppler_bin, t.doppler_bin, m) <= GATE
    };

    let mut hits = 0usize;
    for t in truth {
        if detections.iter().any(|d| gated(d, t)) {
            hits += 1;
        }
    }
    let pd = if truth.is_empty() {
        0.0
    } else {
        hits as f64 / truth.len() as f64
    };

    let false_alarms = detections
        .iter()
        .filter(|d| !truth.iter().any(|t| gated(d, t)))
        .count();
    let cells = (rows * m).max(1);
    let pfa_hat = false_alarms as f64 / cells as f64;

    // SINR: strongest cell power inside each truth gate over the mean
    // power outside every (wider) exclusion zone.
    let mut sinr_db = 0.0;
    if !truth.is_empty() {
        let mut signal = 0.0f64;
        for t in truth {
            for r in t.range_bin.saturating_sub(GATE as usize)
                ..=(t.range_bin + GATE as usize).min(rows - 1)
            {
                for d in 0..m {
                    if doppler_distance(d, t.doppler_bin, m) <= GATE {
                        signal = signal.max(map.data[r][d] * map.data[r][d]);
                    }
                }
            }
        }
        let exclusion = 2 * GATE;
        let mut noise_sum = 0.0;
        let mut noise_cells = 0usize;
        for r in 0..rows {
            for d in 0..m {
                let excluded = truth.iter().any(|t| {
                    (r as i64 - t.range_bin as i64).abs() <= exclusion
                        && doppler_distance(d, t.doppler_bin, m) <= exclusion
                });
                if !excluded {
                    noise_sum += map.data[r][d] * map.data[r][d];
                    noise_cells += 1;
                }
            }
        }
        sinr_db = if noise_cells == 0 || noise_sum <= 0.0 {
            SINR_CAP_DB
        } else {
            (math::linear_to_db(signal / (noise_sum / noise_cells as f64))).min(SINR_CAP_DB)
        };
    }

    // Doppler profile and peak sidelobe at the first truth range bin.
    let (doppler_profile, peak_sidelobe_db) = match truth.first() {
        None => (Vec::new(), 0.0),
        Some(t) => {
            let profile = map.data[t.range_bin.min(rows - 1)].clone();
            let mut peak = 0.0f64;
            let mut sidelobe = 0.0f64;
            for (d, &v) in profile.iter().enumerate() {
                if doppler_distance(d, t.doppler_bin, m) <= SIDELOBE_GUARD {
                    peak = peak.max(v);
                } else {
                    sidelobe = sidelobe.max(v);
                }
            }
            let psl = if peak <= 0.0 {
                0.0
            } else if sidelobe <= 0.0 {
                -SINR_CAP_DB
            } else {
                20.0 * math::log10(sidelobe / peak)
            };
            (profile, psl)
        }
    };

    CpiMetrics {
        pd,
        pfa_hat,
        image_sinr_db: sinr_db,
        doppler_profile,
        peak_sidelobe_db,
    }
}
