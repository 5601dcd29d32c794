//! Range / range-rate Kalman tracking and waveform-parameter optimization.
//!
//! The tracker runs once per CPI on measurements extracted from the
//! range-Doppler map. The measurement-noise covariance depends on the pulse
//! duration `T` and chirp rate `alpha` of the transmitted waveform, which
//! makes the tracking error covariance a handle for choosing the next
//! waveform's parameters.
//!
//! Angular frequency convention: `w_c = 2 pi f_c` is used wherever the
//! noise matrix and the optimal-parameter formulas reference the carrier.

use core::fmt;

use crate::linalg::Sym2;
use crate::math;
use crate::SPEED_OF_LIGHT;

/// Tracker errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackerError {
    /// Non-positive pulse duration, SNR, or carrier.
    DomainError,
    /// `p11 p22 - p12^2 <= 0`: the covariance is not positive definite.
    DegenerateCovariance,
}

impl fmt::Display for TrackerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackerError::DomainError => f.write_str("T, eta and f_c must be positive"),
            TrackerError::DegenerateCovariance => {
                f.write_str("tracking covariance must be positive definite")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TrackerError {}

/// Waveform-dependent measurement-noise covariance over (range, range-rate):
///
/// ```text
/// [ c^2 T^2 / (2 eta)                 -c^2 alpha T^2 / (w_c eta)                  ]
/// [ -c^2 alpha T^2 / (w_c eta)        c^2/(w_c eta) * (1/(2T) + 2 alpha^2 T^2)    ]
/// ```
///
/// Scaling the SNR `eta` by `k` scales every entry by `1/k`.
pub fn measurement_noise(
    pulse_duration: f64,
    chirp_rate: f64,
    snr_linear: f64,
    carrier_hz: f64,
) -> Result<Sym2, TrackerError> {
    if pulse_duration <= 0.0 || snr_linear <= 0.0 || carrier_hz <= 0.0 {
        return Err(TrackerError::DomainError);
    }
    let c = SPEED_OF_LIGHT;
    let t = pulse_duration;
    let w_c = 2.0 * core::f64::consts::PI * carrier_hz;
    let n11 = c * c * t * t / (2.0 * snr_linear);
    let n12 = -c * c * chirp_rate * t * t / (w_c * snr_linear);
    let n22 = c * c / (w_c * snr_linear) * (1.0 / (2.0 * t) + 2.0 * chirp_rate * chirp_rate * t * t);
    Ok(Sym2 {
        m11: n11,
        m12: n12,
        m22: n22,
    })
}

/// Diagnostics from one Kalman step.
#[derive(Debug, Clone, Copy)]
pub struct KalmanStepInfo {
    /// Innovation (measurement minus prediction).
    pub innovation: [f64; 2],
    /// Innovation covariance.
    pub innovation_cov: Sym2,
    /// Kalman gain rows.
    pub gain: [[f64; 2]; 2],
    /// Normalized innovation squared, `y' S^-1 y` (chi-square, 2 dof, for a
    /// consistent filter).
    pub nis: f64,
    /// Whether the posterior covariance needed an eigenvalue clamp.
    pub clamped: bool,
}

/// Constant-velocity track over (range m, range-rate m/s).
#[derive(Debug, Clone, Copy)]
pub struct TrackState {
    /// State estimate (range, range-rate).
    pub estimate: [f64; 2],
    /// Estimate covariance.
    pub covariance: Sym2,
    /// White-acceleration process noise intensity, m/s².
    pub accel_std: f64,
}

impl TrackState {
    pub fn new(initial: [f64; 2], covariance: Sym2, accel_std: f64) -> Self {
        Self {
            estimate: initial,
            covariance,
            accel_std,
        }
    }

    /// Constant-velocity prediction over `dt` seconds.
    pub fn predict(&mut self, dt: f64) {
        debug_assert!(dt > 0.0);
        let [r, v] = self.estimate;
        self.estimate = [r + dt * v, v];
        let p = self.covariance;
        // F P F' with F = [[1, dt], [0, 1]].
        let m11 = p.m11 + 2.0 * dt * p.m12 + dt * dt * p.m22;
        let m12 = p.m12 + dt * p.m22;
        let m22 = p.m22;
        let q = self.accel_std * self.accel_std;
        self.covariance = Sym2 {
            m11: m11 + q * dt * dt * dt * dt / 4.0,
            m12: m12 + q * dt * dt * dt / 2.0,
            m22: m22 + q * dt * dt,
        };
    }

    /// Measurement update with identity measurement model and noise `noise`.
    /// Uses the Joseph form and symmetrize-and-clamp to keep the covariance
    /// positive semidefinite under roundoff.
    pub fn update(&mut self, z: [f64; 2], noise: &Sym2) -> KalmanStepInfo {
        let p = self.covariance;
        let s = p.add(noise);
        let s_inv = s.inverse().expect("innovation covariance invertible");
        let y = [z[0] - self.estimate[0], z[1] - self.estimate[1]];
        // K = P S^-1 (general 2x2 product; K is not symmetric).
        let k = [
            [
                p.m11 * s_inv.m11 + p.m12 * s_inv.m12,
                p.m11 * s_inv.m12 + p.m12 * s_inv.m22,
            ],
            [
                p.m12 * s_inv.m11 + p.m22 * s_inv.m12,
                p.m12 * s_inv.m12 + p.m22 * s_inv.m22,
            ],
        ];
        self.estimate[0] += k[0][0] * y[0] + k[0][1] * y[1];
        self.estimate[1] += k[1][0] * y[0] + k[1][1] * y[1];

        // Joseph form: (I-K) P (I-K)' + K N K'.
        let a = [[1.0 - k[0][0], -k[0][1]], [-k[1][0], 1.0 - k[1][1]]];
        let apa = congruence(&a, &p);
        let knk = congruence(&k, noise);
        let mut post = apa.add(&knk);
        // Exact symmetry holds by construction; clamp eigenvalues if
        // roundoff drove one negative.
        let mut clamped = false;
        let (lo, _) = post.eigenvalues();
        if lo < 0.0 {
            post = post.add(&Sym2::diag(-lo + 1e-30, -lo + 1e-30));
            clamped = true;
        }
        self.covariance = post;

        KalmanStepInfo {
            innovation: y,
            innovation_cov: s,
            gain: k,
            nis: s_inv.quad_form(y),
            clamped,
        }
    }

    /// Predict + update in one call.
    pub fn step(&mut self, z: [f64; 2], noise: &Sym2, dt: f64) -> KalmanStepInfo {
        self.predict(dt);
        self.update(z, noise)
    }
}

/// `A P A'` for a general 2x2 `A` and symmetric `P` (result symmetric).
fn congruence(a: &[[f64; 2]; 2], p: &Sym2) -> Sym2 {
    // Row i of A P: (a_i0 p11 + a_i1 p12, a_i0 p12 + a_i1 p22).
    let r0 = [
        a[0][0] * p.m11 + a[0][1] * p.m12,
        a[0][0] * p.m12 + a[0][1] * p.m22,
    ];
    let r1 = [
        a[1][0] * p.m11 + a[1][1] * p.m12,
        a[1][0] * p.m12 + a[1][1] * p.m22,
    ];
    Sym2 {
        m11: r0[0] * a[0][0] + r0[1] * a[0][1],
        m12: r0[0] * a[1][0] + r0[1] * a[1][1],
        m22: r1[0] * a[1][0] + r1[1] * a[1][1],
    }
}

/// Track-optimal chirp rate and pulse duration from the tracking error
/// covariance:
///
/// `alpha* = -w_c p12 / (2 p11)`,
/// `T* = (p11^2 / (w_c^2 (p11 p22 - p12^2)))^(1/4)`.
///
/// These minimize the covariance-weighted measurement information loss
/// `tr(P^-1 N(T, alpha))` at the second-order (small-error) expansion of
/// the posterior. `alpha*` is invariant under `P -> kP`; `T*` scales as
/// `k^(-1/4)`.
pub fn optimal_waveform_params(p: &Sym2, carrier_hz: f64) -> Result<(f64, f64), TrackerError> {
    if carrier_hz <= 0.0 {
        return Err(TrackerError::DomainError);
    }
    let det = p.det();
    if p.m11 <= 0.0 || det <= 0.0 {
        return Err(TrackerError::DegenerateCovariance);
    }
    let w_c = 2.0 * core::f64::consts::PI * carrier_hz;
    let alpha_star = -w_c * p.m12 / (2.0 * p.m11);
    let t_star = math::powf(p.m11 * p.m11 / (w_c * w_c * det), 0.25);
    Ok((alpha_star, t_star))
}

/// How tracker-preferred parameters feed back into waveform selection.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TrackerCoupling {
    /// Tracker output does not influence selection.
    Off,
    /// Replace the learner's pick with the allowed waveform nearest to
    /// `(T*, alpha*)`.
    Direct,
    /// Add `penalty_weight * (alpha - alpha*)^2` (normalized) to each
    /// candidate's selection score.
    Penalty { weight: f64 },
}

impl Default for TrackerCoupling {
    fn default() -> Self {
        TrackerCoupling::Off
    }
}

/// Nearest allowed waveform to `(alpha*, T*)` in per-axis-normalized
/// Euclidean distance over (pulse duration, chirp rate). Ties go to the
/// lowest id. An axis with zero spread across `allowed` contributes
/// nothing.
pub fn nearest_waveform(
    alpha_star: f64,
    t_star: f64,
    allowed: &[crate::waveforms::Waveform],
) -> crate::waveforms::Waveform {
    debug_assert!(!allowed.is_empty());
    let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut a_min, mut a_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for w in allowed {
        t_min = t_min.min(w.pulse_duration);
        t_max = t_max.max(w.pulse_duration);
        a_min = a_min.min(w.chirp_rate());
        a_max = a_max.max(w.chirp_rate());
    }
    // Clamp the request into the representable box first.
    let t_req = t_star.clamp(t_min, t_max);
    let a_req = alpha_star.clamp(a_min, a_max);
    let t_span = t_max - t_min;
    let a_span = a_max - a_min;
    let mut best = allowed[0];
    let mut best_d = f64::INFINITY;
    for w in allowed {
        let dt = if t_span > 0.0 {
            (w.pulse_duration - t_req) / t_span
        } else {
            0.0
        };
        let da = if a_span > 0.0 {
            (w.chirp_rate() - a_req) / a_span
        } else {
            0.0
        };
        let d = dt * dt + da * da;
        if d < best_d {
            best = *w;
            best_d = d;
        }
    }
    best
}

/// Per-candidate additive penalties `weight * ((alpha - alpha*)/span)^2`
/// for merging into a learner's selection score. Zero weight returns all
/// zeros, leaving the learner untouched.
pub fn chirp_rate_penalties(
    alpha_star: f64,
    weight: f64,
    allowed: &[crate::waveforms::Waveform],
) -> alloc::vec::Vec<f64> {
    let (mut a_min, mut a_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for w in allowed {
        a_min = a_min.min(w.chirp_rate());
        a_max = a_max.max(w.chirp_rate());
    }
    let span = (a_max - a_min).max(f64::MIN_POSITIVE);
    allowed
        .iter()
        .map(|w| {
            let d = (w.chirp_rate() - alpha_star.clamp(a_min, a_max)) / span;
            weight * d * d
        })
        .collect()
}

/// Root-mean-square range error between a track log and the truth.
pub fn rmse(estimates: &[f64], truth: &[f64]) -> f64 {
    debug_assert_eq!(estimates.len(), truth.len());
    if estimates.is_empty() {
        return 0.0;
    }
    let sum: f64 = estimates
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t) * (e - t))
        .sum();
    math::sqrt(sum / estimates.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use crate::waveforms::Waveform;
    use alloc::vec::Vec;

    #[test]
    fn zero_chirp_gives_diagonal_noise() {
        let t = 10e-6;
        let eta = 100.0;
        let f_c = 3e9;
        let n = measurement_noise(t, 0.0, eta, f_c).unwrap();
        let c = SPEED_OF_LIGHT;
        let w_c = 2.0 * core::f64::consts::PI * f_c;
        assert_eq!(n.m12, 0.0);
        assert!((n.m11 - c * c * t * t / (2.0 * eta)).abs() < 1e-6 * n.m11);
        assert!((n.m22 - c * c / (2.0 * t * w_c * eta)).abs() < 1e-6 * n.m22);
    }

    #[test]
    fn snr_scaling_is_exact() {
        let n1 = measurement_noise(10e-6, 1e12, 50.0, 3e9).unwrap();
        let n2 = measurement_noise(10e-6, 1e12, 100.0, 3e9).unwrap();
        assert!((n2.m11 * 2.0 - n1.m11).abs() < 1e-12 * n1.m11.abs());
        assert!((n2.m12 * 2.0 - n1.m12).abs() < 1e-12 * n1.m12.abs());
        assert!((n2.m22 * 2.0 - n1.m22).abs() < 1e-12 * n1.m22.abs());
    }

    #[test]
    fn direct_substitution_matches() {
        // Independent re-derivation of each entry for T = 10 us,
        // alpha = 1e12 Hz/s, eta = 100, f_c = 3 GHz.
        let t = 10e-6;
        let alpha = 1e12;
        let eta = 100.0;
        let f_c = 3e9;
        let n = measurement_noise(t, alpha, eta, f_c).unwrap();
        let c = SPEED_OF_LIGHT;
        let w_c = 2.0 * core::f64::consts::PI * f_c;
        let n11 = c * c * 1e-10 / 200.0;
        let n12 = -(c * c) * 1e12 * 1e-10 / (w_c * 100.0);
        let n22 = c * c / (w_c * 100.0) * (1.0 / 2e-5 + 2.0 * 1e24 * 1e-10);
        assert!((n.m11 - n11).abs() < 1e-9 * n11.abs());
        assert!((n.m12 - n12).abs() < 1e-9 * n12.abs());
        assert!((n.m22 - n22).abs() < 1e-9 * n22.abs());
        assert!(matches!(
            measurement_noise(0.0, alpha, eta, f_c),
            Err(TrackerError::DomainError)
        ));
    }

    #[test]
    fn huge_noise_keeps_prior() {
        let mut track = TrackState::new([1000.0, 10.0], Sym2::diag(25.0, 4.0), 1.0);
        let before = track.estimate;
        let n = Sym2::diag(1e12, 1e12);
        track.step([5000.0, -50.0], &n, 1.0);
        assert!((track.estimate[0] - (before[0] + before[1])).abs() < 1e-4);
        assert!((track.estimate[1] - before[1]).abs() < 1e-4);
    }

    #[test]
    fn tiny_noise_trusts_measurement() {
        let mut track = TrackState::new([1000.0, 10.0], Sym2::diag(25.0, 4.0), 0.0);
        let n = Sym2::diag(1e-9, 1e-9);
        track.step([1234.0, -5.0], &n, 1.0);
        assert!((track.estimate[0] - 1234.0).abs() < 1e-3);
        assert!((track.estimate[1] + 5.0).abs() < 1e-3);
    }

    #[test]
    fn nis_is_chi_square_consistent() {
        // Matched-model synthetic track: mean NIS over many steps sits near
        // the chi-square mean of 2.
        let mut rng = Stream::derive(33, "kalman-nis");
        let accel_std = 1.0;
        let n = Sym2::diag(9.0, 1.0);
        let dt = 0.1;
        let mut nis_sum = 0.0;
        let mut count = 0usize;
        for _ in 0..50 {
            let mut truth = [rng.uniform(500.0, 1500.0), rng.uniform(-20.0, 20.0)];
            let mut track = TrackState::new(truth, Sym2::diag(100.0, 25.0), accel_std);
            for _ in 0..500 {
                // Evolve truth with the same white-acceleration discretization.
                let a = rng.next_normal() * accel_std;
                truth = [
                    truth[0] + dt * truth[1] + 0.5 * a * dt * dt,
                    truth[1] + a * dt,
                ];
                let z = [
                    truth[0] + rng.next_normal() * 3.0,
                    truth[1] + rng.next_normal() * 1.0,
                ];
                let info = track.step(z, &n, dt);
                nis_sum += info.nis;
                count += 1;
            }
        }
        let mean_nis = nis_sum / count as f64;
        // 3-sigma band for the mean of `count` chi-square(2) variables.
        let bound = 3.0 * math::sqrt(4.0 / count as f64);
        assert!(
            (mean_nis - 2.0).abs() < bound + 0.05,
            "mean NIS {mean_nis} outside band {bound}"
        );
    }

    #[test]
    fn covariance_stays_psd_under_random_steps() {
        let mut rng = Stream::derive(34, "kalman-psd");
        let mut track = TrackState::new([100.0, 0.0], Sym2::diag(1.0, 1.0), 0.5);
        let mut clamped_count = 0;
        for _ in 0..10_000 {
            let n = Sym2::diag(rng.uniform(0.01, 100.0), rng.uniform(0.01, 10.0));
            let z = [rng.uniform(0.0, 2000.0), rng.uniform(-100.0, 100.0)];
            let info = track.step(z, &n, rng.uniform(0.01, 2.0));
            let (lo, _) = track.covariance.eigenvalues();
            assert!(lo >= 0.0);
            if info.clamped {
                clamped_count += 1;
            }
        }
        assert_eq!(clamped_count, 0, "well-conditioned steps should never clamp");
    }

    #[test]
    fn optimal_params_trivia() {
        // Uncorrelated errors want zero chirp.
        let p = Sym2::diag(4.0, 9.0);
        let (alpha, _) = optimal_waveform_params(&p, 3e9).unwrap();
        assert_eq!(alpha, 0.0);
        // Unit substitution: p = I, w_c = 1 -> T* = 1.
        let f_c = 1.0 / (2.0 * core::f64::consts::PI);
        let (_, t) = optimal_waveform_params(&Sym2::diag(1.0, 1.0), f_c).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        // Degenerate covariance is rejected.
        let bad = Sym2 {
            m11: 1.0,
            m12: 1.0,
            m22: 1.0,
        };
        assert!(matches!(
            optimal_waveform_params(&bad, 3e9),
            Err(TrackerError::DegenerateCovariance)
        ));
    }

    #[test]
    fn optimal_params_scale_invariance() {
        // Both closed forms depend only on ratios of covariance entries:
        // alpha* through p12/p11 and T* through p11^2/det, each of which is
        // unchanged by P -> kP. Growing the error uniformly changes nothing
        // about the preferred waveform shape.
        let p = Sym2 {
            m11: 30.0,
            m12: -4.0,
            m22: 2.5,
        };
        let (a1, t1) = optimal_waveform_params(&p, 3e9).unwrap();
        for &k in &[0.1, 2.0, 16.0, 1e4] {
            let (a2, t2) = optimal_waveform_params(&p.scale(k), 3e9).unwrap();
            assert!((a2 - a1).abs() < 1e-9 * a1.abs().max(1.0));
            assert!((t2 - t1).abs() < 1e-9 * t1);
        }
    }

    #[test]
    fn optimal_params_minimize_weighted_information_loss() {
        // Grid-search oracle: the closed forms should minimize
        // tr(P^-1 N(T, alpha)) over the standard second-order CRLB matrix
        // N = (c^2/eta) [[T^2/2, -a T^2/w], [-a T^2/w, (1/(2T^2) + 2 a^2 T^2)/w^2]].
        let mut rng = Stream::derive(35, "grid-oracle");
        let f_c = 3e9;
        let w_c = 2.0 * core::f64::consts::PI * f_c;
        let objective = |p_inv: &Sym2, t: f64, a: f64| -> f64 {
            let n11 = t * t / 2.0;
            let n12 = -a * t * t / w_c;
            let n22 = (1.0 / (2.0 * t * t) + 2.0 * a * a * t * t) / (w_c * w_c);
            p_inv.m11 * n11 + 2.0 * p_inv.m12 * n12 + p_inv.m22 * n22
        };
        for _ in 0..20 {
            // Random positive-definite covariance with meters/meters-per-
            // second scales.
            let l11 = rng.uniform(1.0, 30.0);
            let l21 = rng.uniform(-3.0, 3.0);
            let l22 = rng.uniform(0.5, 8.0);
            let p = Sym2 {
                m11: l11 * l11,
                m12: l11 * l21,
                m22: l21 * l21 + l22 * l22,
            };
            let p_inv = p.inverse().unwrap();
            let (a_star, t_star) = optimal_waveform_params(&p, f_c).unwrap();
            let at_opt = objective(&p_inv, t_star, a_star);
            // The closed form beats (or matches within 5%) every grid point
            // around it.
            for i in -8i32..=8 {
                for j in -8i32..=8 {
                    let t = t_star * math::powf(1.3, i as f64);
                    let a = a_star + (j as f64) * 0.15 * (a_star.abs() + w_c / (4.0 * t * t));
                    let v = objective(&p_inv, t, a);
                    assert!(
                        at_opt <= v * 1.05,
                        "grid point (T={t:e}, a={a:e}) beats closed form: {v} < {at_opt}"
                    );
                }
            }
        }
    }

    #[test]
    fn nearest_waveform_selection() {
        let mk = |id, bw: f64, t: f64| Waveform {
            id,
            center_freq: 50e6,
            bandwidth: bw,
            pulse_duration: t,
            amplitude: 1.0,
        };
        let allowed = [
            mk(0, 10e6, 1e-6),
            mk(1, 40e6, 1e-6),
            mk(2, 80e6, 1e-6),
        ];
        // Exact chirp-rate match goes to that waveform.
        let w = nearest_waveform(40e12, 1e-6, &allowed);
        assert_eq!(w.id, 1);
        // Equidistant request lands on the lowest id.
        let w = nearest_waveform(25e12, 1e-6, &allowed);
        assert_eq!(w.id, 0);
    }

    #[test]
    fn zero_penalty_weight_is_inert() {
        let mk = |id, bw: f64| Waveform {
            id,
            center_freq: 50e6,
            bandwidth: bw,
            pulse_duration: 1e-6,
            amplitude: 1.0,
        };
        let allowed: Vec<_> = (0..5).map(|i| mk(i, 10e6 * (i + 1) as f64)).collect();
        let pen = chirp_rate_penalties(33e12, 0.0, &allowed);
        assert!(pen.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn rmse_values() {
        assert_eq!(rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        let est: Vec<f64> = (0..100).map(|i| i as f64 + 5.0).collect();
        let truth: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!((rmse(&est, &truth) - 5.0).abs() < 1e-12);

        let mut rng = Stream::derive(36, "rmse-mc");
        let n = 10_000;
        let truth: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 1000.0)).collect();
        let est: Vec<f64> = truth.iter().map(|t| t + rng.next_normal() * 3.0).collect();
        let r = rmse(&est, &truth);
        assert!((r - 3.0).abs() / 3.0 < 0.05, "rmse {r}");
    }
}
