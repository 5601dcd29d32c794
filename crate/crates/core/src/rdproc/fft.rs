//! Minimal complex arithmetic and FFT support for the CPI processor.
//!
//! Radix-2 iterative Cooley-Tukey for power-of-two lengths, with a naive
//! DFT fallback so non-power-of-two slow-time lengths (e.g. 400-pulse CPIs)
//! still work, just slower.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Complex sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cpx {
    pub re: f64,
    pub im: f64,
}

impl Cpx {
    pub const ZERO: Cpx = Cpx { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// `e^{j theta}`.
    pub fn cis(theta: f64) -> Self {
        Self {
            re: math::cos(theta),
            im: math::sin(theta),
        }
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        math::hypot(self.re, self.im)
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            re: self.re * k,
            im: self.im * k,
        }
    }
}

impl core::ops::Add for Cpx {
    type Output = Cpx;
    fn add(self, o: Cpx) -> Cpx {
        Cpx::new(self.re + o.re, self.im + o.im)
    }
}

impl core::ops::AddAssign for Cpx {
    fn add_assign(&mut self, o: Cpx) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl core::ops::Sub for Cpx {
    type Output = Cpx;
    fn sub(self, o: Cpx) -> Cpx {
        Cpx::new(self.re - o.re, self.im - o.im)
    }
}

impl core::ops::Mul for Cpx {
    type Output = Cpx;
    fn mul(self, o: Cpx) -> Cpx {
        Cpx::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// In-place forward FFT (no normalization). Length must be a power of two.
pub fn fft(data: &mut [Cpx]) {
    transform(data, false);
}

/// In-place inverse FFT with 1/N normalization. Power-of-two length.
pub fn ifft(data: &mut [Cpx]) {
    transform(data, true);
    let k = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v = v.scale(k);
    }
}

fn transform(data: &mut [Cpx], inverse: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            data.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let angle = sign * 2.0 * core::f64::consts::PI / len as f64;
        let w_len = Cpx::cis(angle);
        let mut start = 0;
        while start < n {
            let mut w = Cpx::new(1.0, 0.0);
            for k in 0..len / 2 {
                let a = data[start + k];
                let b = data[start + k + len / 2] * w;
                data[start + k] = a + b;
                data[start + k + len / 2] = a - b;
                w = w * w_len;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// Forward DFT of arbitrary length (naive O(n^2)); matches [`fft`] on
/// power-of-two input.
pub fn dft(input: &[Cpx]) -> Vec<Cpx> {
    let n = input.len();
    let mut out = vec![Cpx::ZERO; n];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = Cpx::ZERO;
        for (m, &x) in input.iter().enumerate() {
            let theta = -2.0 * core::f64::consts::PI * (k * m % n) as f64 / n as f64;
            acc += x * Cpx::cis(theta);
        }
        *o = acc;
    }
    out
}

/// Smallest power of two >= `n`.
pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_of_impulse_is_flat() {
        let mut x = vec![Cpx::ZERO; 16];
        x[0] = Cpx::new(1.0, 0.0);
        fft(&mut x);
        for v in &x {
            assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn fft_ifft_roundtrip() {
        let mut rng = crate::rng::Stream::derive(8, "fft");
        let orig: Vec<Cpx> = (0..256)
            .map(|_| Cpx::new(rng.next_normal(), rng.next_normal()))
            .collect();
        let mut x = orig.clone();
        fft(&mut x);
        ifft(&mut x);
        for (a, b) in orig.iter().zip(&x) {
            assert!((a.re - b.re).abs() < 1e-10 && (a.im - b.im).abs() < 1e-10);
        }
    }

    #[test]
    fn fft_matches_naive_dft() {
        let mut rng = crate::rng::Stream::derive(9, "fft-dft");
        let input: Vec<Cpx> = (0..64)
            .map(|_| Cpx::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect();
        let mut fast = input.clone();
        fft(&mut fast);
        let slow = dft(&input);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a.re - b.re).abs() < 1e-9 && (a.im - b.im).abs() < 1e-9);
        }
    }

    #[test]
    fn parseval_holds() {
        let mut rng = crate::rng::Stream::derive(10, "fft-parseval");
        let input: Vec<Cpx> = (0..128)
            .map(|_| Cpx::new(rng.next_normal(), rng.next_normal()))
            .collect();
        let time_energy: f64 = input.iter().map(|v| v.norm_sq()).sum();
        let mut x = input;
        fft(&mut x);
        let freq_energy: f64 = x.iter().map(|v| v.norm_sq()).sum::<f64>() / x.len() as f64;
        assert!((time_energy - freq_energy).abs() < 1e-9 * time_energy);
    }
}
