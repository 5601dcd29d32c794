//! Small dense linear algebra for the low-dimensional models used here
//! (context dimension d is 3 in the standard pipeline, and the tracker is
//! 2-state). Matrices are row-major `Vec<f64>` of length `d * d`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Rank-one update `self += x xᵀ`.
    pub fn add_outer(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                self[(i, j)] += x[i] * x[j];
            }
        }
    }

    /// `self += scale * I`.
    pub fn add_scaled_identity(&mut self, scale: f64) {
        for i in 0..self.dim {
            self[(i, i)] += scale;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// Solve `self * x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot falls below `1e-12` times the largest
    /// absolute entry (treated as singular).
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.dim;
        debug_assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x: Vec<f64> = b.to_vec();
        let scale = self
            .data
            .iter()
            .fold(0.0f64, |acc, &v| if math::abs(v) > acc { math::abs(v) } else { acc })
            .max(1.0);
        let tol = 1e-12 * scale;

        for col in 0..n {
            let mut piv = col;
            let mut best = math::abs(a[col * n + col]);
            for r in (col + 1)..n {
                let v = math::abs(a[r * n + col]);
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= tol {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(col * n + c, piv * n + c);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in (col + 1)..n {
                let f = a[r * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                x[r] -= f * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut v = x[col];
            for c in (col + 1)..n {
                v -= a[col * n + c] * x[c];
            }
            x[col] = v / a[col * n + col];
        }
        Some(x)
    }

    /// Cholesky factor `L` with `self = L Lᵀ`; `None` if not positive
    /// definite.
    pub fn cholesky(&self) -> Option<SquareMatrix> {
        let n = self.dim;
        let mut l = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if sum <= 0.0 {
                        return None;
                    }
                    l[(i, j)] = math::sqrt(sum);
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Some(l)
    }

    /// Solve `Lᵀ x = b` where `self` is lower triangular.
    pub fn solve_transposed_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let v = x[j] * self[(j, i)];
                x[i] -= v;
            }
            x[i] /= self[(i, i)];
        }
        x
    }
}

impl core::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Symmetric 2×2 matrix, used by the tracker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 {
        m11: 0.0,
        m12: 0.0,
        m22: 0.0,
    };

    pub fn diag(m11: f64, m22: f64) -> Self {
        Self { m11, m12: 0.0, m22 }
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn add(&self, other: &Sym2) -> Sym2 {
        Sym2 {
            m11: self.m11 + other.m11,
            m12: self.m12 + other.m12,
            m22: self.m22 + other.m22,
        }
    }

    pub fn scale(&self, k: f64) -> Sym2 {
        Sym2 {
            m11: self.m11 * k,
            m12: self.m12 * k,
            m22: self.m22 * k,
        }
    }

    /// Inverse; `None` if singular.
    pub fn inverse(&self) -> Option<Sym2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Sym2 {
            m11: self.m22 / d,
            m12: -self.m12 / d,
            m22: self.m11 / d,
        })
    }

    /// Eigenvalues, smaller first (always real: symmetric).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.trace();
        let half_diff = 0.5 * (self.m11 - self.m22);
        let disc = math::sqrt(half_diff * half_diff + self.m12 * self.m12);
        (mean - disc, mean + disc)
    }

    pub fn matvec(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.m11 * x[0] + self.m12 * x[1],
            self.m12 * x[0] + self.m22 * x[1],
        ]
    }

    /// Quadratic form `xᵀ self x`.
    pub fn quad_form(&self, x: [f64; 2]) -> f64 {
        self.m11 * x[0] * x[0] + 2.0 * self.m12 * x[0] * x[1] + self.m22 * x[1] * x[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_matches_hand_inverse() {
        let m = SquareMatrix::from_rows(&[&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let x = m.solve(&[0.5, 0.0, 0.0]).unwrap();
        assert_eq!(x, alloc::vec![0.25, 0.0, 0.0]);
    }

    #[test]
    fn solve_detects_singular() {
        let m = SquareMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(m.solve(&[1.0, 2.0]).is_none());
    }

    #[test]
    fn cholesky_roundtrip() {
        let mut m = SquareMatrix::identity(3);
        m.add_outer(&[0.3, -0.2, 0.9]);
        m.add_outer(&[1.1, 0.4, 0.0]);
        let l = m.cholesky().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                for k in 0..3 {
                    v += l[(i, k)] * l[(j, k)];
                }
                assert!((v - m[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sym2_eigen_and_inverse() {
        let p = Sym2 {
            m11: 4.0,
            m12: 1.0,
            m22: 2.0,
        };
        let (lo, hi) = p.eigenvalues();
        assert!(lo > 0.0 && hi > lo);
        let inv = p.inverse().unwrap();
        let id = Sym2 {
            m11: p.m11 * inv.m11 + p.m12 * inv.m12,
            m12: p.m11 * inv.m12 + p.m12 * inv.m22,
            m22: p.m12 * inv.m12 + p.m22 * inv.m22,
        };
        assert!((id.m11 - 1.0).abs() < 1e-12);
        assert!(id.m12.abs() < 1e-12);
        assert!((id.m22 - 1.0).abs() < 1e-12);
    }
}
