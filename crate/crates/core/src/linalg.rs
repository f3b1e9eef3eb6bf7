//! Dense symmetric linear algebra on row-major `Vec<f64>` storage.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{numeric, Result};

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

/// Jitter values tried, in order, after a plain factorization fails.
pub const JITTER_LADDER: [f64; 7] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

impl Cholesky {
    /// Factors a symmetric positive-definite matrix. Returns `None` when a
    /// pivot is not strictly positive.
    pub fn factor(a: &[f64], n: usize) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        // Row-oriented: row i only needs the finished rows above it.
        for i in 0..n {
            let (done, rest) = l.split_at_mut(i * n);
            let row_i = &mut rest[..n];
            for j in 0..i {
                let row_j = &done[j * n..j * n + j];
                let s: f64 = row_i[..j].iter().zip(row_j).map(|(a, b)| a * b).sum();
                row_i[j] = (a[i * n + j] - s) / done[j * n + j];
            }
            let d = a[i * n + i] - row_i[..i].iter().map(|v| v * v).sum::<f64>();
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            row_i[i] = libm::sqrt(d);
        }
        Some(Self { n, l })
    }

    /// Factors `A + jitter·I`, escalating the jitter along [`JITTER_LADDER`]
    /// up to `max_jitter`. Returns the factor and the jitter that succeeded.
    pub fn factor_with_jitter(a: &[f64], n: usize, max_jitter: f64) -> Result<(Self, f64)> {
        if let Some(c) = Self::factor(a, n) {
            return Ok((c, 0.0));
        }
        let mut work = a.to_vec();
        for &jitter in JITTER_LADDER.iter().filter(|&&j| j <= max_jitter) {
            for i in 0..n {
                work[i * n + i] = a[i * n + i] + jitter;
            }
            if let Some(c) = Self::factor(&work, n) {
                return Ok((c, jitter));
            }
        }
        Err(numeric(alloc::format!(
            "matrix of order {n} is not positive definite after jitter {max_jitter:e}"
        )))
    }

    /// Factorization of a positive *semi*-definite matrix: pivots below
    /// `tol` (relative to the largest diagonal entry) zero out their column,
    /// so a rank-deficient covariance still yields `A ≈ L Lᵀ`. Fails only on
    /// pivots that are clearly negative.
    pub fn factor_semidefinite(a: &[f64], n: usize, tol: f64) -> Option<Self> {
        let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let cutoff = tol * scale;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let row_j = j * n;
            let mut d = a[row_j + j];
            for k in 0..j {
                d -= l[row_j + k] * l[row_j + k];
            }
            if !d.is_finite() || d < -cutoff.max(1e-8 * scale) {
                return None;
            }
            if d <= cutoff {
                continue;
            }
            let djj = libm::sqrt(d);
            l[row_j + j] = djj;
            for i in (j + 1)..n {
                let row_i = i * n;
                let mut s = a[row_i + j];
                for k in 0..j {
                    s -= l[row_i + k] * l[row_j + k];
                }
                l[row_i + j] = s / djj;
            }
        }
        Some(Self { n, l })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn factor_entry(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// Solves `L x = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(l, x)| l * x).sum();
            b[i] = (b[i] - s) / self.l[i * n + i];
        }
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_lower_in_place(&mut x);
        self.solve_upper_in_place(&mut x);
        x
    }

    /// `log det A = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        (0..self.n).map(|i| libm::log(self.l[i * self.n + i])).sum::<f64>() * 2.0
    }

    /// Dense `A⁻¹`, row-major.
    pub fn inverse(&self) -> Vec<f64> {
        let n = self.n;
        // Row j of `u` holds column j of L⁻¹, so A⁻¹ = uuᵀ restricted to k ≥ max(i, j).
        let mut u = vec![0.0; n * n];
        for j in 0..n {
            let row = &mut u[j * n..(j + 1) * n];
            row[j] = 1.0 / self.l[j * n + j];
            for i in (j + 1)..n {
                let li = &self.l[i * n + j..i * n + i];
                let s: f64 = li.iter().zip(&row[j..i]).map(|(a, b)| a * b).sum();
                row[i] = -s / self.l[i * n + i];
            }
        }
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = u[i * n + i..(i + 1) * n].iter().zip(&u[j * n + i..(j + 1) * n]).map(|(a, b)| a * b).sum();
                inv[i * n + j] = s;
                inv[j * n + i] = s;
            }
        }
        inv
    }

    /// `L z` for a vector `z`.
    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..=i).map(|k| self.l[i * n + k] * z[k]).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd3() -> Vec<f64> {
        vec![4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0]
    }

    #[test]
    fn factor_reconstructs_matrix() {
        let a = spd3();
        let c = Cholesky::factor(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| c.factor_entry(i, k) * c.factor_entry(j, k)).sum();
                assert!((s - a[i * 3 + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn solve_and_inverse_agree() {
        let a = spd3();
        let c = Cholesky::factor(&a, 3).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = c.solve(&b);
        let inv = c.inverse();
        for i in 0..3 {
            let via_inv: f64 = (0..3).map(|j| inv[i * 3 + j] * b[j]).sum();
            assert!((via_inv - x[i]).abs() < 1e-12);
            let ax: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn log_det_of_diagonal() {
        let a = vec![2.0, 0.0, 0.0, 3.0];
        let c = Cholesky::factor(&a, 2).unwrap();
        assert!((c.log_det() - libm::log(6.0)).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_needs_jitter() {
        let a = vec![1.0, 1.0, 1.0, 1.0];
        assert!(Cholesky::factor(&a, 2).is_none());
        let (_, jitter) = Cholesky::factor_with_jitter(&a, 2, 1e-4).unwrap();
        assert!(jitter > 0.0);
        let neg = vec![-1.0, 0.0, 0.0, -1.0];
        assert!(Cholesky::factor_with_jitter(&neg, 2, 1e-4).is_err());
    }

    #[test]
    fn semidefinite_factor_handles_rank_deficiency() {
        let a = vec![1.0, 1.0, 1.0, 1.0];
        let c = Cholesky::factor_semidefinite(&a, 2, 1e-10).unwrap();
        assert_eq!(c.factor_entry(1, 1), 0.0);
        let zero = vec![0.0; 4];
        let c = Cholesky::factor_semidefinite(&zero, 2, 1e-10).unwrap();
        assert_eq!(c.mul_lower(&[1.0, 1.0]), vec![0.0, 0.0]);
    }
}
