//! Extreme eigenvalues of `k x k` GUE matrices.
//!
//! The eigenvalue density is `∝ prod_{i<j} |ξ_i - ξ_j|^2 prod_j exp(-ξ_j^2 / 2)`,
//! which the β = 2 tridiagonal model reproduces with `N(0,1)` diagonal entries
//! and off-diagonal entries `χ_{2m} / √2` (`m = k-1, ..., 1` from the top).
//! Eigenvalues come from Sturm-count bisection, so each sample costs
//! `O(k log(1/tol))` instead of a dense `O(k^3)` solve.

use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Absolute tolerance of the bisection eigensolver.
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalMatrix {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::Dimension("tridiagonal matrix needs k >= 1".into()));
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::Dimension(format!(
                "k = {} needs {} off-diagonal entries, got {}",
                diagonal.len(),
                diagonal.len() - 1,
                off_diagonal.len()
            )));
        }
        if off_diagonal.iter().any(|&e| !(e >= 0.0)) || diagonal.iter().any(|d| !d.is_finite()) {
            return Err(Error::Parameter("off-diagonal entries must be finite and nonnegative".into()));
        }
        Ok(Self { diagonal, off_diagonal })
    }

    pub fn k(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of the
    /// `LDL^T` factorisation of `T - x I`).
    pub fn sturm_count(&self, x: f64) -> usize {
        // a zero pivot is perturbed to a tiny negative value and counted as such
        let guard = |q: f64| if q.abs() < f64::MIN_POSITIVE { -f64::MIN_POSITIVE } else { q };
        let mut q = guard(self.diagonal[0] - x);
        let mut count = usize::from(q < 0.0);
        for (d, e) in self.diagonal[1..].iter().zip(&self.off_diagonal) {
            q = guard((d - x) - e * e / q);
            count += usize::from(q < 0.0);
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let k = self.k();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..k {
            let left = if i > 0 { self.off_diagonal[i - 1] } else { 0.0 };
            let right = if i + 1 < k { self.off_diagonal[i] } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }

    /// Eigenvalue number `index` in ascending order (0-based).
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.k());
        let (mut lo, mut hi) = self.gershgorin();
        lo -= EIGEN_TOL;
        hi += EIGEN_TOL;
        // invariant: count(lo) <= index < count(hi)
        while hi - lo > EIGEN_TOL * 0.5 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn extreme_eigenvalues(&self) -> EigenSample {
        let k = self.k();
        EigenSample { k, lambda_max: self.eigenvalue(k - 1), lambda_min: self.eigenvalue(0), spectrum: None }
    }

    /// Full ascending spectrum.
    pub fn spectrum(&self) -> EigenSample {
        let spectrum: Vec<f64> = (0..self.k()).map(|i| self.eigenvalue(i)).collect();
        EigenSample { k: self.k(), lambda_max: spectrum[self.k() - 1], lambda_min: spectrum[0], spectrum: Some(spectrum) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSample {
    pub k: usize,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub spectrum: Option<Vec<f64>>,
}

/// Extreme eigenvalues by Sturm bisection inside the Gershgorin interval.
pub fn extreme_eigenvalues(t: &TridiagonalMatrix) -> EigenSample {
    t.extreme_eigenvalues()
}

/// One draw of the β = 2 tridiagonal model for `k x k` GUE.
pub fn sample_gue_tridiagonal(k: usize, stream: &mut RngStream) -> Result<TridiagonalMatrix> {
    if k == 0 {
        return Err(Error::Parameter("GUE dimension must be at least 1".into()));
    }
    let diagonal: Vec<f64> = (0..k).map(|_| StandardNormal.sample(stream)).collect();
    let off_diagonal = (1..k)
        .rev()
        .map(|m| {
            // χ_{2m}^2 / 2 ~ Gamma(m, 1)
            let g = Gamma::new(m as f64, 1.0).map_err(|e| Error::Parameter(e.to_string()))?;
            Ok(g.sample(stream).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    TridiagonalMatrix::new(diagonal, off_diagonal)
}

/// `n_samples` iid extreme-eigenvalue draws; sample `i` uses `stream.fork(i)`.
pub fn gue_extreme_samples(k: usize, n_samples: usize, stream: &RngStream) -> Result<Vec<EigenSample>> {
    (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut s = stream.fork(i as u64);
            Ok(sample_gue_tridiagonal(k, &mut s)?.extreme_eigenvalues())
        })
        .collect()
}

/// `n_samples` iid draws of `λ_max`.
pub fn gue_lambda_max_samples(k: usize, n_samples: usize, stream: &RngStream) -> Result<Vec<f64>> {
    Ok(gue_extreme_samples(k, n_samples, stream)?.into_iter().map(|e| e.lambda_max).collect())
}

/// Edge scaling `(λ_max - 2√k) k^{1/6}`.
pub fn scale_edge(lambda_max: f64, k: usize) -> f64 {
    let kf = k as f64;
    (lambda_max - 2.0 * kf.sqrt()) * kf.powf(1.0 / 6.0)
}

/// `n_samples` iid draws of `(λ_max - 2√k) k^{1/6}`.
pub fn scaled_edge_sample(k: usize, n_samples: usize, stream: &RngStream) -> Result<Vec<f64>> {
    Ok(gue_lambda_max_samples(k, n_samples, stream)?.into_iter().map(|l| scale_edge(l, k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let t = TridiagonalMatrix::new(vec![3.0, -1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let e = t.extreme_eigenvalues();
        assert!((e.lambda_max - 3.0).abs() < 1e-10);
        assert!((e.lambda_min + 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_by_two_closed_form() {
        let t = TridiagonalMatrix::new(vec![0.0, 0.0], vec![1.7]).unwrap();
        let e = t.extreme_eigenvalues();
        assert!((e.lambda_max - 1.7).abs() < 1e-10);
        assert!((e.lambda_min + 1.7).abs() < 1e-10);
    }

    #[test]
    fn one_by_one() {
        let t = TridiagonalMatrix::new(vec![0.25], vec![]).unwrap();
        let e = t.spectrum();
        assert!((e.lambda_max - 0.25).abs() < 1e-10);
        assert_eq!(e.spectrum.unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TridiagonalMatrix::new(vec![], vec![]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, 2.0], vec![-0.5]).is_err());
        assert!(sample_gue_tridiagonal(0, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn sturm_count_brackets() {
        let t = TridiagonalMatrix::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        assert_eq!(t.sturm_count(-2.0), 0);
        assert_eq!(t.sturm_count(0.0), 1);
        assert_eq!(t.sturm_count(2.0), 2);
    }

    #[test]
    fn spectrum_sorted_and_trace_preserved() {
        let mut s = RngStream::new(3, 3);
        for k in [2, 5, 17] {
            let t = sample_gue_tridiagonal(k, &mut s).unwrap();
            let spec = t.spectrum().spectrum.unwrap();
            assert!(spec.windows(2).all(|w| w[0] <= w[1]));
            let tr: f64 = t.diagonal().iter().sum();
            assert!((spec.iter().sum::<f64>() - tr).abs() < 1e-8 * k as f64);
        }
    }

    #[test]
    fn k_one_reduction() {
        let s = RngStream::new(9, 0);
        let xs = scaled_edge_sample(1, 10_000, &s).unwrap();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((m + 2.0).abs() < 0.02, "{m}");
    }

    #[test]
    fn samples_independent_of_thread_count() {
        let s = RngStream::new(5, 1);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| gue_lambda_max_samples(6, 200, &s).unwrap());
        let b = four.install(|| gue_lambda_max_samples(6, 200, &s).unwrap());
        assert_eq!(a, b);
    }
}
