//! Hermitian eigendecomposition with a reproducible ordering and phase.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{QhaError, Result};
use crate::operators::HermitianOperator;
use crate::tf::Signal;

/// Relative clamp tolerance used when none is given: eigenvalues in
/// `[-1e-10·‖A‖, 0)` are treated as round-off and set to zero.
pub const DEFAULT_CLAMP: f64 = 1e-10;

/// Eigenvalues closer than this are treated as degenerate when ordering.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: DMatrix<Complex64>,
    pub clamp_tolerance: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Signal {
        Signal::new(self.eigenvectors.column(k).iter().copied().collect())
            .expect("eigenvector columns are nonempty")
    }

    /// `Σ_k λ_k h_k ⊗ h_k`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, k| {
            self.eigenvectors[(i, k)] * self.eigenvalues[k]
        });
        &scaled * self.eigenvectors.adjoint()
    }

    /// Number of eigenvalues strictly above `threshold`.
    pub fn rank_above(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > threshold).count()
    }
}

/// Absolute clamp tolerance `rel · max(‖A‖_F, 1e-300)`.
pub fn clamp_tolerance_for(a: &HermitianOperator, rel: f64) -> f64 {
    rel * a.frobenius_norm().max(1e-300)
}

fn clamp(values: &mut [f64], tol: f64) -> Result<()> {
    for v in values.iter_mut() {
        if *v < -tol {
            return Err(QhaError::NotPositive { eigenvalue: *v, tolerance: tol });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

fn sort_descending(values: &mut [f64]) {
    values.sort_by(|a, b| b.total_cmp(a));
}

/// Eigenvalues only, sorted descending and clamped at `clamp_tolerance`
/// (absolute). Operators with an eigenvalue below `-clamp_tolerance` are
/// rejected as non-positive; pass `f64::INFINITY` to skip both steps.
pub fn eigenvalues(a: &HermitianOperator, clamp_tolerance: f64) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = a.matrix().symmetric_eigenvalues().iter().copied().collect();
    sort_descending(&mut values);
    if clamp_tolerance.is_finite() {
        clamp(&mut values, clamp_tolerance)?;
    }
    Ok(values)
}

/// Full decomposition of a positive operator.
///
/// Eigenvectors are phase-fixed so their first largest-modulus component is
/// real and positive. Within a cluster of eigenvalues spanning less than
/// [`DEGENERACY_GAP`], vectors are ordered by the index of that component
/// while the eigenvalues remain sorted.
pub fn spectral_decompose(a: &HermitianOperator, clamp_tolerance: f64) -> Result<SpectralDecomposition> {
    let d = a.dim();
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, 1000 * d.max(10))
        .ok_or(QhaError::NoConvergence)?;

    let mut pivots = Vec::with_capacity(d);
    let mut vectors = eig.eigenvectors;
    for k in 0..d {
        let mut col = vectors.column_mut(k);
        let (mut best, mut best_mod) = (0, -1.0);
        for (i, v) in col.iter().enumerate() {
            if v.norm() > best_mod * (1.0 + 1e-9) {
                best = i;
                best_mod = v.norm();
            }
        }
        let phase = col[best].conj() / col[best].norm();
        col.iter_mut().for_each(|v| *v *= phase);
        col[best] = Complex64::new(col[best].re, 0.0);
        pivots.push(best);
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    // Within a cluster the values stay sorted and the vectors are reordered by pivot index.
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eigenvalues[start] - eigenvalues[end] < DEGENERACY_GAP {
            end += 1;
        }
        order[start..end].sort_by_key(|&i| pivots[i]);
        start = end;
    }

    if clamp_tolerance.is_finite() {
        clamp(&mut eigenvalues, clamp_tolerance)?;
    }
    let eigenvectors = DMatrix::from_fn(d, d, |r, c| vectors[(r, order[c])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors, clamp_tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scaled_identity() {
        let a = HermitianOperator::identity(6).scale(1.0 / 6.0);
        let s = spectral_decompose(&a, 1e-12).unwrap();
        for l in &s.eigenvalues {
            assert_abs_diff_eq!(*l, 1.0 / 6.0, epsilon = 1e-15);
        }
        // Degenerate spectrum: ties are broken by pivot index, so the basis is the standard one.
        for k in 0..6 {
            assert_abs_diff_eq!(s.eigenvectors[(k, k)].re, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        let a = HermitianOperator::new(m).unwrap();
        assert!(matches!(spectral_decompose(&a, 1e-10), Err(QhaError::NotPositive { .. })));
        assert!(matches!(eigenvalues(&a, 1e-10), Err(QhaError::NotPositive { .. })));
    }

    #[test]
    fn tiny_negative_is_clamped() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::new(-1e-13, 0.0);
        let a = HermitianOperator::new(m).unwrap();
        assert_eq!(eigenvalues(&a, 1e-10).unwrap(), vec![1.0, 0.0]);
    }
}
