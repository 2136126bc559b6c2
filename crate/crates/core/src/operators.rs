//! Operators on ℂ^d and the two quantum convolutions.
//!
//! `F ⋆ S = (1/d) Σ_z F(z) α_z(S)` maps a grid function and an operator to an
//! operator, and `S ⋆ T (z) = tr(S α_z(Ť))` maps two operators to a grid
//! function, where `α_z(S) = π(z) S π(z)*` and `Ť = P T P` with the parity
//! `P f(x) = f(-x)`. Both are evaluated with FFTs along the diagonals of the
//! matrices in `O(d² log d)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::datasets::DataSet;
use crate::error::{check_dim, QhaError, Result};
use crate::fft::{self, Plans};
use crate::spectral::{self, SpectralDecomposition};
use crate::tf::{grid_convolve, spectrogram, stft, Grid, GridFunction, GridPoint, PhaseGrid, Signal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative Hermiticity defect accepted at construction.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// A d×d complex Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
    hermiticity_defect: f64,
}

impl HermitianOperator {
    /// Symmetrizes `matrix` after checking `max |A - A*| ≤ 1e-10 · ‖A‖_F`.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        check_dim(matrix.nrows(), matrix.ncols())?;
        let defect = max_hermiticity_defect(&matrix);
        let allowed = HERMITICITY_TOL * matrix.norm();
        if defect > allowed {
            return Err(QhaError::NotHermitian { defect, allowed });
        }
        Ok(HermitianOperator::symmetrized(matrix, defect))
    }

    fn symmetrized(matrix: DMatrix<Complex64>, defect: f64) -> Self {
        let adj = matrix.adjoint();
        let matrix = (matrix + adj).scale(0.5);
        HermitianOperator { matrix, hermiticity_defect: defect }
    }

    fn from_exact(matrix: DMatrix<Complex64>) -> Self {
        let defect = max_hermiticity_defect(&matrix);
        HermitianOperator::symmetrized(matrix, defect)
    }

    pub fn identity(d: usize) -> Self {
        HermitianOperator { matrix: DMatrix::identity(d, d), hermiticity_defect: 0.0 }
    }

    pub fn zeros(d: usize) -> Self {
        HermitianOperator { matrix: DMatrix::zeros(d, d), hermiticity_defect: 0.0 }
    }

    /// `f ⊗ f`.
    pub fn rank_one(f: &Signal) -> Self {
        let v = f.values();
        let d = v.len();
        HermitianOperator {
            matrix: DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()),
            hermiticity_defect: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// `max |A - A*|` of the matrix as given, before symmetrization.
    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|v| v.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn scale(&self, c: f64) -> Self {
        HermitianOperator {
            matrix: self.matrix.scale(c),
            hermiticity_defect: self.hermiticity_defect * c.abs(),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(HermitianOperator::from_exact(&self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(HermitianOperator::from_exact(&self.matrix - &other.matrix))
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        check_dim(self.dim(), f.dim())?;
        let v = nalgebra::DVector::from_column_slice(f.values());
        Signal::new((&self.matrix * v).iter().copied().collect())
    }

    /// `⟨Aψ, ψ⟩`.
    pub fn expectation(&self, psi: &Signal) -> Result<f64> {
        Ok(self.apply(psi)?.inner(psi)?.re)
    }

    /// `tr(A²)`.
    pub fn trace_of_square(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `Ǎ = P A P`.
    pub fn reflect(&self) -> Self {
        let d = self.dim();
        HermitianOperator {
            matrix: DMatrix::from_fn(d, d, |i, j| self.matrix[((d - i) % d, (d - j) % d)]),
            hermiticity_defect: self.hermiticity_defect,
        }
    }

    /// Largest entrywise deviation from another operator.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

fn max_hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let mut defect: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

/// `f ⊗ g`, the rank-one map `h ↦ ⟨h, g⟩ f`.
pub fn tensor_product(f: &Signal, g: &Signal) -> Result<DMatrix<Complex64>> {
    check_dim(f.dim(), g.dim())?;
    let (a, b) = (f.values(), g.values());
    Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj()))
}

/// `S = Σᵢ fᵢ ⊗ fᵢ` of a normalized dataset.
pub fn data_operator(data: &DataSet) -> Result<HermitianOperator> {
    if !data.is_normalized() {
        return Err(QhaError::NotNormalized(data.energy()));
    }
    Ok(data_operator_unnormalized(data))
}

/// `Σᵢ fᵢ ⊗ fᵢ` without the normalization check.
pub fn data_operator_unnormalized(data: &DataSet) -> HermitianOperator {
    let d = data.dim();
    let x = DMatrix::from_fn(d, data.len(), |r, c| data.signals()[c].values()[r]);
    HermitianOperator::from_exact(&x * x.adjoint())
}

/// Eigendecomposition with the default relative clamp tolerance.
pub fn spectral_decompose(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    spectral::spectral_decompose(a, spectral::clamp_tolerance_for(a, spectral::DEFAULT_CLAMP))
}

/// `α_z(S) = π(z) S π(z)*`.
pub fn operator_shift(s: &HermitianOperator, z: GridPoint) -> Result<HermitianOperator> {
    let d = s.dim();
    PhaseGrid::new(d)?.check(z)?;
    let m = &s.matrix;
    let matrix = DMatrix::from_fn(d, d, |x, y| {
        let k = (x + d - y) % d;
        let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * ((k * z.n) % d) as f64 / d as f64);
        phase * m[((x + d - z.m) % d, (y + d - z.m) % d)]
    });
    Ok(HermitianOperator { matrix, hermiticity_defect: s.hermiticity_defect })
}

/// `F ⋆ S = (1/d) Σ_z F(z) α_z(S)`.
///
/// Entry `(x, x - k)` of the result is `(1/d) Σ_m K_m(k) S[x-m, x-m-k]` with
/// `K_m(k) = Σ_n F(m, n) e^{2πi kn/d}`, a cyclic convolution in `m` for each
/// diagonal `k`.
pub fn fn_op_convolve(f: &GridFunction, s: &HermitianOperator) -> Result<HermitianOperator> {
    let d = s.dim();
    check_dim(d, f.dim())?;
    let plans = Plans::new(d);

    // kernel[k][m] = K_m(k)
    let mut kernel = vec![vec![ZERO; d]; d];
    let mut row = vec![ZERO; d];
    for m in 0..d {
        for (n, r) in row.iter_mut().enumerate() {
            *r = Complex64::new(f.get(GridPoint::new(m, n)), 0.0);
        }
        plans.inverse.process(&mut row);
        for k in 0..d {
            kernel[k][m] = row[k];
        }
    }

    let scale = 1.0 / d as f64;
    let mut out = DMatrix::from_element(d, d, ZERO);
    let mut diag = vec![ZERO; d];
    for k in 0..d {
        for (u, v) in diag.iter_mut().enumerate() {
            *v = s.matrix[(u, (u + d - k) % d)];
        }
        let conv = fft::cyclic_convolve(&kernel[k], &diag, &plans);
        for x in 0..d {
            out[(x, (x + d - k) % d)] = conv[x] * scale;
        }
    }
    Ok(HermitianOperator::from_exact(out))
}

/// Complex values of `S ⋆ T (z) = tr(S α_z(Ť))`.
///
/// With `c_m(k) = Σ_x S[x-k, x] Ť[x-m, x-m-k]` (a cross-correlation in `x`
/// for each diagonal `k`), `S ⋆ T (m, n) = Σ_k e^{2πi kn/d} c_m(k)`.
pub fn op_op_convolve_complex(s: &HermitianOperator, t: &HermitianOperator) -> Result<Grid<Complex64>> {
    let d = s.dim();
    check_dim(d, t.dim())?;
    let grid = PhaseGrid::new(d)?;
    let plans = Plans::new(d);
    let tc = t.reflect();

    // corr[m][k] = c_m(k)
    let mut corr = vec![vec![ZERO; d]; d];
    let mut a = vec![ZERO; d];
    let mut b = vec![ZERO; d];
    for k in 0..d {
        for x in 0..d {
            a[x] = s.matrix[((x + d - k) % d, x)];
            b[x] = tc.matrix[(x, (x + d - k) % d)];
        }
        let c = fft::cyclic_correlate(&a, &b, &plans);
        for m in 0..d {
            corr[m][k] = c[m];
        }
    }
    let mut values = Vec::with_capacity(d * d);
    for mut row in corr {
        plans.inverse.process(&mut row);
        values.extend_from_slice(&row);
    }
    Grid::new(grid, values)
}

/// `S ⋆ T (z) = tr(S α_z(Ť))`, real for Hermitian `S`, `T`.
pub fn op_op_convolve(s: &HermitianOperator, t: &HermitianOperator) -> Result<GridFunction> {
    Ok(op_op_convolve_complex(s, t)?.map(|v| v.re))
}

/// Relative spectral cut used by [`total_correlation`] by default.
pub const DEFAULT_RANK_CUT: f64 = 1e-10;

/// Truncated ranks up to this size use pairwise spectrograms.
const PAIRWISE_RANK: usize = 3;

/// Total correlation `S̃ = S ⋆ Š = Σ_{k,l} λ_k λ_l |V_{h_k} h_l|²`.
///
/// Eigenvalues below `rank_cut · λ₁` are dropped. Small truncated ranks are
/// summed pairwise; larger ones go through [`op_op_convolve`] on the
/// truncated operator.
pub fn total_correlation(s: &HermitianOperator, rank_cut: f64) -> Result<GridFunction> {
    let spec = spectral_decompose(s)?;
    let l1 = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if l1 <= 0.0 {
        return Err(QhaError::NotPositive { eigenvalue: l1, tolerance: 0.0 });
    }
    let kept = spec.eigenvalues.iter().take_while(|&&l| l > rank_cut * l1 && l > 0.0).count();
    total_correlation_from_spectrum(&spec, kept)
}

/// [`total_correlation`] from an existing decomposition, keeping the top `rank` terms.
pub fn total_correlation_from_spectrum(spec: &SpectralDecomposition, rank: usize) -> Result<GridFunction> {
    let d = spec.dim();
    let grid = PhaseGrid::new(d)?;
    let rank = rank.min(d);
    if rank <= PAIRWISE_RANK {
        let vectors: Vec<Signal> = (0..rank).map(|k| spec.eigenvector(k)).collect();
        let mut acc = vec![0.0; d * d];
        for k in 0..rank {
            for l in 0..rank {
                let w = spec.eigenvalues[k] * spec.eigenvalues[l];
                for (a, v) in acc.iter_mut().zip(spectrogram(&vectors[l], &vectors[k])?.values()) {
                    *a += w * v;
                }
            }
        }
        return Grid::new(grid, acc);
    }
    let truncated = DMatrix::from_fn(d, d, |i, j| {
        (0..rank)
            .map(|k| spec.eigenvectors[(i, k)] * spec.eigenvectors[(j, k)].conj() * spec.eigenvalues[k])
            .sum::<Complex64>()
    });
    let t = HermitianOperator::from_exact(truncated);
    op_op_convolve(&t, &t.reflect())
}

/// Cohen class distribution `Q_S(f) = Š ⋆ (f ⊗ f)`.
pub fn cohen_class(s: &HermitianOperator, f: &Signal) -> Result<GridFunction> {
    check_dim(s.dim(), f.dim())?;
    op_op_convolve(&s.reflect(), &HermitianOperator::rank_one(f))
}

/// Both sides of the first-layer identity `F⁰ ∗ m = [m ⋆ (f⊗f)] ⋆ (ǧ⊗ǧ)`
/// with `F⁰ = |V_g f|²`.
#[derive(Clone, Debug)]
pub struct ConvLayerIdentity {
    pub lhs: GridFunction,
    pub rhs: GridFunction,
    pub max_abs_diff: f64,
}

/// Evaluates the spectrogram-then-convolve route and the operator route.
pub fn conv_layer_identity(f: &Signal, g: &Signal, m: &GridFunction) -> Result<ConvLayerIdentity> {
    check_dim(f.dim(), g.dim())?;
    check_dim(f.dim(), m.dim())?;
    let lhs = grid_convolve(&spectrogram(f, g)?, m)?;
    let mixed = fn_op_convolve(m, &HermitianOperator::rank_one(f))?;
    let rhs = op_op_convolve(&mixed, &HermitianOperator::rank_one(&g.reflect()))?;
    let max_abs_diff = lhs.max_abs_diff(&rhs)?;
    Ok(ConvLayerIdentity { lhs, rhs, max_abs_diff })
}

/// `Σᵢ |V_{fᵢ} f|²` for a dataset, the Cohen class of its data operator.
pub fn dataset_cohen_class(data: &DataSet, f: &Signal) -> Result<GridFunction> {
    let d = f.dim();
    let grid = PhaseGrid::new(d)?;
    let mut acc = vec![0.0; d * d];
    for fi in data.signals() {
        for (a, v) in acc.iter_mut().zip(stft(f, fi)?.values()) {
            *a += v.norm_sqr();
        }
    }
    Grid::new(grid, acc)
}
