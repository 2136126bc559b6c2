//! Time-frequency primitives on the finite phase space ℤ_d × ℤ_d.
//!
//! A signal is a vector in ℂ^d indexed cyclically. The phase space is the
//! d×d torus of time lags `m` and frequencies `n`; each cell carries measure
//! `1/d`, so the whole torus has measure `d` and a cell `(m, n)` sits at the
//! continuous coordinate `(m/√d, n/√d)`. With this normalization Moyal's
//! identity, the trace formulas for operator convolutions and the
//! Berezin-Lieb inequalities hold exactly rather than approximately.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, QhaError, Result};
use crate::fft::{self, Plans};

/// A length-d complex vector: a data point or a window.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(QhaError::InvalidParameter {
                name: "values",
                reason: "a signal needs at least one sample".into(),
            });
        }
        Ok(Signal { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Signal::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(d: usize) -> Self {
        Signal {
            values: vec![Complex64::new(0.0, 0.0); d.max(1)],
        }
    }

    /// Unit impulse at sample `k`.
    pub fn delta(d: usize, k: usize) -> Self {
        let mut s = Signal::zeros(d);
        let d = s.dim();
        s.values[k % d] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩ = Σ self(x)·conj(other(x))`, linear in the first slot.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Signal> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(QhaError::Degenerate("cannot normalize a zero signal".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Parity: `P f(x) = f(-x mod d)`.
    pub fn reflect(&self) -> Signal {
        let d = self.dim();
        Signal {
            values: (0..d).map(|x| self.values[(d - x) % d]).collect(),
        }
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        check_dim(self.dim(), other.dim())?;
        Ok(Signal {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// A point of the phase grid: time lag `m` and frequency `n`, both in `0..d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub m: usize,
    pub n: usize,
}

impl GridPoint {
    pub const ORIGIN: GridPoint = GridPoint { m: 0, n: 0 };

    pub fn new(m: usize, n: usize) -> Self {
        GridPoint { m, n }
    }
}

/// The d×d phase-space torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseGrid {
    d: usize,
}

impl PhaseGrid {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(QhaError::InvalidParameter {
                name: "d",
                reason: "dimension must be positive".into(),
            });
        }
        Ok(PhaseGrid { d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn cell_count(&self) -> usize {
        self.d * self.d
    }

    pub fn cell_measure(&self) -> f64 {
        1.0 / self.d as f64
    }

    /// Side length of one cell in phase units, `1/√d`.
    pub fn cell_side(&self) -> f64 {
        1.0 / (self.d as f64).sqrt()
    }

    /// Side length of the whole torus in phase units, `√d`.
    pub fn side(&self) -> f64 {
        (self.d as f64).sqrt()
    }

    pub fn total_measure(&self) -> f64 {
        self.d as f64
    }

    pub fn contains(&self, z: GridPoint) -> bool {
        z.m < self.d && z.n < self.d
    }

    pub fn check(&self, z: GridPoint) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(QhaError::InvalidGridPoint { m: z.m, n: z.n, d: self.d })
        }
    }

    /// Representative of index `k` in `(-d/2, d/2]`.
    pub fn centered_index(&self, k: usize) -> i64 {
        let d = self.d as i64;
        let k = (k % self.d) as i64;
        if 2 * k > d {
            k - d
        } else {
            k
        }
    }

    /// Wraps a signed index onto `0..d`.
    pub fn wrap(&self, k: i64) -> usize {
        k.rem_euclid(self.d as i64) as usize
    }

    /// Phase-space coordinate `(m/√d, n/√d)` of a grid point.
    pub fn coordinate(&self, z: GridPoint) -> (f64, f64) {
        let s = self.cell_side();
        (z.m as f64 * s, z.n as f64 * s)
    }

    /// Coordinate of the cyclic representative closest to the origin.
    pub fn centered_coordinate(&self, z: GridPoint) -> (f64, f64) {
        let s = self.cell_side();
        (self.centered_index(z.m) as f64 * s, self.centered_index(z.n) as f64 * s)
    }

    /// Minimal cyclic Euclidean distance of `z` to the origin, in phase units.
    pub fn cyclic_norm(&self, z: GridPoint) -> f64 {
        let (t, xi) = self.centered_coordinate(z);
        t.hypot(xi)
    }

    pub fn add(&self, a: GridPoint, b: GridPoint) -> GridPoint {
        GridPoint::new((a.m + b.m) % self.d, (a.n + b.n) % self.d)
    }

    pub fn sub(&self, a: GridPoint, b: GridPoint) -> GridPoint {
        GridPoint::new((a.m + self.d - b.m % self.d) % self.d, (a.n + self.d - b.n % self.d) % self.d)
    }

    pub fn neg(&self, a: GridPoint) -> GridPoint {
        self.sub(GridPoint::ORIGIN, a)
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> {
        let d = self.d;
        (0..d).flat_map(move |m| (0..d).map(move |n| GridPoint::new(m, n)))
    }
}

/// A function on the phase grid, stored row-major with index `m * d + n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    grid: PhaseGrid,
    values: Vec<T>,
}

/// Real-valued grid function (densities, spectrograms, masks).
pub type GridFunction = Grid<f64>;
/// Complex-valued grid function (short-time Fourier transforms).
pub type ComplexGridFunction = Grid<Complex64>;

impl<T: Copy> Grid<T> {
    pub fn new(grid: PhaseGrid, values: Vec<T>) -> Result<Self> {
        check_dim(grid.cell_count(), values.len())?;
        Ok(Grid { grid, values })
    }

    pub fn from_fn(grid: PhaseGrid, mut f: impl FnMut(GridPoint) -> T) -> Self {
        let values = grid.points().map(&mut f).collect();
        Grid { grid, values }
    }

    pub fn constant(grid: PhaseGrid, value: T) -> Self {
        Grid {
            grid,
            values: vec![value; grid.cell_count()],
        }
    }

    pub fn phase_grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.d
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, z: GridPoint) -> T {
        self.values[(z.m % self.grid.d) * self.grid.d + z.n % self.grid.d]
    }

    pub fn set(&mut self, z: GridPoint, value: T) {
        let d = self.grid.d;
        self.values[(z.m % d) * d + z.n % d] = value;
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Grid<U> {
        Grid {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `F̌(z) = F(-z)`.
    pub fn reflect(&self) -> Grid<T> {
        let g = self.grid;
        Grid::from_fn(g, |z| self.get(g.neg(z)))
    }

    /// `z ↦ F(z - shift)`.
    pub fn translate(&self, shift: GridPoint) -> Grid<T> {
        let g = self.grid;
        Grid::from_fn(g, |z| self.get(g.sub(z, shift)))
    }
}

impl Grid<f64> {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// First grid point where the maximum is attained.
    pub fn argmax(&self) -> GridPoint {
        let d = self.grid.d;
        let (idx, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        GridPoint::new(idx / d, idx % d)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| v * c)
    }

    /// `max |F - G|` over the grid.
    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `Σ_z |F(z)|` times the cell measure.
    pub fn l1_norm(&self) -> f64 {
        self.grid.cell_measure() * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }
}

impl Grid<Complex64> {
    pub fn norm_sqr(&self) -> GridFunction {
        self.map(|v| v.norm_sqr())
    }

    pub fn integrate(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_measure()
    }
}

/// `∫ F dz`, realized as `cell_measure · Σ F`.
pub fn grid_integrate(f: &GridFunction) -> f64 {
    f.phase_grid().cell_measure() * f.sum()
}

/// Cyclic convolution of grid functions, `(F ∗ G)(z) = ∫ F(z') G(z - z') dz'`.
pub fn grid_convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    check_dim(f.dim(), g.dim())?;
    let grid = f.phase_grid();
    let mut out = fft::cyclic_convolve2(f.values(), g.values(), grid.d);
    let w = grid.cell_measure();
    out.iter_mut().for_each(|v| *v *= w);
    Grid::new(grid, out)
}

/// Time-frequency shift `π(z) f(x) = e^{2πi x n/d} f(x - m)`.
pub fn tf_shift(f: &Signal, z: GridPoint) -> Result<Signal> {
    let d = f.dim();
    let grid = PhaseGrid::new(d)?;
    grid.check(z)?;
    let values = (0..d)
        .map(|x| {
            let phase = TAU * ((x * z.n) % d) as f64 / d as f64;
            Complex64::from_polar(1.0, phase) * f.values[(x + d - z.m) % d]
        })
        .collect();
    Ok(Signal { values })
}

/// Short-time Fourier transform `V_g f(m, n) = Σ_x f(x) conj(g(x-m)) e^{-2πi x n/d}`,
/// computed as one length-d DFT per time lag.
pub fn stft(f: &Signal, g: &Signal) -> Result<ComplexGridFunction> {
    let d = f.dim();
    check_dim(d, g.dim())?;
    let grid = PhaseGrid::new(d)?;
    let plans = Plans::new(d);
    let mut values = Vec::with_capacity(d * d);
    let mut row = vec![Complex64::new(0.0, 0.0); d];
    for m in 0..d {
        for (x, r) in row.iter_mut().enumerate() {
            *r = f.values[x] * g.values[(x + d - m) % d].conj();
        }
        plans.forward.process(&mut row);
        values.extend_from_slice(&row);
    }
    Grid::new(grid, values)
}

/// Spectrogram `|V_g f|²`.
pub fn spectrogram(f: &Signal, g: &Signal) -> Result<GridFunction> {
    Ok(stft(f, g)?.norm_sqr())
}

fn check_window_dim(d: usize) -> Result<()> {
    if d < 4 {
        return Err(QhaError::InvalidParameter {
            name: "d",
            reason: format!("window dimension must be at least 4, got {d}"),
        });
    }
    Ok(())
}

/// Sample position of index `j`: `x = (j - d/2)/√d`.
fn sample_position(j: usize, d: usize) -> f64 {
    (j as f64 - d as f64 / 2.0) / (d as f64).sqrt()
}

/// Unit-norm periodized samples of `2^{1/4} e^{-πx²}`, centered at `d/2`.
pub fn gaussian_window(d: usize) -> Result<Signal> {
    check_window_dim(d)?;
    let period = (d as f64).sqrt();
    let values: Vec<f64> = (0..d)
        .map(|j| {
            let x = sample_position(j, d);
            (-3..=3)
                .map(|k| {
                    let y = x + k as f64 * period;
                    2f64.powf(0.25) * (-PI * y * y).exp()
                })
                .sum()
        })
        .collect();
    Signal::from_real(&values)?.normalized()
}

/// Sampled Hermite functions of orders `0..count`, re-orthonormalized.
///
/// Order `k` is `H_k(√(2π) x) e^{-πx²}` sampled like [`gaussian_window`]; each
/// sample vector is Gram-Schmidt orthogonalized (twice) against the lower
/// orders, so the returned family is orthonormal to round-off.
pub fn hermite_basis(d: usize, count: usize) -> Result<Vec<Signal>> {
    check_window_dim(d)?;
    if count > d {
        return Err(QhaError::InvalidParameter {
            name: "n",
            reason: format!("Hermite order must be below d = {d}"),
        });
    }
    let t: Vec<f64> = (0..d).map(|j| (2.0 * PI).sqrt() * sample_position(j, d)).collect();
    let mut prev: Vec<f64> = vec![0.0; d];
    let mut cur: Vec<f64> = t.iter().map(|&t| PI.powf(-0.25) * (-t * t / 2.0).exp()).collect();
    let mut basis: Vec<Signal> = Vec::with_capacity(count);
    for k in 0..count {
        if k > 0 {
            // φ_{k} = √(2/k) t φ_{k-1} - √((k-1)/k) φ_{k-2}
            let a = (2.0 / k as f64).sqrt();
            let b = ((k - 1) as f64 / k as f64).sqrt();
            let next: Vec<f64> = (0..d).map(|j| a * t[j] * cur[j] - b * prev[j]).collect();
            prev = std::mem::replace(&mut cur, next);
        }
        let mut v = Signal::from_real(&cur)?;
        let original = v.norm();
        for _ in 0..2 {
            for h in &basis {
                let c = v.inner(h)?;
                v = v.add(&h.scaled(-c))?;
            }
        }
        let residual = v.norm();
        if residual.is_nan() || residual <= 1e-10 * original.max(f64::MIN_POSITIVE) {
            return Err(QhaError::Degenerate(format!(
                "sampled Hermite function of order {k} is numerically dependent on lower orders at d = {d}"
            )));
        }
        basis.push(v.normalized()?);
    }
    Ok(basis)
}

/// Sampled, re-orthonormalized Hermite function of order `n`.
pub fn hermite(d: usize, n: usize) -> Result<Signal> {
    if n >= d {
        return Err(QhaError::InvalidParameter {
            name: "n",
            reason: format!("Hermite order {n} must be below d = {d}"),
        });
    }
    let mut basis = hermite_basis(d, n + 1)?;
    Ok(basis.pop().expect("basis has n + 1 elements"))
}
