#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use qha::augmentation::Domain;
use qha::datasets::{normalize_dataset, DataSet};
use qha::operators::HermitianOperator;
use qha::tf::{Grid, GridFunction, GridPoint, PhaseGrid, Signal};
use qha::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_signal<R: Rng>(d: usize, rng: &mut R) -> Signal {
    Signal::new(
        (0..d)
            .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect(),
    )
    .unwrap()
}

pub fn random_unit<R: Rng>(d: usize, rng: &mut R) -> Signal {
    random_signal(d, rng).normalized().unwrap()
}

pub fn random_dataset<R: Rng>(n: usize, d: usize, rng: &mut R) -> DataSet {
    let raw = DataSet::new((0..n).map(|_| random_signal(d, rng)).collect(), "random").unwrap();
    normalize_dataset(&raw).unwrap()
}

/// A random state of random rank `1..=max_rank`.
pub fn random_state<R: Rng>(d: usize, max_rank: usize, rng: &mut R) -> HermitianOperator {
    let n = rng.random_range(1..=max_rank.max(1));
    qha::operators::data_operator(&random_dataset(n, d, rng)).unwrap()
}

pub fn random_grid_fn<R: Rng>(d: usize, rng: &mut R) -> GridFunction {
    Grid::from_fn(PhaseGrid::new(d).unwrap(), |_| rng.random::<f64>())
}

/// A random nonempty cell rectangle, not the full torus.
pub fn random_domain<R: Rng>(d: usize, rng: &mut R) -> Domain {
    let grid = PhaseGrid::new(d).unwrap();
    let cm = rng.random_range(1..d);
    let cn = rng.random_range(1..d);
    let center = GridPoint::new(rng.random_range(0..d), rng.random_range(0..d));
    Domain::cell_rect(grid, cm, cn, center).unwrap()
}

/// A random mask with roughly the given fill fraction, never empty.
pub fn random_mask_domain<R: Rng>(d: usize, fill: f64, rng: &mut R) -> Domain {
    let grid = PhaseGrid::new(d).unwrap();
    let mut mask: Vec<bool> = (0..d * d).map(|_| rng.random::<f64>() < fill).collect();
    mask[rng.random_range(0..d * d)] = true;
    Domain::from_mask(grid, mask).unwrap()
}

fn e(num: usize, d: usize) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (num % d) as f64 / d as f64)
}

/// `π(z) f` straight from the definition.
pub fn shift_direct(f: &Signal, z: GridPoint) -> Signal {
    let d = f.dim();
    let v = f.values();
    Signal::new((0..d).map(|x| e(x * z.n, d) * v[(x + d - z.m) % d]).collect()).unwrap()
}

/// `V_g f(m, n)` by a double loop.
pub fn stft_direct(f: &Signal, g: &Signal) -> Vec<Complex64> {
    let d = f.dim();
    let (fv, gv) = (f.values(), g.values());
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let s: Complex64 = (0..d)
                .map(|x| fv[x] * gv[(x + d - m) % d].conj() * e(x * n, d).conj())
                .sum();
            out.push(s);
        }
    }
    out
}

/// `π(z) S π(z)*` as a product of matrices.
pub fn shift_operator_direct(s: &DMatrix<Complex64>, z: GridPoint) -> DMatrix<Complex64> {
    let d = s.nrows();
    let pi = DMatrix::from_fn(d, d, |x, y| if (x + d - z.m) % d == y { e(x * z.n, d) } else { c(0.0, 0.0) });
    &pi * s * pi.adjoint()
}

/// `(1/d) Σ_z F(z) α_z(S)` term by term.
pub fn fn_op_direct(f: &GridFunction, s: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = s.nrows();
    let mut acc = DMatrix::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            let z = GridPoint::new(m, n);
            acc += shift_operator_direct(s, z) * c(f.get(z) / d as f64, 0.0);
        }
    }
    acc
}

pub fn parity(d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |x, y| if (d - y) % d == x { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// `tr(S α_z(P T P))` for every z.
pub fn op_op_direct(s: &DMatrix<Complex64>, t: &DMatrix<Complex64>) -> Vec<Complex64> {
    let d = s.nrows();
    let p = parity(d);
    let tc = &p * t * &p;
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            out.push((s * shift_operator_direct(&tc, GridPoint::new(m, n))).trace());
        }
    }
    out
}

/// `Σ_{i,j} |V_{f_i} f_j|²` by direct STFTs.
pub fn total_correlation_direct(data: &DataSet) -> Vec<f64> {
    let d = data.dim();
    let mut acc = vec![0.0; d * d];
    for fi in data.signals() {
        for fj in data.signals() {
            for (a, v) in acc.iter_mut().zip(stft_direct(fj, fi)) {
                *a += v.norm_sqr();
            }
        }
    }
    acc
}

/// `(1/|Ω|)(1/d) Σ_{z∈Ω} (1 - (1/d) Σ_{z'∈Ω-z} S̃(z'))` by a double loop.
pub fn alc_direct(tc: &GridFunction, domain: &Domain) -> f64 {
    let grid = tc.phase_grid();
    let d = grid.dim() as f64;
    let mut total = 0.0;
    for z in domain.points() {
        let inner: f64 = domain.points().map(|w| tc.get(grid.sub(w, z))).sum::<f64>() / d;
        total += 1.0 - inner;
    }
    total / d / domain.measure()
}

/// `(F ∗ G)(z) = (1/d) Σ_{z'} F(z') G(z - z')` by a double loop.
pub fn grid_convolve_direct(f: &GridFunction, g: &GridFunction) -> GridFunction {
    let grid = f.phase_grid();
    let d = grid.dim() as f64;
    Grid::from_fn(grid, |z| grid.points().map(|w| f.get(w) * g.get(grid.sub(z, w))).sum::<f64>() / d)
}

pub fn max_abs(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Singular values of a square complex matrix, descending.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
