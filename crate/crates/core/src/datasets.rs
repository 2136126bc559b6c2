//! Dataset container and the generators for the example families.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, QhaError, Result};
use crate::operators::HermitianOperator;
use crate::tf::{gaussian_window, tf_shift, GridPoint, PhaseGrid, Signal};

/// Tolerance on `Σ‖fᵢ‖² = 1` for a dataset to count as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A finite collection of signals of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSet {
    signals: Vec<Signal>,
    pub seed: Option<u64>,
    pub label: String,
}

impl DataSet {
    pub fn new(signals: Vec<Signal>, label: impl Into<String>) -> Result<Self> {
        let first = signals.first().ok_or(QhaError::EmptyDataset)?;
        let d = first.dim();
        for s in &signals {
            check_dim(d, s.dim())?;
        }
        Ok(DataSet { signals, seed: None, label: label.into() })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn dim(&self) -> usize {
        self.signals[0].dim()
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn into_signals(self) -> Vec<Signal> {
        self.signals
    }

    /// `Σᵢ ‖fᵢ‖²`.
    pub fn energy(&self) -> f64 {
        self.signals.iter().map(Signal::norm_sqr).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.energy() - 1.0).abs() <= NORMALIZATION_TOL
    }
}

/// Rescales the dataset so that `Σᵢ ‖fᵢ‖² = 1`.
pub fn normalize_dataset(data: &DataSet) -> Result<DataSet> {
    let energy = data.energy();
    if energy == 0.0 || !energy.is_finite() {
        return Err(QhaError::ZeroEnergy);
    }
    let c = Complex64::new(energy.sqrt().recip(), 0.0);
    Ok(DataSet {
        signals: data.signals.iter().map(|s| s.scaled(c)).collect(),
        seed: data.seed,
        label: data.label.clone(),
    })
}

/// Parameters of one generated chirp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chirp {
    /// Starting frequency in bins (cycles per signal length).
    pub base_frequency: f64,
    /// Frequency sweep over the signal length, in bins.
    pub rate: f64,
    /// Cyclic rotation of the envelope, in samples.
    pub rotation: usize,
}

/// Base-frequency distribution of [`gen_chirps`]: a normal law truncated to
/// `[low, high]` by rejection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseFrequency {
    pub mean: f64,
    pub std_dev: f64,
    pub low: f64,
    pub high: f64,
}

impl Default for BaseFrequency {
    fn default() -> Self {
        BaseFrequency { mean: 50.0, std_dev: 10.0, low: 30.0, high: 65.0 }
    }
}

pub const DEFAULT_CHIRP_RATE: (f64, f64) = (0.0, 20.0);

/// Bartlett-Hann window of length `len`.
pub fn bartlett_hann(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let l = (len - 1) as f64;
    (0..len)
        .map(|j| {
            let x = j as f64 / l;
            0.62 - 0.48 * (x - 0.5).abs() - 0.38 * (TAU * x).cos()
        })
        .collect()
}

/// One windowed analytic chirp `w(j - rot) · exp(2πi(f₀t + r t²/2))`, `t = j/d`.
pub fn chirp_signal(d: usize, chirp: &Chirp) -> Result<Signal> {
    let window = bartlett_hann(d);
    let values = (0..d)
        .map(|j| {
            let t = j as f64 / d as f64;
            let phase = TAU * (chirp.base_frequency * t + 0.5 * chirp.rate * t * t);
            Complex64::from_polar(window[(j + d - chirp.rotation % d) % d], phase)
        })
        .collect();
    Signal::new(values)
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(QhaError::InvalidParameter { name: "N", reason: "need at least one signal".into() });
    }
    Ok(())
}

fn check_range(name: &'static str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(QhaError::InvalidParameter { name, reason: format!("[{lo}, {hi}] is not a valid range") });
    }
    Ok(())
}

/// Draws `n` chirps and returns them with their parameters.
pub fn gen_chirps_detailed<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    base: BaseFrequency,
    rate_range: (f64, f64),
    rng: &mut R,
) -> Result<(DataSet, Vec<Chirp>)> {
    check_count(n)?;
    check_range("rate_range", rate_range)?;
    check_range("base_frequency", (base.low, base.high))?;
    if d < 2 {
        return Err(QhaError::InvalidParameter { name: "d", reason: "chirps need d >= 2".into() });
    }
    let normal = Normal::new(base.mean, base.std_dev).map_err(|e| QhaError::InvalidParameter {
        name: "base_frequency",
        reason: e.to_string(),
    })?;
    let mut chirps = Vec::with_capacity(n);
    for _ in 0..n {
        let mut f0 = normal.sample(rng);
        let mut tries = 0;
        while !(base.low..=base.high).contains(&f0) {
            tries += 1;
            if tries > 10_000 {
                return Err(QhaError::InvalidParameter {
                    name: "base_frequency",
                    reason: "truncation interval has negligible probability".into(),
                });
            }
            f0 = normal.sample(rng);
        }
        let rate = if rate_range.0 == rate_range.1 { rate_range.0 } else { rng.random_range(rate_range.0..rate_range.1) };
        let rotation = rng.random_range(0..d);
        chirps.push(Chirp { base_frequency: f0, rate, rotation });
    }
    let signals = chirps.iter().map(|c| chirp_signal(d, c)).collect::<Result<Vec<_>>>()?;
    let data = normalize_dataset(&DataSet::new(signals, format!("chirps(n={n}, d={d})"))?)?;
    Ok((data, chirps))
}

/// Normalized dataset of `n` windowed chirps with the default base-frequency law.
pub fn gen_chirps<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R, rate_range: (f64, f64)) -> Result<DataSet> {
    Ok(gen_chirps_detailed(n, d, BaseFrequency::default(), rate_range, rng)?.0)
}

/// `S_t = (1 - t) g⊗g + t h⊗h` for unit vectors `g`, `h`.
pub fn gen_hermite_pair_state(t: f64, g: &Signal, h: &Signal) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&t) {
        return Err(QhaError::InvalidParameter { name: "t", reason: format!("{t} is outside [0, 1]") });
    }
    check_dim(g.dim(), h.dim())?;
    for s in [g, h] {
        if (s.norm_sqr() - 1.0).abs() > NORMALIZATION_TOL {
            return Err(QhaError::NotNormalized(s.norm_sqr()));
        }
    }
    let a = HermitianOperator::rank_one(g).scale(1.0 - t);
    let b = HermitianOperator::rank_one(h).scale(t);
    a.add(&b)
}

/// A dataset of noisy shifted Gaussians together with the shifts used.
#[derive(Clone, Debug)]
pub struct LocalComponents {
    pub data: DataSet,
    pub positions: Vec<GridPoint>,
}

/// Grid points whose centered coordinates lie in the closed square of side
/// `spread` (phase units) around the origin.
pub fn cells_in_square(grid: PhaseGrid, spread: f64) -> Vec<GridPoint> {
    let half = 0.5 * spread.max(0.0) * grid.side();
    let r = (half + 1e-9).floor() as i64;
    let r = r.min((grid.dim() as i64 - 1) / 2);
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            out.push(GridPoint::new(grid.wrap(a), grid.wrap(b)));
        }
    }
    out
}

fn random_complex_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    (0..d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// `fᵢ = √(1 - e) π(zᵢ)g + f̃ᵢ` at the given shifts, with `f̃ᵢ ⟂ π(zᵢ)g` of energy `e`.
pub fn gen_local_components_at<R: Rng + ?Sized>(
    positions: &[GridPoint],
    g: &Signal,
    noise_energy: f64,
    rng: &mut R,
) -> Result<DataSet> {
    if !(0.0..1.0).contains(&noise_energy) {
        return Err(QhaError::InvalidParameter {
            name: "noise_energy",
            reason: format!("{noise_energy} is outside [0, 1)"),
        });
    }
    check_count(positions.len())?;
    let g = g.normalized()?;
    let c = Complex64::new((1.0 - noise_energy).sqrt(), 0.0);
    let mut signals = Vec::with_capacity(positions.len());
    for &z in positions {
        let atom = tf_shift(&g, z)?;
        let mut f = atom.scaled(c);
        if noise_energy > 0.0 {
            let mut noise = Signal::new(random_complex_vector(g.dim(), rng))?;
            for _ in 0..2 {
                let p = noise.inner(&atom)?;
                noise = noise.add(&atom.scaled(-p))?;
            }
            let noise = noise.normalized()?.scaled(Complex64::new(noise_energy.sqrt(), 0.0));
            f = f.add(&noise)?;
        }
        signals.push(f);
    }
    let n = signals.len();
    normalize_dataset(&DataSet::new(signals, format!("local_components(n={n}, noise={noise_energy})"))?)
}

/// `n` local components with the Gaussian window and shifts drawn uniformly
/// from the cells of a square of side `spread` around the origin.
pub fn gen_local_components<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    noise_energy: f64,
    spread: f64,
    rng: &mut R,
) -> Result<LocalComponents> {
    check_count(n)?;
    let grid = PhaseGrid::new(d)?;
    let g = gaussian_window(d)?;
    let cells = cells_in_square(grid, spread);
    let positions: Vec<GridPoint> = (0..n).map(|_| cells[rng.random_range(0..cells.len())]).collect();
    let data = gen_local_components_at(&positions, &g, noise_energy, rng)?;
    Ok(LocalComponents { data, positions })
}

/// The radial weight `sin(2πr) / (1 + r)²`.
pub fn default_tf_weight(t: f64, xi: f64) -> f64 {
    let r = t.hypot(xi);
    (TAU * r).sin() / (1.0 + r).powi(2)
}

/// Integer points `(a, b)` of phase space that fit on the torus, i.e. with
/// `|a|, |b| < √d / 2`, and the grid cells nearest to them.
pub fn integer_lattice(grid: PhaseGrid) -> Vec<((i64, i64), GridPoint)> {
    let side = grid.side();
    let r = ((side / 2.0) - 1e-9).ceil() as i64 - 1;
    let r = r.max(0);
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let m = grid.wrap((a as f64 * side).round() as i64);
            let n = grid.wrap((b as f64 * side).round() as i64);
            out.push(((a, b), GridPoint::new(m, n)));
        }
    }
    out
}

/// `fᵢ = Σ_λ cᵢ_λ w(λ) π(λ)g` over the integer lattice with `cᵢ_λ ~ U[0, 1)`.
pub fn gen_random_tf_weighted<R, W>(n: usize, d: usize, weight_fn: W, rng: &mut R) -> Result<DataSet>
where
    R: Rng + ?Sized,
    W: Fn(f64, f64) -> f64,
{
    check_count(n)?;
    let grid = PhaseGrid::new(d)?;
    let g = gaussian_window(d)?;
    let atoms: Vec<(f64, Signal)> = integer_lattice(grid)
        .into_iter()
        .map(|((a, b), z)| Ok((weight_fn(a as f64, b as f64), tf_shift(&g, z)?)))
        .collect::<Result<_>>()?;
    let mut signals = Vec::with_capacity(n);
    for _ in 0..n {
        let mut f = vec![Complex64::new(0.0, 0.0); d];
        for (w, atom) in &atoms {
            let c: f64 = rng.random();
            if *w == 0.0 {
                continue;
            }
            for (x, v) in f.iter_mut().zip(atom.values()) {
                *x += v * (c * w);
            }
        }
        signals.push(Signal::new(f)?);
    }
    normalize_dataset(&DataSet::new(signals, format!("tf_weighted(n={n}, d={d})"))?)
}

/// Cells whose centered coordinates lie in the closed rectangle
/// `[-w/2, w/2] × [-h/2, h/2]` (phase units).
pub fn cells_in_rect(grid: PhaseGrid, width: f64, height: f64) -> Vec<GridPoint> {
    let d = grid.dim();
    let s = grid.side();
    let rm = ((0.5 * width * s + 1e-9).floor() as i64).min((d as i64 - 1) / 2);
    let rn = ((0.5 * height * s + 1e-9).floor() as i64).min((d as i64 - 1) / 2);
    let mut out = Vec::new();
    for a in -rm..=rm {
        for b in -rn..=rn {
            out.push(GridPoint::new(grid.wrap(a), grid.wrap(b)));
        }
    }
    out
}

/// `fᵢ = Σ_l c_l π(λ_l)g` with `n_atoms` shifts drawn uniformly from the grid
/// cells inside the centered rectangle `M = width × height` and complex
/// Gaussian coefficients.
pub fn gen_gaussian_combos<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    m_rect: (f64, f64),
    n_atoms: usize,
    rng: &mut R,
) -> Result<DataSet> {
    check_count(n)?;
    if n_atoms == 0 {
        return Err(QhaError::InvalidParameter { name: "n_atoms", reason: "need at least one atom".into() });
    }
    let (w, h) = m_rect;
    if !(w >= 0.0 && h >= 0.0) {
        return Err(QhaError::InvalidParameter { name: "M", reason: format!("{w} x {h} is not a rectangle") });
    }
    let grid = PhaseGrid::new(d)?;
    let g = gaussian_window(d)?;
    let cells = cells_in_rect(grid, w, h);
    if cells.is_empty() {
        return Err(QhaError::EmptyDomain);
    }
    let mut signals = Vec::with_capacity(n);
    for _ in 0..n {
        let mut f = Signal::zeros(d);
        for _ in 0..n_atoms {
            let z = cells[rng.random_range(0..cells.len())];
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            f = f.add(&tf_shift(&g, z)?.scaled(Complex64::new(re, im)))?;
        }
        signals.push(f);
    }
    normalize_dataset(&DataSet::new(signals, format!("gaussian_combos(n={n}, d={d}, M={w}x{h})"))?)
}
