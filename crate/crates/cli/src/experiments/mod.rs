//! The experiment catalog. Each runner returns a table, a report and an
//! optional SVG; writing files is left to the caller.

mod alc;
pub mod bounds;
mod chirps;
mod hermite;
mod local;
mod maps;

pub use bounds::BoundsRow;

use qha::augmentation::{make_rect_domain, normalized_augmentation, Domain};
use qha::metrics::von_neumann_entropy;
use qha::operators::HermitianOperator;
use qha::tf::{GridFunction, PhaseGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::report::Report;
use crate::table::{Cell, ResultTable};

pub struct ExperimentOutput {
    pub table: ResultTable,
    pub report: Report,
    pub svg: Option<String>,
}

type Runner = fn(&ExperimentConfig) -> Result<ExperimentOutput>;

pub const CATALOG: &[(&str, Runner)] = &[
    ("hermite_interp", hermite::interp),
    ("chirp_ed", chirps::effective_dimension),
    ("chirp_totalcorr", maps::chirp_total_correlation),
    ("gauss_alc", alc::gauss_alc),
    ("chirp_alc", alc::chirp_alc),
    ("alc_vs_ed", alc::alc_vs_ed),
    ("local_components", local::local_components),
    ("hermite_mix", hermite::mix),
    ("tf_weighted", maps::tf_weighted),
    ("cohen_demo", maps::cohen_demo),
    ("bounds_suite", bounds::bounds_suite),
    ("alc_scan", alc::alc_scan),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|(name, _)| *name)
}

pub fn runner(name: &str) -> Result<Runner> {
    CATALOG
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, r)| *r)
        .ok_or_else(|| CliError::UnknownExperiment(name.to_string()))
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `H_vN((χ_Ω/|Ω|) ⋆ S)`.
pub(crate) fn augmented_entropy(domain: &Domain, s: &HermitianOperator) -> Result<f64> {
    Ok(von_neumann_entropy(&normalized_augmentation(domain, s)?)?)
}

/// Centred rectangle of the given phase-space size.
pub(crate) fn centered_rect(grid: PhaseGrid, width: f64, height: f64) -> Result<Domain> {
    Ok(make_rect_domain(grid, width, height, (0.0, 0.0))?)
}

/// Rectangles of roughly equal area and differing aspect.
pub(crate) const SHAPES: [(&str, f64, f64); 3] = [("square", 2.45, 2.45), ("tall", 1.49, 4.0), ("wide", 4.0, 1.49)];

/// Standard deviations of `F` along time and frequency, about its argmax.
pub(crate) fn axis_spreads(f: &GridFunction) -> (f64, f64) {
    let grid = f.phase_grid();
    let w = grid.cell_measure();
    let s = grid.cell_side();
    let c = f.argmax();
    let (mut mt, mut mf, mut st, mut sf, mut mass) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for z in grid.points() {
        let p = w * f.get(z);
        let r = grid.sub(z, c);
        let t = grid.centered_index(r.m) as f64 * s;
        let xi = grid.centered_index(r.n) as f64 * s;
        mass += p;
        mt += p * t;
        mf += p * xi;
        st += p * t * t;
        sf += p * xi * xi;
    }
    let (mt, mf) = (mt / mass, mf / mass);
    ((st / mass - mt * mt).max(0.0).sqrt(), (sf / mass - mf * mf).max(0.0).sqrt())
}

/// Index of the shape whose aspect ratio is closest, on a log scale, to the
/// time/frequency spread ratio.
pub(crate) fn adapted_shape(spread_t: f64, spread_f: f64) -> usize {
    let target = (spread_t / spread_f).ln();
    let mut best = 0;
    let mut gap = f64::INFINITY;
    for (i, (_, w, h)) in SHAPES.iter().enumerate() {
        let g = ((w / h).ln() - target).abs();
        if g < gap {
            gap = g;
            best = i;
        }
    }
    best
}

/// Long-format table of a grid function in centred coordinates.
pub(crate) fn grid_table(f: &GridFunction, value: &str) -> Result<ResultTable> {
    let grid = f.phase_grid();
    let mut t = ResultTable::new(["m", "n", "t", "xi", value]);
    for z in grid.points() {
        let (x, y) = grid.centered_coordinate(z);
        t.push(vec![z.m.into(), z.n.into(), x.into(), y.into(), f.get(z).into()])?;
    }
    Ok(t)
}

pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

pub(crate) fn cells(values: impl IntoIterator<Item = f64>) -> Vec<Cell> {
    values.into_iter().map(Cell::from).collect()
}
