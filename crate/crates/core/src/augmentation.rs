//! Phase-space domains and augmentation of data by time-frequency shifts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::datasets::DataSet;
use crate::error::{check_dim, QhaError, Result};
use crate::operators::{fn_op_convolve, HermitianOperator};
use crate::spectral;
use crate::tf::{tf_shift, Grid, GridFunction, GridPoint, PhaseGrid};

/// Tolerance on `tr S = 1` for inputs that must be states.
pub const TRACE_TOL: f64 = 1e-8;

/// Augmentations larger than this many signals are refused by default.
pub const DEFAULT_MAX_AUGMENTED: usize = 1 << 20;

/// How a domain was constructed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum DomainDescriptor {
    /// Axis-aligned rectangle in phase units; `width` runs along time.
    Rect { width: f64, height: f64, center: (f64, f64), d: usize },
    /// Axis-aligned block of whole cells.
    CellRect { cells_m: usize, cells_n: usize, center: GridPoint, d: usize },
    Full { d: usize },
    Mask { d: usize },
}

/// A set of cells of the phase grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    grid: PhaseGrid,
    mask: Vec<bool>,
    cells: usize,
    descriptor: DomainDescriptor,
}

/// Half-open run of integers `[ceil(a), ceil(b))` covering cell centers in `[a, b)`.
fn index_run(center: f64, length: f64) -> (i64, i64) {
    let a = center - 0.5 * length;
    let b = center + 0.5 * length;
    ((a - 1e-9).ceil() as i64, (b - 1e-9).ceil() as i64)
}

impl Domain {
    pub fn from_mask(grid: PhaseGrid, mask: Vec<bool>) -> Result<Self> {
        check_dim(grid.cell_count(), mask.len())?;
        let d = grid.dim();
        Ok(Domain::build(grid, mask, DomainDescriptor::Mask { d }))
    }

    fn build(grid: PhaseGrid, mask: Vec<bool>, descriptor: DomainDescriptor) -> Self {
        let cells = mask.iter().filter(|&&b| b).count();
        Domain { grid, mask, cells, descriptor }
    }

    /// The whole torus.
    pub fn full(grid: PhaseGrid) -> Self {
        let d = grid.dim();
        Domain::build(grid, vec![true; grid.cell_count()], DomainDescriptor::Full { d })
    }

    /// A single cell.
    pub fn cell(grid: PhaseGrid, z: GridPoint) -> Result<Self> {
        Domain::cell_rect(grid, 1, 1, z)
    }

    /// `cells_m × cells_n` block of cells starting `⌊cells/2⌋` before `center`.
    pub fn cell_rect(grid: PhaseGrid, cells_m: usize, cells_n: usize, center: GridPoint) -> Result<Self> {
        grid.check(center)?;
        let d = grid.dim();
        if cells_m > d || cells_n > d {
            return Err(QhaError::DomainTooLarge(format!("{cells_m} x {cells_n} cells on a {d} x {d} grid")));
        }
        let mut mask = vec![false; grid.cell_count()];
        for i in 0..cells_m {
            let m = grid.wrap(center.m as i64 - (cells_m / 2) as i64 + i as i64);
            for j in 0..cells_n {
                let n = grid.wrap(center.n as i64 - (cells_n / 2) as i64 + j as i64);
                mask[m * d + n] = true;
            }
        }
        Ok(Domain::build(grid, mask, DomainDescriptor::CellRect { cells_m, cells_n, center, d }))
    }

    pub fn phase_grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn descriptor(&self) -> &DomainDescriptor {
        &self.descriptor
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, z: GridPoint) -> bool {
        let d = self.grid.dim();
        self.mask[(z.m % d) * d + z.n % d]
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    /// `|Ω| = cells / d`.
    pub fn measure(&self) -> f64 {
        self.cells as f64 / self.grid.dim() as f64
    }

    /// `A_Ω = ⌈|Ω|⌉`, computed in integers.
    pub fn ceil_measure(&self) -> usize {
        self.cells.div_ceil(self.grid.dim())
    }

    /// Number of cyclic 4-neighbour cell pairs with exactly one cell inside.
    pub fn boundary_edges(&self) -> usize {
        let d = self.grid.dim();
        let mut edges = 0;
        for m in 0..d {
            for n in 0..d {
                let here = self.mask[m * d + n];
                if here != self.mask[((m + 1) % d) * d + n] {
                    edges += 1;
                }
                if here != self.mask[m * d + (n + 1) % d] {
                    edges += 1;
                }
            }
        }
        edges
    }

    /// `|∂Ω|` = boundary edges × cell side.
    pub fn perimeter(&self) -> f64 {
        self.boundary_edges() as f64 * self.grid.cell_side()
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        self.grid.points().filter(move |&z| self.contains(z))
    }

    /// `χ_Ω`.
    pub fn indicator(&self) -> GridFunction {
        Grid::new(self.grid, self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
            .expect("mask matches the grid")
    }

    /// `χ_Ω / |Ω|`, a probability density.
    pub fn density(&self) -> Result<GridFunction> {
        if self.cells == 0 {
            return Err(QhaError::EmptyDomain);
        }
        Ok(self.indicator().scale(1.0 / self.measure()))
    }

    /// Same shape with lengths multiplied by `factor`; only for phase-unit rectangles.
    pub fn scaled(&self, factor: f64) -> Result<Domain> {
        match self.descriptor {
            DomainDescriptor::Rect { width, height, center, .. } => {
                make_rect_domain(self.grid, width * factor, height * factor, center)
            }
            _ => Err(QhaError::InvalidParameter {
                name: "domain",
                reason: "only rectangles given in phase units can be rescaled".into(),
            }),
        }
    }
}

/// Cells whose centers lie in the `width × height` rectangle (phase units)
/// centered at `center`, embedded cyclically in the torus.
pub fn make_rect_domain(grid: PhaseGrid, width: f64, height: f64, center: (f64, f64)) -> Result<Domain> {
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(QhaError::InvalidParameter {
            name: "width/height",
            reason: format!("{width} x {height} is not a positive rectangle"),
        });
    }
    let d = grid.dim();
    let s = grid.side();
    let (lm, ln) = (width * s, height * s);
    if lm > d as f64 + 1e-9 || ln > d as f64 + 1e-9 {
        return Err(QhaError::DomainTooLarge(format!(
            "{width} x {height} exceeds the torus side {s:.4}"
        )));
    }
    let (m0, m1) = index_run(center.0 * s, lm);
    let (n0, n1) = index_run(center.1 * s, ln);
    let mut mask = vec![false; grid.cell_count()];
    for a in m0..m1.min(m0 + d as i64) {
        let m = grid.wrap(a);
        for b in n0..n1.min(n0 + d as i64) {
            mask[m * d + grid.wrap(b)] = true;
        }
    }
    let domain = Domain::build(grid, mask, DomainDescriptor::Rect { width, height, center, d });
    if domain.cells == 0 {
        return Err(QhaError::EmptyDomain);
    }
    Ok(domain)
}

fn check_state(s: &HermitianOperator) -> Result<()> {
    let tr = s.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(QhaError::TraceNotOne(tr));
    }
    Ok(())
}

/// `χ_Ω ⋆ S = (1/d) Σ_{z∈Ω} α_z(S)` for a state `S`.
pub fn mixed_state_localization(domain: &Domain, s: &HermitianOperator) -> Result<HermitianOperator> {
    check_dim(domain.grid.dim(), s.dim())?;
    if domain.cells == 0 {
        return Err(QhaError::EmptyDomain);
    }
    check_state(s)?;
    fn_op_convolve(&domain.indicator(), s)
}

/// `(χ_Ω / |Ω|) ⋆ S`, the data operator of the Ω-augmented dataset.
pub fn normalized_augmentation(domain: &Domain, s: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(mixed_state_localization(domain, s)?.scale(1.0 / domain.measure()))
}

/// The rank-`A_Ω` projection onto the top eigenvectors of `χ_Ω ⋆ S`.
#[derive(Clone, Debug)]
pub struct FiniteRankApprox {
    pub t_omega: HermitianOperator,
    pub a_omega: usize,
    /// Eigenvalues of `χ_Ω ⋆ S`, descending.
    pub eigenvalues: Vec<f64>,
    /// `‖χ_Ω ⋆ S - T_Ω‖₁`, from the spectrum of the difference.
    pub trace_norm_error: f64,
}

impl FiniteRankApprox {
    /// `Σ_{k≤A}(1 - λ_k) + Σ_{k>A} λ_k`.
    pub fn closed_form_error(&self) -> f64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| if k < self.a_omega { 1.0 - l } else { l })
            .sum()
    }
}

/// Builds `T_Ω` and its trace-norm distance to the augmentation.
pub fn finite_rank_approx(domain: &Domain, s: &HermitianOperator) -> Result<FiniteRankApprox> {
    let loc = mixed_state_localization(domain, s)?;
    let spec = crate::operators::spectral_decompose(&loc)?;
    let a_omega = domain.ceil_measure().min(loc.dim());
    let d = loc.dim();
    let v = &spec.eigenvectors;
    let t = nalgebra::DMatrix::from_fn(d, d, |i, j| {
        (0..a_omega).map(|k| v[(i, k)] * v[(j, k)].conj()).sum::<Complex64>()
    });
    let t_omega = HermitianOperator::new(t)?;
    let diff = loc.sub(&t_omega)?;
    let trace_norm_error = spectral::eigenvalues(&diff, f64::INFINITY)?.iter().map(|l| l.abs()).sum();
    Ok(FiniteRankApprox { t_omega, a_omega, eigenvalues: spec.eigenvalues, trace_norm_error })
}

/// `{ (|Ω| d)^{-1/2} π(μ) fᵢ : μ ∈ Ω }`, refusing more than `max_signals` outputs.
pub fn augment_dataset_capped(domain: &Domain, data: &DataSet, max_signals: usize) -> Result<DataSet> {
    check_dim(domain.grid.dim(), data.dim())?;
    if domain.cells == 0 {
        return Err(QhaError::EmptyDomain);
    }
    let requested = domain.cells.saturating_mul(data.len());
    if requested > max_signals {
        return Err(QhaError::AugmentationTooLarge { requested, limit: max_signals });
    }
    let c = Complex64::new((domain.cells as f64).sqrt().recip(), 0.0);
    let mut out = Vec::with_capacity(requested);
    for f in data.signals() {
        for mu in domain.points() {
            out.push(tf_shift(f, mu)?.scaled(c));
        }
    }
    let mut aug = DataSet::new(out, format!("{} augmented over {} cells", data.label, domain.cells))?;
    aug.seed = data.seed;
    Ok(aug)
}

/// [`augment_dataset_capped`] with [`DEFAULT_MAX_AUGMENTED`].
pub fn augment_dataset(domain: &Domain, data: &DataSet) -> Result<DataSet> {
    augment_dataset_capped(domain, data, DEFAULT_MAX_AUGMENTED)
}
