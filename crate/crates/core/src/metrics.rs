//! Entropies, concentration measures and executable checks of the bounds
//! that tie them together.

use serde::{Deserialize, Serialize};

use crate::augmentation::{finite_rank_approx, mixed_state_localization, Domain};
use crate::error::{check_dim, QhaError, Result};
use crate::fft;
use crate::operators::{fn_op_convolve, op_op_convolve, total_correlation, HermitianOperator, DEFAULT_RANK_CUT};
use crate::spectral;
use crate::tf::{grid_convolve, grid_integrate, GridFunction, GridPoint};

/// Tolerance on `tr A = 1` for entropy inputs.
pub const ENTROPY_TRACE_TOL: f64 = 1e-8;
/// Tolerance on the mass of a density.
pub const DENSITY_MASS_TOL: f64 = 1e-6;
/// Most negative value accepted in a density.
pub const DENSITY_NEG_TOL: f64 = 1e-12;
/// Slack on eigenvalues expected in `[0, 1]`.
pub const UNIT_INTERVAL_TOL: f64 = 1e-9;
/// Slack of the perimeter bound and the finite-rank and lemma checks.
pub const STRUCTURAL_TOL: f64 = 1e-8;
/// Relative slack of the entropy-covariance check.
pub const COVARIANCE_REL_TOL: f64 = 1e-3;

/// Result of a check that may be loose or ill-posed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    /// Holds, but the bound carries no information.
    Vacuous,
    /// The check does not apply to this input.
    Inconclusive,
    Fail,
}

impl Outcome {
    pub fn is_failure(self) -> bool {
        self == Outcome::Fail
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Vacuous => "vacuous",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Fail => "fail",
        }
    }
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn state_eigenvalues(a: &HermitianOperator) -> Result<Vec<f64>> {
    let tr = a.trace();
    if (tr - 1.0).abs() > ENTROPY_TRACE_TOL {
        return Err(QhaError::TraceNotOne(tr));
    }
    spectral::eigenvalues(a, spectral::clamp_tolerance_for(a, spectral::DEFAULT_CLAMP))
}

/// `-Σ λ ln λ` of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlnx(x)).sum::<f64>()
}

/// `H_vN(A) = -Σ λ_k ln λ_k` of a positive trace-one operator.
pub fn von_neumann_entropy(a: &HermitianOperator) -> Result<f64> {
    Ok(shannon_entropy(&state_eigenvalues(a)?))
}

/// `(H_vN(A), e^{H_vN(A)})`.
pub fn effective_dimension(a: &HermitianOperator) -> Result<(f64, f64)> {
    let h = von_neumann_entropy(a)?;
    Ok((h, h.exp()))
}

fn check_density(f: &GridFunction) -> Result<()> {
    let min = f.min();
    if min < -DENSITY_NEG_TOL {
        return Err(QhaError::NegativeDensity(min));
    }
    let mass = grid_integrate(f);
    if (mass - 1.0).abs() > DENSITY_MASS_TOL {
        return Err(QhaError::NotProbability(mass));
    }
    Ok(())
}

/// `H(F) = -∫ F ln F` of a probability density on the grid.
pub fn differential_entropy(f: &GridFunction) -> Result<f64> {
    check_density(f)?;
    Ok(-f.phase_grid().cell_measure() * f.values().iter().map(|&x| xlnx(x)).sum::<f64>())
}

/// `P(A) = tr A - tr A² = Σ λ(1 - λ)` for eigenvalues in `[0, 1]`.
pub fn projection_functional_spectral(a: &HermitianOperator) -> Result<f64> {
    let values = spectral::eigenvalues(a, UNIT_INTERVAL_TOL)?;
    if let Some(&top) = values.first() {
        if top > 1.0 + UNIT_INTERVAL_TOL {
            return Err(QhaError::EigenvalueOutOfRange(top));
        }
    }
    Ok(values.iter().map(|l| l * (1.0 - l)).sum())
}

/// `a(u) = #{z ∈ Ω : z + u ∈ Ω}`.
pub fn domain_autocorrelation(domain: &Domain) -> GridFunction {
    let chi = domain.indicator();
    let d = chi.dim();
    let counts = fft::cyclic_convolve2(chi.reflect().values(), chi.values(), d);
    GridFunction::new(chi.phase_grid(), counts.into_iter().map(f64::round).collect()).expect("same grid")
}

/// Average lack of concentration of `S̃` on `Ω`,
/// `ALC = 1 - (1/|Ω|) ∫_Ω ∫_Ω S̃(w - z) dw dz`.
pub fn alc(tc: &GridFunction, domain: &Domain) -> Result<f64> {
    check_dim(domain.phase_grid().dim(), tc.dim())?;
    if domain.cell_count() == 0 {
        return Err(QhaError::EmptyDomain);
    }
    check_density(tc)?;
    let d = tc.dim() as f64;
    let overlap: f64 = tc.values().iter().zip(domain_autocorrelation(domain).values()).map(|(s, a)| s * a).sum();
    Ok(1.0 - overlap / (domain.measure() * d * d))
}

/// The sandwich `ln|Ω| + ALC ≤ H_vN((χ_Ω/|Ω|) ⋆ S) ≤ H((χ_Ω/|Ω|) ∗ S̃)` and
/// `H(S̃) ≥ H_vN(S)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub measure: f64,
    pub alc: f64,
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
    pub slack_lower: f64,
    pub slack_upper: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub entropy_total_correlation: f64,
    pub entropy_state: f64,
    pub berezin_lieb_pass: bool,
}

/// [`berezin_lieb_check_with`] computing `S̃` itself.
pub fn berezin_lieb_check(s: &HermitianOperator, domain: &Domain) -> Result<BoundsReport> {
    let tc = total_correlation(s, DEFAULT_RANK_CUT)?;
    berezin_lieb_check_with(s, &tc, domain)
}

/// Evaluates the entropy sandwich for `S` on `Ω` given `S̃`.
pub fn berezin_lieb_check_with(s: &HermitianOperator, tc: &GridFunction, domain: &Domain) -> Result<BoundsReport> {
    let measure = domain.measure();
    let alc = alc(tc, domain)?;
    let lower = measure.ln() + alc;
    let aug = mixed_state_localization(domain, s)?.scale(1.0 / measure);
    let mid = von_neumann_entropy(&aug)?;
    let upper = differential_entropy(&grid_convolve(&domain.density()?, tc)?)?;
    let tolerance = 1e-7 * mid.abs().max(1.0);
    let entropy_total_correlation = differential_entropy(tc)?;
    let entropy_state = von_neumann_entropy(s)?;
    Ok(BoundsReport {
        measure,
        alc,
        lower,
        mid,
        upper,
        slack_lower: mid - lower,
        slack_upper: upper - mid,
        tolerance,
        pass: lower <= mid + tolerance && mid <= upper + tolerance,
        entropy_total_correlation,
        entropy_state,
        berezin_lieb_pass: entropy_total_correlation >= entropy_state - tolerance,
    })
}

/// `ALC ≥ 1 - Σ_{k≤A_Ω} λ_k / |Ω|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn lemma_alc_lower_bound(s: &HermitianOperator, domain: &Domain) -> Result<LemmaReport> {
    let tc = total_correlation(s, DEFAULT_RANK_CUT)?;
    lemma_alc_lower_bound_with(s, &tc, domain)
}

pub fn lemma_alc_lower_bound_with(s: &HermitianOperator, tc: &GridFunction, domain: &Domain) -> Result<LemmaReport> {
    let lhs = alc(tc, domain)?;
    let loc = mixed_state_localization(domain, s)?;
    let values = spectral::eigenvalues(&loc, UNIT_INTERVAL_TOL)?;
    let top: f64 = values.iter().take(domain.ceil_measure()).sum();
    let rhs = 1.0 - top / domain.measure();
    Ok(LemmaReport { lhs, rhs, pass: lhs >= rhs - STRUCTURAL_TOL })
}

/// `‖χ_Ω ⋆ S - T_Ω‖₁ / |Ω| ≤ (A_Ω - |Ω|)/|Ω| + 2 ALC`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteRankReport {
    pub a_omega: usize,
    pub relative_error: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn finite_rank_check(s: &HermitianOperator, tc: &GridFunction, domain: &Domain) -> Result<FiniteRankReport> {
    let approx = finite_rank_approx(domain, s)?;
    let measure = domain.measure();
    let relative_error = approx.trace_norm_error / measure;
    let bound = (approx.a_omega as f64 - measure) / measure + 2.0 * alc(tc, domain)?;
    Ok(FiniteRankReport {
        a_omega: approx.a_omega,
        relative_error,
        bound,
        pass: relative_error <= bound + STRUCTURAL_TOL,
    })
}

/// `ALC ≤ (|∂Ω|/|Ω|) ∫ S̃(z)|z| dz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerimeterReport {
    pub alc: f64,
    pub bound: f64,
    pub outcome: Outcome,
}

/// `∫ S̃(z)|z| dz` with `|z|` the cyclic distance to the origin.
pub fn first_absolute_moment(tc: &GridFunction) -> f64 {
    let grid = tc.phase_grid();
    grid.cell_measure() * grid.points().map(|z| tc.get(z) * grid.cyclic_norm(z)).sum::<f64>()
}

pub fn perimeter_bound_check(tc: &GridFunction, domain: &Domain) -> Result<PerimeterReport> {
    let alc = alc(tc, domain)?;
    let bound = domain.perimeter() / domain.measure() * first_absolute_moment(tc);
    let outcome = if alc > bound + STRUCTURAL_TOL {
        Outcome::Fail
    } else if bound >= 1.0 {
        Outcome::Vacuous
    } else {
        Outcome::Pass
    };
    Ok(PerimeterReport { alc, bound, outcome })
}

/// `e^{H(S̃)/2} ≤ √(πe) · √(tr Σ)` for the covariance `Σ` of `S̃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub lhs: f64,
    pub rhs: f64,
    /// Trace of the covariance of the cell-constant density, in phase units².
    pub trace_covariance: f64,
    /// Trace of the covariance of the point masses at cell centers.
    pub trace_covariance_discrete: f64,
    pub center: GridPoint,
    /// Mass farther than a quarter of the torus from `center` along either axis.
    pub wrap_mass: f64,
    pub outcome: Outcome,
}

/// Moments are taken in coordinates centered at the argmax of `S̃`, over the
/// fundamental domain around it, for the density that is constant on each
/// cell. A spread below one cell is reported as inconclusive.
pub fn entropy_covariance_check(tc: &GridFunction) -> Result<CovarianceReport> {
    let h = differential_entropy(tc)?;
    let grid = tc.phase_grid();
    let d = grid.dim();
    let w = grid.cell_measure();
    let s = grid.cell_side();
    let center = tc.argmax();
    let (mut mean_t, mut mean_xi, mut second, mut wrap_mass) = (0.0, 0.0, 0.0, 0.0);
    let quarter = d as i64 / 4;
    for z in grid.points() {
        let p = w * tc.get(z);
        let rel = grid.sub(z, center);
        let (km, kn) = (grid.centered_index(rel.m), grid.centered_index(rel.n));
        let (t, xi) = (km as f64 * s, kn as f64 * s);
        mean_t += p * t;
        mean_xi += p * xi;
        second += p * (t * t + xi * xi);
        if km.abs() > quarter || kn.abs() > quarter {
            wrap_mass += p;
        }
    }
    let trace_covariance_discrete = (second - mean_t * mean_t - mean_xi * mean_xi).max(0.0);
    let trace_covariance = trace_covariance_discrete + 1.0 / (6.0 * d as f64);
    let lhs = (h / 2.0).exp();
    let rhs = (std::f64::consts::PI * std::f64::consts::E * trace_covariance).sqrt();
    let outcome = if trace_covariance_discrete < w {
        Outcome::Inconclusive
    } else if lhs <= rhs * (1.0 + COVARIANCE_REL_TOL) {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    Ok(CovarianceReport {
        lhs,
        rhs,
        trace_covariance,
        trace_covariance_discrete,
        center,
        wrap_mass,
        outcome,
    })
}

/// `ALC(S̃, RΩ)` for each scale `R`.
pub fn asymptotic_alc_scan(tc: &GridFunction, domain: &Domain, scales: &[f64]) -> Result<Vec<(f64, f64)>> {
    scales.iter().map(|&r| Ok((r, alc(tc, &domain.scaled(r)?)?))).collect()
}

/// `tr Φ(A)` through the eigenvalues of `A`.
pub fn trace_of_function(a: &HermitianOperator, phi: impl Fn(f64) -> f64) -> Result<f64> {
    Ok(spectral::eigenvalues(a, f64::INFINITY)?.into_iter().map(phi).sum())
}

/// `∫ Φ ∘ F`.
pub fn integral_of_function(f: &GridFunction, phi: impl Fn(f64) -> f64) -> f64 {
    f.phase_grid().cell_measure() * f.values().iter().map(|&x| phi(x)).sum::<f64>()
}

/// Both sides of a Berezin-Lieb inequality, `greater ≥ lesser` expected.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalitySides {
    pub greater: f64,
    pub lesser: f64,
}

impl InequalitySides {
    pub fn holds(&self, tol: f64) -> bool {
        self.greater >= self.lesser - tol
    }
}

/// `∫ Φ ∘ (A ⋆ T) ≥ tr Φ(A)` for `0 ≤ A ≤ I`, a state `T` and concave `Φ` with `Φ(0) = 0`.
pub fn berezin_lieb_operator_side(
    a: &HermitianOperator,
    t: &HermitianOperator,
    phi: impl Fn(f64) -> f64 + Copy,
) -> Result<InequalitySides> {
    Ok(InequalitySides {
        greater: integral_of_function(&op_op_convolve(a, t)?, phi),
        lesser: trace_of_function(a, phi)?,
    })
}

/// `tr Φ(F ⋆ T) ≥ ∫ Φ ∘ F` for `0 ≤ F ≤ 1`, a state `T` and concave `Φ` with `Φ(0) = 0`.
pub fn berezin_lieb_function_side(
    f: &GridFunction,
    t: &HermitianOperator,
    phi: impl Fn(f64) -> f64 + Copy,
) -> Result<InequalitySides> {
    Ok(InequalitySides {
        greater: trace_of_function(&fn_op_convolve(f, t)?, phi)?,
        lesser: integral_of_function(f, phi),
    })
}
