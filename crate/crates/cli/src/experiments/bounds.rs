use qha::augmentation::{make_rect_domain, mixed_state_localization, Domain};
use qha::datasets::{gen_gaussian_combos, gen_local_components, normalize_dataset, DataSet};
use qha::metrics::{
    berezin_lieb_check_with, berezin_lieb_function_side, berezin_lieb_operator_side, entropy_covariance_check,
    finite_rank_check, lemma_alc_lower_bound_with, perimeter_bound_check, BoundsReport, CovarianceReport,
    FiniteRankReport, InequalitySides, LemmaReport, Outcome, PerimeterReport, STRUCTURAL_TOL,
};
use qha::operators::{data_operator, total_correlation, HermitianOperator, DEFAULT_RANK_CUT};
use qha::tf::{Grid, GridFunction, PhaseGrid, Signal};
use qha::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{rng, ExperimentOutput};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::Report;
use crate::svg::{line_plot, Series};
use crate::table::{Cell, ResultTable};

pub const BEREZIN_LIEB_TOL: f64 = 1e-10;

fn phi(x: f64) -> f64 {
    x - x * x
}

/// Every checker evaluated on one `(S, Ω)`, plus the general Berezin-Lieb
/// pair for a second state `T` and a function `0 ≤ F ≤ 1`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsRow {
    pub sandwich: BoundsReport,
    pub lemma: LemmaReport,
    pub finite_rank: FiniteRankReport,
    pub perimeter: PerimeterReport,
    pub covariance: CovarianceReport,
    pub berezin_lieb_operator: InequalitySides,
    pub berezin_lieb_function: InequalitySides,
    pub perimeter_length: f64,
}

impl BoundsRow {
    pub fn compute(s: &HermitianOperator, omega: &Domain, t: &HermitianOperator, f: &GridFunction) -> Result<Self> {
        let tc = total_correlation(s, DEFAULT_RANK_CUT)?;
        let a = mixed_state_localization(omega, s)?;
        Ok(BoundsRow {
            sandwich: berezin_lieb_check_with(s, &tc, omega)?,
            lemma: lemma_alc_lower_bound_with(s, &tc, omega)?,
            finite_rank: finite_rank_check(s, &tc, omega)?,
            perimeter: perimeter_bound_check(&tc, omega)?,
            covariance: entropy_covariance_check(&tc)?,
            berezin_lieb_operator: berezin_lieb_operator_side(&a, t, phi)?,
            berezin_lieb_function: berezin_lieb_function_side(f, t, phi)?,
            perimeter_length: omega.perimeter(),
        })
    }

    /// Names of the theorem checks that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.sandwich.pass {
            out.push("sandwich");
        }
        if !self.sandwich.berezin_lieb_pass {
            out.push("state_vs_total_correlation_entropy");
        }
        if !self.lemma.pass {
            out.push("lemma");
        }
        if !self.finite_rank.pass {
            out.push("finite_rank");
        }
        if self.perimeter.outcome.is_failure() {
            out.push("perimeter");
        }
        if self.covariance.outcome.is_failure() {
            out.push("entropy_covariance");
        }
        if !self.berezin_lieb_operator.holds(BEREZIN_LIEB_TOL) {
            out.push("berezin_lieb_operator");
        }
        if !self.berezin_lieb_function.holds(BEREZIN_LIEB_TOL) {
            out.push("berezin_lieb_function");
        }
        out
    }

    pub const COLUMNS: [&'static str; 26] = [
        "measure",
        "perimeter",
        "alc",
        "lower",
        "mid",
        "upper",
        "slack_lower",
        "slack_upper",
        "h_total_correlation",
        "h_state",
        "lemma_alc",
        "lemma_rhs",
        "a_omega",
        "finite_rank_error",
        "finite_rank_bound",
        "perimeter_bound",
        "perimeter_outcome",
        "covariance_lhs",
        "covariance_rhs",
        "covariance_outcome",
        "bl_operator_integral",
        "bl_operator_trace",
        "bl_function_trace",
        "bl_function_integral",
        "failures",
        "pass",
    ];

    pub fn cells(&self) -> Vec<Cell> {
        let b = &self.sandwich;
        let inconclusive = self.covariance.outcome == Outcome::Inconclusive;
        let cov = |x: f64| if inconclusive { Cell::Missing } else { Cell::from(x) };
        let failures = self.failures();
        vec![
            b.measure.into(),
            self.perimeter_length.into(),
            b.alc.into(),
            b.lower.into(),
            b.mid.into(),
            b.upper.into(),
            b.slack_lower.into(),
            b.slack_upper.into(),
            b.entropy_total_correlation.into(),
            b.entropy_state.into(),
            self.lemma.lhs.into(),
            self.lemma.rhs.into(),
            self.finite_rank.a_omega.into(),
            self.finite_rank.relative_error.into(),
            self.finite_rank.bound.into(),
            self.perimeter.bound.into(),
            self.perimeter.outcome.as_str().into(),
            cov(self.covariance.lhs),
            cov(self.covariance.rhs),
            self.covariance.outcome.as_str().into(),
            self.berezin_lieb_operator.greater.into(),
            self.berezin_lieb_operator.lesser.into(),
            self.berezin_lieb_function.greater.into(),
            self.berezin_lieb_function.lesser.into(),
            failures.join(";").into(),
            Cell::Int(failures.is_empty() as i64),
        ]
    }
}

fn random_state(d: usize, max_rank: usize, r: &mut ChaCha8Rng) -> Result<HermitianOperator> {
    let n = r.random_range(1..=max_rank);
    let signals = (0..n)
        .map(|_| {
            Signal::new(
                (0..d).map(|_| Complex64::new(StandardNormal.sample(&mut *r), StandardNormal.sample(&mut *r))).collect(),
            )
        })
        .collect::<qha::Result<Vec<_>>>()?;
    Ok(data_operator(&normalize_dataset(&DataSet::new(signals, "random")?)?)?)
}

/// Instance `i`: a state from one of three families and a random rectangle.
fn instance(d: usize, seed: u64) -> Result<(&'static str, HermitianOperator, Domain, HermitianOperator, GridFunction)> {
    let mut r = rng(seed);
    let grid = PhaseGrid::new(d)?;
    let (family, s) = match seed % 3 {
        0 => ("random", random_state(d, 6, &mut r)?),
        1 => {
            let n = r.random_range(1..=6);
            ("gaussian_combos", data_operator(&gen_gaussian_combos(n, d, (1.5, 0.5), 2, &mut r)?)?)
        }
        _ => {
            let n = r.random_range(1..=6);
            let noise = r.random_range(0.0..0.5);
            ("local_components", data_operator(&gen_local_components(n, d, noise, 1.0, &mut r)?.data)?)
        }
    };
    let w = r.random_range(0.3..grid.side());
    let h = r.random_range(0.3..grid.side());
    let omega = make_rect_domain(grid, w, h, (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)))?;
    let t = random_state(d, 4, &mut r)?;
    let f = Grid::from_fn(grid, |_| r.random::<f64>());
    Ok((family, s, omega, t, f))
}

pub fn bounds_suite(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(32);
    let trials = cfg.trials.unwrap_or(50);
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("instances", trials);
    report.param("families", ["random", "gaussian_combos", "local_components"]);
    report.tolerance("sandwich_slack", 1e-7);
    report.tolerance("structural", STRUCTURAL_TOL);
    report.tolerance("berezin_lieb", BEREZIN_LIEB_TOL);
    report.tolerance("covariance_rel", qha::metrics::COVARIANCE_REL_TOL);

    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (family, s, omega, t, f) = instance(d, cfg.seed + i as u64)?;
            Ok((family, BoundsRow::compute(&s, &omega, &t, &f)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec!["instance", "family"];
    columns.extend(BoundsRow::COLUMNS);
    let mut table = ResultTable::new(columns);
    for (i, (family, row)) in rows.iter().enumerate() {
        let mut cells = vec![Cell::from(i), Cell::from(*family)];
        cells.extend(row.cells());
        table.push(cells)?;
    }

    let count = |f: &dyn Fn(&BoundsRow) -> bool| rows.iter().filter(|(_, r)| f(r)).count();
    let n = rows.len();
    let worst_slack =
        rows.iter().map(|(_, r)| r.sandwich.slack_lower.min(r.sandwich.slack_upper)).fold(f64::INFINITY, f64::min);
    report.check("sandwich", count(&|r| r.sandwich.pass) == n, format!("smallest slack {worst_slack:e}"));
    report.check(
        "state_vs_total_correlation_entropy",
        count(&|r| r.sandwich.berezin_lieb_pass) == n,
        format!("{} of {n}", count(&|r| r.sandwich.berezin_lieb_pass)),
    );
    report.check("lemma", count(&|r| r.lemma.pass) == n, format!("{} of {n}", count(&|r| r.lemma.pass)));
    report.check("finite_rank", count(&|r| r.finite_rank.pass) == n, format!("{} of {n}", count(&|r| r.finite_rank.pass)));
    let vacuous = count(&|r| r.perimeter.outcome == Outcome::Vacuous);
    let perim_fail = count(&|r| r.perimeter.outcome.is_failure());
    report.check("perimeter", perim_fail == 0, format!("{perim_fail} failed, {vacuous} vacuous of {n}"));
    let cov_fail = count(&|r| r.covariance.outcome.is_failure());
    let cov_inc = count(&|r| r.covariance.outcome == Outcome::Inconclusive);
    report.check("entropy_covariance", cov_fail == 0, format!("{cov_fail} failed, {cov_inc} inconclusive of {n}"));
    let bl_op = count(&|r| r.berezin_lieb_operator.holds(BEREZIN_LIEB_TOL));
    let bl_fn = count(&|r| r.berezin_lieb_function.holds(BEREZIN_LIEB_TOL));
    report.check("berezin_lieb_operator", bl_op == n, format!("{bl_op} of {n}"));
    report.check("berezin_lieb_function", bl_fn == n, format!("{bl_fn} of {n}"));

    let svg = cfg.svg.then(|| {
        let pts = |f: &dyn Fn(&BoundsRow) -> f64| rows.iter().enumerate().map(|(i, (_, r))| (i as f64, f(r))).collect();
        line_plot(
            "Entropy sandwich per instance",
            "instance",
            "entropy",
            &[
                Series::new("ln|Ω| + ALC", pts(&|r| r.sandwich.lower)).dashed(),
                Series::new("H_vN", pts(&|r| r.sandwich.mid)),
                Series::new("H upper", pts(&|r| r.sandwich.upper)).dashed(),
            ],
        )
    });
    Ok(ExperimentOutput { table, report, svg })
}
