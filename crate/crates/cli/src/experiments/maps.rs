use qha::datasets::{default_tf_weight, gen_chirps, gen_random_tf_weighted};
use qha::metrics::{entropy_covariance_check, Outcome};
use qha::operators::{cohen_class, data_operator, total_correlation, HermitianOperator, DEFAULT_RANK_CUT};
use qha::tf::{gaussian_window, grid_integrate, spectrogram, PhaseGrid};

use super::chirps::rate_range;
use super::{grid_table, rng, ExperimentOutput};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::Report;
use crate::svg::heatmap;
use crate::table::{Cell, ResultTable};

const MASS_TOL: f64 = 1e-8;

fn total_correlation_map(cfg: &ExperimentConfig, mut report: Report, s: &HermitianOperator, title: &str) -> Result<ExperimentOutput> {
    report.tolerance("mass", MASS_TOL);
    let tc = total_correlation(s, DEFAULT_RANK_CUT)?;
    let mass = grid_integrate(&tc);
    report.check("unit_mass", (mass - 1.0).abs() <= MASS_TOL, format!("integral {mass}"));
    let at0 = tc.get(qha::tf::GridPoint::ORIGIN);
    let purity = s.trace_of_square();
    report.check("origin_equals_purity", (at0 - purity).abs() <= MASS_TOL, format!("value at origin {at0}, tr S^2 {purity}"));
    let cov = entropy_covariance_check(&tc)?;
    report.check_outcome(
        "entropy_covariance",
        cov.outcome,
        format!("exp(H/2) = {}, sqrt(pi e tr cov) = {}, wrap mass {}", cov.lhs, cov.rhs, cov.wrap_mass),
    );
    let table = grid_table(&tc, "value")?;
    let svg = cfg.svg.then(|| heatmap(title, &tc));
    Ok(ExperimentOutput { table, report, svg })
}

pub fn chirp_total_correlation(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(280);
    let n = cfg.n.unwrap_or(150);
    let rates = rate_range(cfg)?;
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("n", n);
    report.param("rate_range", [rates.0, rates.1]);
    let data = gen_chirps(n, d, &mut rng(cfg.seed), rates)?;
    total_correlation_map(cfg, report, &data_operator(&data)?, "Total correlation of chirps")
}

pub fn tf_weighted(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(128);
    let n = cfg.n.unwrap_or(500);
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("n", n);
    report.param("weight", "sin(2 pi r) / (1 + r)^2 on the integer lattice, r = |(t, xi)|");
    let data = gen_random_tf_weighted(n, d, default_tf_weight, &mut rng(cfg.seed))?;
    total_correlation_map(cfg, report, &data_operator(&data)?, "Total correlation of the weighted lattice dataset")
}

pub fn cohen_demo(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(280);
    let n = cfg.n.unwrap_or(150);
    let rates = rate_range(cfg)?;
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("n", n);
    report.param("rate_range", [rates.0, rates.1]);
    report.tolerance("structural", MASS_TOL);

    let g = gaussian_window(d)?;
    let gauss = cohen_class(&HermitianOperator::rank_one(&g), &g)?;
    let data = gen_chirps(n, d, &mut rng(cfg.seed), rates)?;
    let chirp = cohen_class(&data_operator(&data)?, &g)?;

    let direct = spectrogram(&g, &g)?;
    let diff = gauss.max_abs_diff(&direct)?;
    report.check("rank_one_is_spectrogram", diff <= MASS_TOL, format!("max |Q - |V_g g|^2| = {diff:e}"));
    for (label, q) in [("gaussian", &gauss), ("chirps", &chirp)] {
        let mass = grid_integrate(q);
        report.check(&format!("{label}_unit_mass"), (mass - 1.0).abs() <= MASS_TOL, format!("integral {mass}"));
        let min = q.min();
        report.check_outcome(
            &format!("{label}_nonnegative"),
            if min >= -MASS_TOL { Outcome::Pass } else { Outcome::Fail },
            format!("min {min:e}"),
        );
    }

    let grid = PhaseGrid::new(d)?;
    let mut table = ResultTable::new(["m", "n", "t", "xi", "q_gaussian", "q_chirps"]);
    for z in grid.points() {
        let (x, y) = grid.centered_coordinate(z);
        table.push(vec![z.m.into(), z.n.into(), x.into(), y.into(), Cell::from(gauss.get(z)), chirp.get(z).into()])?;
    }
    let svg = cfg.svg.then(|| heatmap("Cohen class of a Gaussian under the chirp data operator", &chirp));
    Ok(ExperimentOutput { table, report, svg })
}
