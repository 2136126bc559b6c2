use qha::datasets::gen_hermite_pair_state;
use qha::metrics::{alc, von_neumann_entropy};
use qha::operators::{total_correlation, HermitianOperator, DEFAULT_RANK_CUT};
use qha::tf::{hermite_basis, PhaseGrid};

use super::{augmented_entropy, centered_rect, cells, ExperimentOutput};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::Report;
use crate::svg::{line_plot, Series};
use crate::table::ResultTable;

const SYMMETRY_TOL: f64 = 1e-9;

pub fn interp(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(128);
    let side = cfg.param_f64("omega_side", 2.45)?;
    let steps = cfg.param_usize("steps", 20)?;
    let partner = cfg.param_usize("far_index", 9)?;
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("omega_side", side);
    report.param("steps", steps);
    report.param("far_index", partner);
    report.tolerance("symmetry", SYMMETRY_TOL);

    let grid = PhaseGrid::new(d)?;
    let omega = centered_rect(grid, side, side)?;
    let h = hermite_basis(d, partner.max(1) + 1)?;
    let mut table = ResultTable::new(["t", "h_state_01", "h_state_0far", "h_aug_01", "h_aug_0far"]);
    let mut rows = Vec::new();
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let near = gen_hermite_pair_state(t, &h[0], &h[1])?;
        let far = gen_hermite_pair_state(t, &h[0], &h[partner])?;
        let row = [
            t,
            von_neumann_entropy(&near)?,
            von_neumann_entropy(&far)?,
            augmented_entropy(&omega, &near)?,
            augmented_entropy(&omega, &far)?,
        ];
        table.push(cells(row))?;
        rows.push(row);
    }

    report.check("state_entropy_zero_at_t0", rows[0][1].abs() <= 1e-10, format!("H_vN(S_0) = {:e}", rows[0][1]));
    let asym = (0..rows.len()).map(|i| (rows[i][1] - rows[rows.len() - 1 - i][1]).abs()).fold(0.0, f64::max);
    report.check("state_entropy_symmetric", asym <= SYMMETRY_TOL, format!("max |H(t) - H(1-t)| = {asym:e}"));
    let peak = rows.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max);
    report.check(
        "state_entropy_peak_ln2",
        (peak - std::f64::consts::LN_2).abs() <= SYMMETRY_TOL,
        format!("max H_vN(S_t) = {peak}"),
    );
    let interior = &rows[1..rows.len() - 1];
    let min_gap = interior.iter().map(|r| r[4] - r[3]).fold(f64::INFINITY, f64::min);
    report.check(
        "far_pair_augments_higher",
        min_gap > 0.0,
        format!("min over interior t of H_aug(h0,h{partner}) - H_aug(h0,h1) = {min_gap}"),
    );

    let svg = cfg.svg.then(|| {
        let col = |j: usize| rows.iter().map(|r| (r[0], r[j])).collect::<Vec<_>>();
        line_plot(
            "Entropy along S_t",
            "t",
            "entropy",
            &[
                Series::new("state (h0,h1)", col(1)),
                Series::new("augmented (h0,h1)", col(3)),
                Series::new(format!("augmented (h0,h{partner})"), col(4)),
            ],
        )
    });
    Ok(ExperimentOutput { table, report, svg })
}

pub fn mix(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(128);
    let area = cfg.param_f64("omega_area", 9.0)?;
    let max_n = cfg.param_usize("max_n", 16)?;
    let max_crossover = cfg.param_usize("max_crossover", 8)?;
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("omega_area", area);
    report.param("max_n", max_n);
    report.param("max_crossover", max_crossover);
    report.tolerance("entropy_comparison", 1e-7);

    let grid = PhaseGrid::new(d)?;
    let side = area.sqrt();
    let omega = centered_rect(grid, side, side)?;
    report.param("omega_measure", omega.measure());
    let h = hermite_basis(d, max_n)?;
    let mut table = ResultTable::new(["n", "h_aug_single", "h_aug_span", "alc_single", "alc_span"]);
    let mut rows = Vec::new();
    let mut span = HermitianOperator::zeros(d);
    for n in 1..=max_n {
        span = span.add(&HermitianOperator::rank_one(&h[n - 1]))?;
        let mixed = span.scale(1.0 / n as f64);
        let single = HermitianOperator::rank_one(&h[n - 1]);
        let a_single = alc(&total_correlation(&single, DEFAULT_RANK_CUT)?, &omega)?;
        let a_span = alc(&total_correlation(&mixed, DEFAULT_RANK_CUT)?, &omega)?;
        let row = [n as f64, augmented_entropy(&omega, &single)?, augmented_entropy(&omega, &mixed)?, a_single, a_span];
        table.push(cells(row))?;
        rows.push(row);
    }

    // smallest n0 after which the span never exceeds the single projection
    let mut n0 = None;
    for start in (0..rows.len()).rev() {
        if rows[start][2] <= rows[start][1] + 1e-7 {
            n0 = Some(start + 1);
        } else {
            break;
        }
    }
    let detail = match n0 {
        Some(n0) => format!("span entropy <= single entropy for all n >= {n0}"),
        None => format!("span entropy exceeds single entropy at n = {max_n}"),
    };
    report.check("span_below_single_from_n0", n0.is_some_and(|n0| n0 <= max_crossover), detail);
    report.param("n0", n0);

    let svg = cfg.svg.then(|| {
        let col = |j: usize| rows.iter().map(|r| (r[0], r[j])).collect::<Vec<_>>();
        line_plot(
            "Augmented entropy: single Hermite function vs span",
            "n",
            "entropy",
            &[Series::new("single h_{n-1}", col(1)), Series::new("span h_0..h_{n-1}", col(2))],
        )
    });
    Ok(ExperimentOutput { table, report, svg })
}
