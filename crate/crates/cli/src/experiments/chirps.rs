use nalgebra::DMatrix;
use qha::augmentation::Domain;
use qha::datasets::{gen_chirps, DataSet, DEFAULT_CHIRP_RATE};
use qha::metrics::von_neumann_entropy;
use qha::operators::data_operator;
use qha::tf::{GridPoint, PhaseGrid};
use qha::Complex64;
use rayon::prelude::*;

use super::{augmented_entropy, mean_var, rng, ExperimentOutput};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::Report;
use crate::svg::{line_plot, Series};
use crate::table::{Cell, ResultTable};

pub(crate) fn rate_range(cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let r = cfg.param_f64_list("rate_range", &[DEFAULT_CHIRP_RATE.0, DEFAULT_CHIRP_RATE.1])?;
    match r.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(crate::error::CliError::Config("`rate_range` needs two numbers".into())),
    }
}

/// Numerical rank of the `d × N` data matrix: singular values above
/// `max(d, N) · ε · σ_max`.
pub(crate) fn data_rank(data: &DataSet) -> usize {
    let (d, n) = (data.dim(), data.len());
    let x = DMatrix::<Complex64>::from_fn(d, n, |i, j| data.signals()[j].values()[i]);
    let sv = x.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let tol = d.max(n) as f64 * f64::EPSILON * top;
    sv.iter().filter(|&&s| s > tol).count()
}

struct Row {
    n: usize,
    seed: u64,
    rank: usize,
    ed: f64,
    aug_ed: f64,
}

pub fn effective_dimension(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(280);
    let sizes = cfg.param_usize_list("sizes", &[100, 150, 200, 250, 300, 350, 400])?;
    let seeds = cfg.trials.unwrap_or(5);
    let cells = cfg.param_usize("omega_cells", 80)?;
    let rates = rate_range(cfg)?;
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("sizes", &sizes);
    report.param("seeds", seeds);
    report.param("omega_cells", cells);
    report.param("rate_range", [rates.0, rates.1]);
    report.tolerance("ed_plateau_rel", 0.05);
    report.note(format!("augmentation domain: {cells} x {cells} grid cells centred at the origin"));

    let grid = PhaseGrid::new(d)?;
    let omega = Domain::cell_rect(grid, cells.min(d), cells.min(d), GridPoint::ORIGIN)?;
    report.param("omega_measure", omega.measure());
    let jobs: Vec<(usize, usize)> = (0..seeds).flat_map(|s| sizes.iter().map(move |&n| (s, n))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(s, n)| {
            // Same seed for every N: smaller sets are prefixes of larger ones.
            let seed = cfg.seed + s as u64;
            let data = gen_chirps(n, d, &mut rng(seed), rates)?;
            let op = data_operator(&data)?;
            Ok(Row { n, seed, rank: data_rank(&data), ed: von_neumann_entropy(&op)?, aug_ed: augmented_entropy(&omega, &op)? })
        })
        .collect::<Result<Vec<Row>>>()?;

    let mut table = ResultTable::new(["n", "seed", "rank", "ed", "exp_ed", "aug_ed"]);
    for r in &rows {
        table.push(vec![r.n.into(), Cell::Int(r.seed as i64), r.rank.into(), r.ed.into(), r.ed.exp().into(), r.aug_ed.into()])?;
    }

    let saturated = rows.iter().all(|r| r.rank == r.n.min(d));
    report.check("rank_is_min_n_d", saturated, "rank of the data matrix equals min(N, d) for every run");
    let mean_ed = |n: usize| mean_var(&rows.iter().filter(|r| r.n == n).map(|r| r.ed).collect::<Vec<_>>()).0;
    if sizes.contains(&300) && sizes.contains(&400) {
        let (a, b) = (mean_ed(300), mean_ed(400));
        let rel = (b - a).abs() / a;
        report.check("ed_plateau_300_400", rel < 0.05, format!("mean ED {a} at N=300, {b} at N=400, relative change {rel}"));
    }
    let min_gain = rows.iter().map(|r| r.aug_ed - r.ed).fold(f64::INFINITY, f64::min);
    report.check("augmentation_raises_ed", min_gain > 0.0, format!("min augmented ED - ED = {min_gain}"));

    let svg = cfg.svg.then(|| {
        let series = |f: &dyn Fn(&Row) -> f64| {
            sizes
                .iter()
                .map(|&n| {
                    let v: Vec<f64> = rows.iter().filter(|r| r.n == n).map(f).collect();
                    (n as f64, mean_var(&v).0)
                })
                .collect::<Vec<_>>()
        };
        line_plot(
            "Chirps: entropy against dataset size",
            "N",
            "entropy",
            &[
                Series::new("ED", series(&|r| r.ed)),
                Series::new("augmented ED", series(&|r| r.aug_ed)).dashed(),
                Series::new("ln rank", series(&|r| (r.rank as f64).ln())),
            ],
        )
    });
    Ok(ExperimentOutput { table, report, svg })
}
