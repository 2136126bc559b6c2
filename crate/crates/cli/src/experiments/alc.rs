use qha::augmentation::Domain;
use qha::datasets::{gen_chirps, gen_gaussian_combos, DataSet};
use qha::metrics::{alc, asymptotic_alc_scan, berezin_lieb_check_with};
use qha::operators::{data_operator, total_correlation, HermitianOperator, DEFAULT_RANK_CUT};
use qha::tf::{gaussian_window, PhaseGrid};
use rayon::prelude::*;

use super::chirps::rate_range;
use super::{adapted_shape, augmented_entropy, axis_spreads, centered_rect, mean_var, rng, ExperimentOutput, SHAPES};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::Report;
use crate::svg::{line_plot, Series};
use crate::table::{Cell, ResultTable};

const DEFAULT_SCALES: [f64; 3] = [1.0, 1.3, 1.6];

struct Trial {
    spreads: (f64, f64),
    /// `(alc, ed)` per shape, then per scale.
    values: Vec<(f64, f64)>,
}

fn shape_domains(grid: PhaseGrid, scales: &[f64]) -> Result<Vec<Domain>> {
    let mut out = Vec::new();
    for (_, w, h) in SHAPES {
        for &r in scales {
            out.push(centered_rect(grid, w * r, h * r)?);
        }
    }
    Ok(out)
}

fn shape_sweep<G>(cfg: &ExperimentConfig, mut report: Report, grid: PhaseGrid, generate: G) -> Result<ExperimentOutput>
where
    G: Fn(u64) -> Result<DataSet> + Sync,
{
    let trials = cfg.trials.unwrap_or(100);
    let scales = cfg.param_f64_list("scales", &DEFAULT_SCALES)?;
    report.param("trials", trials);
    report.param("scales", &scales);
    report.param("shapes", SHAPES);
    report.tolerance("ordering", 0.0);
    let domains = shape_domains(grid, &scales)?;
    let results = (0..trials)
        .into_par_iter()
        .map(|i| {
            let data = generate(cfg.seed + i as u64)?;
            let s = data_operator(&data)?;
            let tc = total_correlation(&s, DEFAULT_RANK_CUT)?;
            let values =
                domains.iter().map(|om| Ok((alc(&tc, om)?, augmented_entropy(om, &s)?))).collect::<Result<Vec<_>>>()?;
            Ok(Trial { spreads: axis_spreads(&tc), values })
        })
        .collect::<Result<Vec<Trial>>>()?;

    let k = scales.len();
    let st = mean_var(&results.iter().map(|t| t.spreads.0).collect::<Vec<_>>()).0;
    let sf = mean_var(&results.iter().map(|t| t.spreads.1).collect::<Vec<_>>()).0;
    let adapted = adapted_shape(st, sf);
    report.param("total_correlation_spread_time", st);
    report.param("total_correlation_spread_frequency", sf);
    report.param("adapted_shape", SHAPES[adapted].0);

    let mut table = ResultTable::new([
        "shape", "scale", "width", "height", "measure", "adapted", "alc_mean", "alc_var", "ed_mean", "ed_var",
    ]);
    table.set_meta("adapted_shape", SHAPES[adapted].0);
    let mut alc_mean = vec![0.0; SHAPES.len() * k];
    let mut ed_mean = vec![0.0; SHAPES.len() * k];
    for (si, (name, w, h)) in SHAPES.iter().enumerate() {
        for (ri, &r) in scales.iter().enumerate() {
            let j = si * k + ri;
            let (am, av) = mean_var(&results.iter().map(|t| t.values[j].0).collect::<Vec<_>>());
            let (em, ev) = mean_var(&results.iter().map(|t| t.values[j].1).collect::<Vec<_>>());
            alc_mean[j] = am;
            ed_mean[j] = em;
            table.push(vec![
                Cell::from(*name),
                r.into(),
                (w * r).into(),
                (h * r).into(),
                domains[j].measure().into(),
                Cell::Int((si == adapted) as i64),
                am.into(),
                av.into(),
                em.into(),
                ev.into(),
            ])?;
        }
    }

    let smallest = |means: &[f64]| {
        (0..k).all(|ri| (0..SHAPES.len()).all(|si| si == adapted || means[adapted * k + ri] < means[si * k + ri]))
    };
    let name = SHAPES[adapted].0;
    report.check("adapted_smallest_alc", smallest(&alc_mean), format!("mean ALC of `{name}` below both other shapes at every scale"));
    report.check("adapted_smallest_ed", smallest(&ed_mean), format!("mean ED of `{name}` below both other shapes at every scale"));
    let increasing = (0..SHAPES.len()).all(|si| (1..k).all(|ri| ed_mean[si * k + ri] > ed_mean[si * k + ri - 1]));
    report.check("ed_increases_with_scale", increasing, "mean ED strictly increasing in scale for every shape");

    let svg = cfg.svg.then(|| {
        let mut series = Vec::new();
        for (si, (name, _, _)) in SHAPES.iter().enumerate() {
            series.push(Series::new(format!("ALC {name}"), (0..k).map(|ri| (scales[ri], alc_mean[si * k + ri])).collect()));
        }
        line_plot("Mean ALC by domain shape", "scale", "ALC", &series)
    });
    Ok(ExperimentOutput { table, report, svg })
}

pub fn gauss_alc(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(128);
    let n = cfg.n.unwrap_or(50);
    let m = cfg.param_f64_list("m_rect", &[2.1875, 0.3125])?;
    let atoms = cfg.param_usize("atoms", 3)?;
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("n", n);
    report.param("m_rect", &m);
    report.param("atoms", atoms);
    let (mw, mh) = (m.first().copied().unwrap_or(2.1875), m.get(1).copied().unwrap_or(0.3125));
    shape_sweep(cfg, report, PhaseGrid::new(d)?, |seed| Ok(gen_gaussian_combos(n, d, (mw, mh), atoms, &mut rng(seed))?))
}

pub fn chirp_alc(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(280);
    let n = cfg.n.unwrap_or(150);
    let rates = rate_range(cfg)?;
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("n", n);
    report.param("rate_range", [rates.0, rates.1]);
    shape_sweep(cfg, report, PhaseGrid::new(d)?, |seed| Ok(gen_chirps(n, d, &mut rng(seed), rates)?))
}

pub fn alc_vs_ed(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d.unwrap_or(280);
    let n = cfg.n.unwrap_or(150);
    let scales = cfg.param_f64_list("scales", &DEFAULT_SCALES)?;
    let rates = rate_range(cfg)?;
    let mut report = Report::new(cfg);
    report.param("d", d);
    report.param("n", n);
    report.param("scales", &scales);
    report.param("rate_range", [rates.0, rates.1]);
    report.tolerance("sandwich_slack", 1e-7);

    let grid = PhaseGrid::new(d)?;
    let data = gen_chirps(n, d, &mut rng(cfg.seed), rates)?;
    let s = data_operator(&data)?;
    let tc = total_correlation(&s, DEFAULT_RANK_CUT)?;
    let domains = shape_domains(grid, &scales)?;
    let reports = domains.par_iter().map(|om| Ok(berezin_lieb_check_with(&s, &tc, om)?)).collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::new(["shape", "scale", "measure", "alc", "lower", "ed", "upper"]);
    let k = scales.len();
    for (j, b) in reports.iter().enumerate() {
        let (name, _, _) = SHAPES[j / k];
        table.push(vec![
            Cell::from(name),
            scales[j % k].into(),
            b.measure.into(),
            b.alc.into(),
            b.lower.into(),
            b.mid.into(),
            b.upper.into(),
        ])?;
    }
    let worst = reports.iter().map(|b| b.slack_lower.min(b.slack_upper)).fold(f64::INFINITY, f64::min);
    report.check("sandwich_holds", reports.iter().all(|b| b.pass), format!("smallest slack {worst:e}"));

    let svg = cfg.svg.then(|| {
        let pts = |f: &dyn Fn(&qha::metrics::BoundsReport) -> f64| {
            reports.iter().enumerate().map(|(j, b)| (j as f64, f(b))).collect::<Vec<_>>()
        };
        line_plot(
            "Lower bound, entropy and upper bound per domain",
            "domain index",
            "entropy",
            &[
                Series::new("ln|Ω| + ALC", pts(&|b| b.lower)).dashed(),
                Series::new("H_vN", pts(&|b| b.mid)),
                Series::new("H upper", pts(&|b| b.upper)).dashed(),
            ],
        )
    });
    Ok(ExperimentOutput { table, report, svg })
}

pub fn alc_scan(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d_gauss = cfg.param_usize("d_gauss", 128)?;
    let d_chirp = cfg.d.unwrap_or(280);
    let n = cfg.n.unwrap_or(150);
    let scales = cfg.param_f64_list("scales", &[1.0, 1.5, 2.0, 3.0])?;
    let rates = rate_range(cfg)?;
    let mut report = Report::new(cfg);
    report.param("d_gauss", d_gauss);
    report.param("d", d_chirp);
    report.param("n", n);
    report.param("scales", &scales);
    report.param("base_side", "torus side / 3");
    report.tolerance("final_alc_when_covering", 0.05);
    report.tolerance("coverage_fraction", 0.8);

    let gauss_grid = PhaseGrid::new(d_gauss)?;
    let gauss_tc = total_correlation(&HermitianOperator::rank_one(&gaussian_window(d_gauss)?), DEFAULT_RANK_CUT)?;
    let chirp_grid = PhaseGrid::new(d_chirp)?;
    let chirps = gen_chirps(n, d_chirp, &mut rng(cfg.seed), rates)?;
    let chirp_tc = total_correlation(&data_operator(&chirps)?, DEFAULT_RANK_CUT)?;

    let mut table = ResultTable::new(["dataset", "scale", "measure", "coverage", "alc"]);
    let mut series = Vec::new();
    for (label, grid, tc) in [("gaussian", gauss_grid, &gauss_tc), ("chirps", chirp_grid, &chirp_tc)] {
        let side = grid.side() / 3.0;
        let base = centered_rect(grid, side, side)?;
        let scan = asymptotic_alc_scan(tc, &base, &scales)?;
        let mut last_cover = 0.0;
        for &(r, a) in &scan {
            let om = base.scaled(r)?;
            last_cover = om.measure() / grid.total_measure();
            table.push(vec![Cell::from(label), r.into(), om.measure().into(), last_cover.into(), a.into()])?;
        }
        let decreasing = scan.windows(2).all(|w| w[1].1 < w[0].1);
        let values: Vec<String> = scan.iter().map(|(_, a)| format!("{a:.6}")).collect();
        report.check(&format!("{label}_strictly_decreasing"), decreasing, values.join(" > "));
        let last = scan.last().map(|p| p.1).unwrap_or(f64::NAN);
        if last_cover > 0.8 {
            report.check(&format!("{label}_final_below_0.05"), last < 0.05, format!("final ALC {last} at coverage {last_cover}"));
        }
        series.push(Series::new(label, scan));
    }
    let svg = cfg.svg.then(|| line_plot("ALC as the domain grows", "scale R", "ALC", &series));
    Ok(ExperimentOutput { table, report, svg })
}
