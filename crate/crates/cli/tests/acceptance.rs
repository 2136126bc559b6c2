//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use qha::augmentation::{augment_dataset, make_rect_domain, mixed_state_localization, normalized_augmentation, Domain};
use qha::datasets::{gen_hermite_pair_state, normalize_dataset, DataSet};
use qha::metrics::{alc, projection_functional_spectral, von_neumann_entropy};
use qha::operators::{conv_layer_identity, data_operator, total_correlation, HermitianOperator, DEFAULT_RANK_CUT};
use qha::tf::{grid_integrate, hermite_basis, stft, Grid, GridPoint, PhaseGrid, Signal};
use qha::Complex64;
use qha_cli::{experiments, run_experiment, write_outputs, ExperimentConfig, ExperimentOutput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { failures: Vec::new(), notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn finish(self, label: &str, elapsed: f64) -> bool {
        let ok = self.failures.is_empty();
        println!("{} criterion {label} ({elapsed:.1}s)", if ok { "PASS" } else { "FAIL" });
        for n in &self.notes {
            println!("     {n}");
        }
        for f in self.failures.iter().take(20) {
            println!("     failed: {f}");
        }
        ok
    }
}

fn random_signal(d: usize, rng: &mut ChaCha8Rng) -> Signal {
    Signal::new((0..d).map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect()).unwrap()
}

fn random_dataset(d: usize, rng: &mut ChaCha8Rng) -> DataSet {
    let n = rng.random_range(1..=5);
    normalize_dataset(&DataSet::new((0..n).map(|_| random_signal(d, rng)).collect(), "random").unwrap()).unwrap()
}

fn random_domain(d: usize, rng: &mut ChaCha8Rng) -> Domain {
    let grid = PhaseGrid::new(d).unwrap();
    let side = grid.side();
    let w = rng.random_range(0.2 * side..side);
    let h = rng.random_range(0.2 * side..side);
    make_rect_domain(grid, w, h, (rng.random_range(-side..side), rng.random_range(-side..side))).unwrap()
}

/// Moyal, augmentation traces, total-correlation normalization, augmentation
/// routes, the convolutional-layer identity and the two ALC routes.
fn identities() -> Criterion {
    let mut c = Criterion::new();
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut track = |key: &'static str, v: f64| {
        let e = worst.entry(key).or_insert(0.0);
        *e = e.max(v);
        v
    };
    for d in [8usize, 16, 32] {
        let grid = PhaseGrid::new(d).unwrap();
        for i in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * d as u64 + i);
            let tag = format!("d={d} instance={i}");

            let (f1, f2, g1, g2) =
                (random_signal(d, &mut rng), random_signal(d, &mut rng), random_signal(d, &mut rng), random_signal(d, &mut rng));
            let (v1, v2) = (stft(&f1, &g1).unwrap(), stft(&f2, &g2).unwrap());
            let lhs: Complex64 =
                v1.values().iter().zip(v2.values()).map(|(a, b)| a * b.conj()).sum::<Complex64>() / d as f64;
            let rhs = f1.inner(&f2).unwrap() * g1.inner(&g2).unwrap().conj();
            let scale = f1.norm() * f2.norm() * g1.norm() * g2.norm();
            c.require(track("moyal", (lhs - rhs).norm() / scale) <= 1e-10, format!("{tag}: Moyal"));

            let data = random_dataset(d, &mut rng);
            let s = data_operator(&data).unwrap();
            let om = random_domain(d, &mut rng);
            let loc = mixed_state_localization(&om, &s).unwrap();
            c.require(track("trace", (loc.trace() - om.measure()).abs()) <= 1e-9, format!("{tag}: tr(χ⋆S) = |Ω|"));

            let tc = total_correlation(&s, DEFAULT_RANK_CUT).unwrap();
            c.require(track("mass", (grid_integrate(&tc) - 1.0).abs()) <= 1e-9, format!("{tag}: ∫S̃ = 1"));
            let purity = s.matrix().iter().map(|x| x.norm_sqr()).sum::<f64>();
            c.require(
                track("origin", (tc.get(GridPoint::ORIGIN) - purity).abs()) <= 1e-9,
                format!("{tag}: S̃(0) = tr S²"),
            );

            let via_data = data_operator(&augment_dataset(&om, &data).unwrap()).unwrap();
            let via_op = normalized_augmentation(&om, &s).unwrap();
            c.require(track("augmentation", via_data.max_abs_diff(&via_op).unwrap()) <= 1e-9, format!("{tag}: augmentation routes"));

            let m = Grid::from_fn(grid, |_| rng.random::<f64>() - 0.5);
            let conv = conv_layer_identity(&f1, &g1, &m).unwrap();
            c.require(track("conv_layer", conv.max_abs_diff) <= 1e-9, format!("{tag}: conv layer identity"));

            let spectral = projection_functional_spectral(&loc).unwrap() / om.measure();
            let correlation = alc(&tc, &om).unwrap();
            c.require(track("alc_routes", (spectral - correlation).abs()) <= 1e-8, format!("{tag}: ALC routes"));
        }
    }
    c.notes.push(worst.iter().map(|(k, v)| format!("{k} {v:.1e}")).collect::<Vec<_>>().join(", "));
    c
}

fn run(cfg: &ExperimentConfig) -> ExperimentOutput {
    run_experiment(cfg).unwrap_or_else(|e| panic!("{}: {e}", cfg.experiment))
}

fn require_checks(c: &mut Criterion, out: &ExperimentOutput, names: &[&str]) {
    for name in names {
        match out.report.outcome_of(name) {
            Some(o) if !o.is_failure() => {}
            Some(_) => {
                let detail = out.report.checks.iter().find(|x| x.name == *name).map(|x| x.detail.clone()).unwrap_or_default();
                c.require(false, format!("{} {name}: {detail}", out.report.experiment));
            }
            None => c.require(false, format!("{} {name}: check missing", out.report.experiment)),
        }
    }
}

fn theorems() -> Criterion {
    let mut c = Criterion::new();
    let mut cfg = ExperimentConfig::new("bounds_suite");
    cfg.d = Some(32);
    cfg.trials = Some(50);
    cfg.svg = false;
    let out = run(&cfg);
    require_checks(
        &mut c,
        &out,
        &[
            "sandwich",
            "lemma",
            "finite_rank",
            "perimeter",
            "berezin_lieb_operator",
            "berezin_lieb_function",
        ],
    );
    let slack_lower = out.table.column_values("slack_lower");
    let slack_upper = out.table.column_values("slack_upper");
    let worst = slack_lower.iter().chain(&slack_upper).cloned().fold(f64::INFINITY, f64::min);
    c.require(slack_lower.len() == 50 && worst >= -1e-7, format!("smallest sandwich slack {worst:e}"));
    let pass = out.table.column_values("pass");
    c.require(pass.iter().all(|&p| p == 1.0), "an instance reported a failed check");
    let vacuous = out.report.checks.iter().find(|x| x.name == "perimeter").map(|x| x.detail.clone()).unwrap_or_default();
    c.notes.push(format!("50 instances at d=32, smallest slack {worst:.2e}; perimeter: {vacuous}"));
    c
}

fn exact_values() -> Criterion {
    let mut c = Criterion::new();
    let d = 32;
    let grid = PhaseGrid::new(d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_signal(d, &mut rng).normalized().unwrap();
    let h = von_neumann_entropy(&HermitianOperator::rank_one(&f)).unwrap();
    c.require(h.abs() <= 1e-10, format!("rank-one entropy {h:e}"));

    let basis = hermite_basis(d, 2).unwrap();
    let half = gen_hermite_pair_state(0.5, &basis[0], &basis[1]).unwrap();
    let h = von_neumann_entropy(&half).unwrap();
    c.require((h - std::f64::consts::LN_2).abs() <= 1e-9, format!("H(S_1/2) = {h}"));

    let full = Domain::full(grid);
    let s = data_operator(&random_dataset(d, &mut rng)).unwrap();
    let aug = normalized_augmentation(&full, &s).unwrap();
    let dev = aug.scale(d as f64).max_abs_diff(&HermitianOperator::identity(d)).unwrap();
    c.require(dev <= 1e-8, format!("full-torus augmentation differs from I/d by {dev:e}"));
    let h = von_neumann_entropy(&aug).unwrap();
    c.require((h - (d as f64).ln()).abs() <= 1e-8, format!("full-torus entropy {h}"));
    let a = alc(&total_correlation(&s, DEFAULT_RANK_CUT).unwrap(), &full).unwrap();
    c.require(a.abs() <= 1e-10, format!("ALC(full torus) = {a:e}"));
    c
}

/// Runs the whole catalog at its defaults and checks the figure orderings.
fn figures(dir: &Path) -> (Criterion, Vec<(ExperimentConfig, Vec<u8>)>) {
    let mut c = Criterion::new();
    let mut outputs = Vec::new();
    let start = Instant::now();
    for name in experiments::names() {
        let mut cfg = ExperimentConfig::new(name);
        cfg.out = dir.to_path_buf();
        let t0 = Instant::now();
        let out = run(&cfg);
        let files = write_outputs(&out, dir).unwrap();
        outputs.push((cfg, std::fs::read(&files.csv).unwrap()));
        let wanted: &[&str] = match name {
            "hermite_interp" => &["state_entropy_zero_at_t0", "state_entropy_symmetric", "state_entropy_peak_ln2", "far_pair_augments_higher"],
            "chirp_ed" => &["rank_is_min_n_d", "ed_plateau_300_400", "augmentation_raises_ed"],
            "gauss_alc" | "chirp_alc" => &["adapted_smallest_alc", "adapted_smallest_ed", "ed_increases_with_scale"],
            "local_components" => {
                &["noiseless_matches_classical", "state_entropy_increases_with_noise", "augmented_entropy_increases_with_noise"]
            }
            "hermite_mix" => &["span_below_single_from_n0"],
            "alc_scan" => &["gaussian_strictly_decreasing", "gaussian_final_below_0.05", "chirps_strictly_decreasing", "chirps_final_below_0.05"],
            _ => &[],
        };
        require_checks(&mut c, &out, wanted);
        c.notes.push(format!("{name}: {:.1}s, {} checks", t0.elapsed().as_secs_f64(), out.report.checks.len()));
    }
    let total = start.elapsed().as_secs_f64();
    c.require(total < 900.0, format!("catalog took {total:.0}s"));
    (c, outputs)
}

fn determinism(dir: &Path, first: &[(ExperimentConfig, Vec<u8>)]) -> Criterion {
    let mut c = Criterion::new();
    for (cfg, bytes) in first {
        let mut again = cfg.clone();
        again.out = dir.to_path_buf();
        again.threads = Some(2);
        again.svg = false;
        let out = run(&again);
        let files = write_outputs(&out, dir).unwrap();
        let rerun = std::fs::read(&files.csv).unwrap();
        c.require(rerun == *bytes, format!("{} CSV differs on rerun", cfg.experiment));
    }
    c.notes.push(format!("{} experiments rerun with a different thread count", first.len()));
    c
}

fn main() {
    let mut all = true;
    let t = Instant::now();
    all &= identities().finish("1 identities", t.elapsed().as_secs_f64());
    let t = Instant::now();
    all &= theorems().finish("2 theorem suite", t.elapsed().as_secs_f64());
    let t = Instant::now();
    all &= exact_values().finish("3 exact values", t.elapsed().as_secs_f64());
    let first = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let (c, outputs) = figures(first.path());
    all &= c.finish("4 figure orderings", t.elapsed().as_secs_f64());
    let second = tempfile::tempdir().unwrap();
    let t = Instant::now();
    all &= determinism(second.path(), &outputs).finish("5 determinism", t.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
