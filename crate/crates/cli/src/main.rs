use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qha::augmentation::{augment_dataset_capped, make_rect_domain, Domain, DEFAULT_MAX_AUGMENTED};
use qha::datasets::{
    default_tf_weight, gen_chirps, gen_gaussian_combos, gen_local_components, gen_random_tf_weighted, DataSet,
    DEFAULT_CHIRP_RATE,
};
use qha::metrics::{alc, differential_entropy, effective_dimension, von_neumann_entropy};
use qha::operators::{data_operator, total_correlation, DEFAULT_RANK_CUT};
use qha::tf::{hermite_basis, PhaseGrid};
use qha_cli::io::{read_signals, write_signals, SignalFormat};
use qha_cli::{experiments, run_experiment, write_outputs, BoundsRow, CliError, ExperimentConfig, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "qha", version, about = "Time-frequency data augmentation and dataset entropy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and write it to a signal file.
    Gen(GenArgs),
    /// Entropy and correlation metrics of a dataset.
    Metrics(MetricsArgs),
    /// Write the dataset of all time-frequency shifts inside a domain.
    Augment(AugmentArgs),
    /// Run every inequality check on a dataset and a domain.
    Bounds(BoundsArgs),
    /// Run a catalog experiment (or `all`).
    Experiment(ExperimentArgs),
    /// Convert between binary and CSV signal files.
    Convert { input: PathBuf, output: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Chirps,
    TfWeighted,
    GaussianCombos,
    LocalComponents,
    Hermite,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 128)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Chirp rate range in bins.
    #[arg(long, num_args = 2, default_values_t = [DEFAULT_CHIRP_RATE.0, DEFAULT_CHIRP_RATE.1])]
    rate: Vec<f64>,
    /// Noise energy for local components.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Side of the square holding local-component shifts.
    #[arg(long, default_value_t = 0.6)]
    spread: f64,
    /// Rectangle of Gaussian-combination shifts.
    #[arg(long, num_args = 2, default_values_t = [2.1875, 0.3125])]
    rect: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    atoms: usize,
}

#[derive(Args, Clone)]
struct DomainArgs {
    /// Domain width along time, in phase-space units.
    #[arg(long)]
    width: Option<f64>,
    /// Domain height along frequency, in phase-space units.
    #[arg(long)]
    height: Option<f64>,
    /// Domain size in grid cells (time, frequency) instead of phase units.
    #[arg(long, num_args = 2, conflicts_with_all = ["width", "height"])]
    cells: Option<Vec<usize>>,
    #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [0.0, 0.0])]
    center: Vec<f64>,
}

impl DomainArgs {
    fn build(&self, d: usize) -> Result<Option<Domain>> {
        let grid = PhaseGrid::new(d)?;
        if let Some(c) = &self.cells {
            let s = grid.side();
            let center = qha::tf::GridPoint::new(
                grid.wrap((self.center[0] * s).round() as i64),
                grid.wrap((self.center[1] * s).round() as i64),
            );
            return Ok(Some(Domain::cell_rect(grid, c[0], c[1], center)?));
        }
        match (self.width, self.height) {
            (Some(w), Some(h)) => Ok(Some(make_rect_domain(grid, w, h, (self.center[0], self.center[1]))?)),
            (None, None) => Ok(None),
            _ => Err(CliError::Config("give both --width and --height".into())),
        }
    }

    fn require(&self, d: usize) -> Result<Domain> {
        self.build(d)?.ok_or_else(|| CliError::Config("a domain is required (--width/--height or --cells)".into()))
    }
}

#[derive(Args)]
struct MetricsArgs {
    input: PathBuf,
    #[command(flatten)]
    domain: DomainArgs,
}

#[derive(Args)]
struct AugmentArgs {
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, default_value_t = DEFAULT_MAX_AUGMENTED)]
    max_signals: usize,
}

#[derive(Args)]
struct BoundsArgs {
    input: PathBuf,
    #[command(flatten)]
    domain: DomainArgs,
    /// Append the result as one CSV row (header written when the file is new).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, overrides_with = "no_svg")]
    svg: bool,
    #[arg(long = "no-svg")]
    no_svg: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// List the catalog and exit.
    #[arg(long)]
    list: bool,
}

fn generate(a: &GenArgs) -> Result<DataSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    Ok(match a.family {
        Family::Chirps => gen_chirps(a.n, a.d, &mut rng, (a.rate[0], a.rate[1]))?,
        Family::TfWeighted => gen_random_tf_weighted(a.n, a.d, default_tf_weight, &mut rng)?,
        Family::GaussianCombos => gen_gaussian_combos(a.n, a.d, (a.rect[0], a.rect[1]), a.atoms, &mut rng)?,
        Family::LocalComponents => gen_local_components(a.n, a.d, a.noise, a.spread, &mut rng)?.data,
        Family::Hermite => DataSet::new(hermite_basis(a.d, a.n)?, format!("hermite(n={}, d={})", a.n, a.d))?,
    })
}

fn metrics(a: &MetricsArgs) -> Result<()> {
    let data = read_signals(&a.input)?;
    let s = data_operator(&qha::datasets::normalize_dataset(&data)?)?;
    let (h, ed) = effective_dimension(&s)?;
    let tc = total_correlation(&s, DEFAULT_RANK_CUT)?;
    let mut out = serde_json::json!({
        "d": data.dim(),
        "n": data.len(),
        "entropy": h,
        "effective_dimension": ed,
        "purity": s.trace_of_square(),
        "total_correlation_entropy": differential_entropy(&tc)?,
    });
    if let Some(om) = a.domain.build(data.dim())? {
        let aug = qha::augmentation::normalized_augmentation(&om, &s)?;
        out["domain_measure"] = om.measure().into();
        out["alc"] = alc(&tc, &om)?.into();
        out["augmented_entropy"] = von_neumann_entropy(&aug)?.into();
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn bounds(a: &BoundsArgs) -> Result<bool> {
    let data = qha::datasets::normalize_dataset(&read_signals(&a.input)?)?;
    let s = data_operator(&data)?;
    let om = a.domain.require(data.dim())?;
    let row = BoundsRow::compute(&s, &om, &s, &om.indicator())?;
    println!("{}", serde_json::to_string_pretty(&row)?);
    if let Some(path) = &a.csv {
        let mut table = qha_cli::ResultTable::new(BoundsRow::COLUMNS);
        table.push(row.cells())?;
        let mut buf = Vec::new();
        table.write(&mut buf)?;
        let text = String::from_utf8_lossy(&buf).into_owned();
        let text: String = if path.exists() { text.lines().skip(1).map(|l| format!("{l}\n")).collect() } else { text };
        let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        file.write_all(text.as_bytes())?;
    }
    let failures = row.failures();
    if !failures.is_empty() {
        eprintln!("failed: {}", failures.join(", "));
    }
    Ok(failures.is_empty())
}

fn experiment(a: &ExperimentArgs) -> Result<bool> {
    if a.list {
        for name in experiments::names() {
            println!("{name}");
        }
        return Ok(true);
    }
    let mut base = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(a.experiment.clone().unwrap_or_default()),
    };
    if let Some(e) = &a.experiment {
        base.experiment = e.clone();
    }
    if base.experiment.is_empty() {
        return Err(CliError::Config("name an experiment with --experiment or --config".into()));
    }
    if let Some(s) = a.seed {
        base.seed = s;
    }
    if a.d.is_some() {
        base.d = a.d;
    }
    if a.n.is_some() {
        base.n = a.n;
    }
    if a.trials.is_some() {
        base.trials = a.trials;
    }
    if let Some(o) = &a.out {
        base.out = o.clone();
    }
    if a.svg {
        base.svg = true;
    }
    if a.no_svg {
        base.svg = false;
    }
    if a.threads.is_some() {
        base.threads = a.threads;
    }
    let names: Vec<String> = if base.experiment == "all" {
        experiments::names().map(String::from).collect()
    } else {
        vec![base.experiment.clone()]
    };
    let mut ok = true;
    for name in names {
        let mut cfg = base.clone();
        cfg.experiment = name;
        let out = run_experiment(&cfg)?;
        let files = write_outputs(&out, &cfg.out)?;
        for c in &out.report.checks {
            println!("{:<14} {:<44} {}", cfg.experiment, c.name, c.outcome.as_str());
        }
        println!("{:<14} wrote {}", cfg.experiment, files.csv.display());
        ok &= !out.report.failed();
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(a) => {
            let data = generate(&a)?;
            write_signals(&data, &a.out, SignalFormat::from_path(&a.out))?;
            Ok(true)
        }
        Command::Metrics(a) => metrics(&a).map(|_| true),
        Command::Augment(a) => {
            let data = qha::datasets::normalize_dataset(&read_signals(&a.input)?)?;
            let om = a.domain.require(data.dim())?;
            let aug = augment_dataset_capped(&om, &data, a.max_signals)?;
            write_signals(&aug, &a.out, SignalFormat::from_path(&a.out))?;
            Ok(true)
        }
        Command::Bounds(a) => bounds(&a),
        Command::Experiment(a) => experiment(&a),
        Command::Convert { input, output } => {
            let data = read_signals(&input)?;
            write_signals(&data, &output, SignalFormat::from_path(&output))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
