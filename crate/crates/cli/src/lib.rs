//! Command-line front end for `qha`: signal files, experiment runners and
//! their CSV/SVG/JSON outputs.

pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod report;
pub mod svg;
pub mod table;

use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use experiments::{BoundsRow, ExperimentOutput};
pub use report::Report;
pub use table::{Cell, ResultTable};

/// Runs one experiment on a dedicated thread pool and stamps the table with
/// the config hash, version and tolerances.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let runner = experiments::runner(&config.experiment)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Threads(e.to_string()))?;
    let mut out = pool.install(|| runner(config))?;
    let table = &mut out.table;
    table.set_meta("experiment", &config.experiment);
    table.set_meta("config_hash", config.hash());
    table.set_meta("version", env!("CARGO_PKG_VERSION"));
    table.set_meta("seed", config.seed);
    for (k, v) in &out.report.tolerances {
        table.set_meta(format!("tolerance.{k}"), v);
    }
    Ok(out)
}

/// Files written by [`write_outputs`].
#[derive(Clone, Debug)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub report: PathBuf,
}

pub fn write_outputs(out: &ExperimentOutput, dir: &Path) -> Result<WrittenFiles> {
    std::fs::create_dir_all(dir)?;
    let name = &out.report.experiment;
    let csv = dir.join(format!("{name}.csv"));
    out.table.write_path(&csv)?;
    let report = dir.join(format!("{name}.report.json"));
    std::fs::write(&report, serde_json::to_string_pretty(&out.report)? + "\n")?;
    let svg = match &out.svg {
        Some(text) => {
            let p = dir.join(format!("{name}.svg"));
            std::fs::write(&p, text)?;
            Some(p)
        }
        None => None,
    };
    Ok(WrittenFiles { csv, svg, report })
}
